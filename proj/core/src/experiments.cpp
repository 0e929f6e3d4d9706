#include "todalab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace todalab {

namespace {

constexpr const char* kVersion = "todalab 0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad numeric value for " + key + ": " + v);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials >= 1 required");
  if (!(eps > 0.0)) throw std::invalid_argument("config: eps > 0 required");
  ensemble.validate();
}

std::vector<std::string> manifest_lines(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back(std::string("# ") + kVersion);
  std::string l = "# experiment=" + cfg.experiment + " ensemble=" + to_string(cfg.ensemble.kind) +
                  " n=" + std::to_string(cfg.ensemble.n) + " beta=" + fmt(cfg.ensemble.beta) +
                  " half_width=" + fmt(cfg.ensemble.half_width) +
                  " m=" + std::to_string(cfg.ensemble.bernoulli_summands) + " eps=" + fmt(cfg.eps) +
                  " trials=" + std::to_string(cfg.trials) + " seed=" + std::to_string(cfg.ensemble.seed) +
                  " gamma=" + fmt(cfg.gamma) + " sigma=" + fmt(cfg.sigma);
  if (cfg.p) l += " p=" + fmt(*cfg.p);
  if (cfg.s) l += " s=" + fmt(*cfg.s);
  lines.push_back(l);
  lines.push_back("# per-trial stream: RandomStream(seed, trial_index); rows sorted by trial index");
  return lines;
}

void parallel_trials(std::size_t trials, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || trials <= 1) {
    for (std::size_t i = 0; i < trials; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(workers, static_cast<unsigned>(trials));
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

SpectralData draw_spectral(const EnsembleSpec& spec, RandomStream& stream) {
  switch (spec.kind) {
    case EnsembleKind::factorized:
      return sample_factorized(spec, stream);
    case EnsembleKind::goe:
      return spectral_from_matrix(sample_goe(spec, stream));
    case EnsembleKind::boe:
      return spectral_from_matrix(sample_boe(spec, stream));
    case EnsembleKind::gue:
      return spectral_from_matrix(sample_gue(spec, stream));
    case EnsembleKind::bue:
      return spectral_from_matrix(sample_bue(spec, stream));
    case EnsembleKind::fixed2x2:
      return spectral_from_matrix(fixed2x2_matrix());
    case EnsembleKind::diagonal:
      return spectral_from_matrix(diagonal_matrix(spec.n, spec.half_width));
  }
  throw std::invalid_argument("draw_spectral: unknown kind");
}

HaltingRecord halting_record(const ExperimentConfig& cfg, std::size_t trial, const SpectralData& sd) {
  const std::size_t n = sd.size();
  const double c_v = semicircle(cfg.ensemble.half_width).c_v;
  HaltingRecord rec;
  rec.trial = trial;
  rec.kind = to_string(cfg.ensemble.kind);
  rec.n = n;
  rec.beta = cfg.ensemble.beta;
  rec.eps = cfg.eps;
  rec.alpha = 2.0 * std::log(1.0 / cfg.eps) / std::log(static_cast<double>(n));
  rec.lambda_top = sd.lambdas.back();
  rec.top_gap = sd.lambdas.back() - sd.lambdas[n - 2];
  rec.in_scaling_region = scaling_region(cfg.eps, n, cfg.sigma);
  rec.degenerate = degenerate_top(sd) || !(rec.top_gap > 0.0);
  try {
    rec.t1 = halting_time(sd, cfg.eps);
  } catch (const std::exception&) {
    rec.degenerate = true;
  }
  rec.t_star = t_star(sd, cfg.eps, n);
  rec.t_hat = t_hat(sd, cfg.eps, n);
  if (rec.t1) {
    rec.t_tilde = rescale_tilde(*rec.t1, n, cfg.eps, cfg.gamma, c_v);
    rec.err_top = err_top(sd, *rec.t1);
  }
  rec.gap_stat = gap_statistic(sd, n, c_v);
  return rec;
}

}  // namespace

std::vector<HaltingRecord> run_halt(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<HaltingRecord> records(cfg.trials);
  parallel_trials(cfg.trials, cfg.workers, [&](std::size_t trial) {
    RandomStream stream(cfg.ensemble.seed, trial);
    const SpectralData sd = draw_spectral(cfg.ensemble, stream);
    records[trial] = halting_record(cfg, trial, sd);
  });
  return records;
}

Table1Result run_table1(const ExperimentConfig& cfg) {
  Table1Result out;
  out.ensembles = cfg.ensembles.empty() ? std::vector<std::string>{"GUE", "GOE"} : cfg.ensembles;
  const std::vector<std::size_t> ns = cfg.n_list.empty() ? std::vector<std::size_t>{50, 100, 200} : cfg.n_list;

  for (std::size_t n : ns) {
    Table1Row row;
    row.n = n;
    row.margin = std::log(1.0 / cfg.eps) / std::log(static_cast<double>(n)) - 5.0 / 3.0;
    for (const std::string& name : out.ensembles) {
      ExperimentConfig cell = cfg;
      cell.ensemble.kind = ensemble_from_string(name);
      cell.ensemble.n = n;
      cell.ensemble.beta = cell.ensemble.complex_kind() ? 2.0 : 1.0;
      // decorrelate cells while keeping the master seed in charge
      std::uint64_t tag = 1469598103934665603ull;
      for (char c : name) tag = (tag ^ static_cast<unsigned char>(c)) * 1099511628211ull;
      cell.ensemble.seed = cfg.ensemble.seed ^ (0x9e3779b97f4a7c15ull * n) ^ tag;
      auto records = run_halt(cell);
      std::vector<double> t1;
      t1.reserve(records.size());
      for (const auto& r : records) {
        if (r.t1) t1.push_back(*r.t1);
      }
      row.ratios.push_back(summarize(t1).ratio);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

// A-priori precision guard for the deflation experiment: the propagator's
// accumulated roundoff must sit far below the deflation tolerance.
void check_khat_horizon(const ExperimentConfig& cfg) {
  const double n = static_cast<double>(cfg.ensemble.n);
  const double hw = cfg.ensemble.half_width;
  const double gap_typ = std::pow(2.0, 7.0 / 6.0) * 1.9 / std::pow(n, 2.0 / 3.0) * (hw / (2.0 * std::sqrt(2.0)));
  const double t_est = 2.0 * std::log(1.0 / cfg.eps) / (2.0 * 0.2 * gap_typ);  // 5x small-gap allowance
  const double steps_est = t_est * (2.0 * hw) / 25.0 + t_est * 2.0 * gap_typ;
  const double err_est = n * 2.2e-16 * steps_est;
  if (cfg.eps < 1e3 * err_est) {
    throw std::runtime_error(
        "khat: requested (n, eps) is outside the propagator precision horizon: expected flow "
        "roundoff ~" + fmt(err_est) + " is not safely below eps=" + fmt(cfg.eps) +
        "; reduce n or raise eps");
  }
}

}  // namespace

KhatResult run_khat(const ExperimentConfig& cfg) {
  cfg.validate();
  check_khat_horizon(cfg);
  KhatResult out;
  out.trials = cfg.trials;

  std::vector<std::optional<std::size_t>> khats(cfg.trials);
  parallel_trials(cfg.trials, cfg.workers, [&](std::size_t trial) {
    RandomStream stream(cfg.ensemble.seed, trial);
    const HermitianAny any = sample_wigner(cfg.ensemble, stream);
    std::visit(
        [&](const auto& h) {
          const auto es = eigh(h);
          const double delta = 2.0 * (es.lambdas.back() - es.lambdas[es.lambdas.size() - 2]);
          const double cap = 6.0 * std::log(1.0 / cfg.eps) / std::max(delta, 1e-12);
          khats[trial] = deflation_times(es, h, cfg.eps, cap, /*stop_after_first=*/true).k_hat;
        },
        any);
  });
  for (const auto& k : khats) {
    if (k) ++out.counts[*k];
    else ++out.failed;
  }
  return out;
}

GapDistResult run_gapdist(const ExperimentConfig& cfg) {
  cfg.validate();
  const double c_v = semicircle(cfg.ensemble.half_width).c_v;
  std::vector<std::optional<std::pair<double, double>>> draws(cfg.trials);  // (statistic, gap)
  parallel_trials(cfg.trials, cfg.workers, [&](std::size_t trial) {
    RandomStream stream(cfg.ensemble.seed, trial);
    double gap = 0.0;
    if (cfg.ensemble.kind == EnsembleKind::factorized) {
      const SymTridiagonal t = sample_beta_hermite_tridiag(cfg.ensemble, stream);
      const auto top2 = top_eigs_tridiag(t, 2);
      gap = top2[0] - top2[1];
    } else {
      const SpectralData sd = draw_spectral(cfg.ensemble, stream);
      gap = sd.lambdas.back() - sd.lambdas[sd.size() - 2];
    }
    if (gap > 0.0) {
      draws[trial] = std::make_pair(gap_statistic(gap, cfg.ensemble.n, c_v), gap);
    }
  });
  GapDistResult out;
  std::vector<std::pair<double, double>> kept;
  for (const auto& d : draws) {
    if (d) kept.push_back(*d);
    else ++out.zero_gap_trials;
  }
  std::sort(kept.begin(), kept.end());
  out.statistics.reserve(kept.size());
  out.raw_gaps.reserve(kept.size());
  for (const auto& [stat, gap] : kept) {
    out.statistics.push_back(stat);
    out.raw_gaps.push_back(gap);
  }
  return out;
}

CompareResult run_compare(const std::vector<double>& a, const std::vector<double>& b,
                          std::optional<double> bound) {
  if (a.empty() || b.empty()) throw std::invalid_argument("compare: empty input column");
  CompareResult out;
  out.ks = ks_distance(Ecdf(a), Ecdf(b));
  out.count_a = a.size();
  out.count_b = b.size();
  out.bound = bound;
  out.pass = !bound || out.ks <= *bound;
  return out;
}

PropErrorResult run_prop_error(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> errs(cfg.trials, NAN), divs(cfg.trials, NAN);
  parallel_trials(cfg.trials, cfg.workers, [&](std::size_t trial) {
    RandomStream stream(cfg.ensemble.seed, trial);
    const SpectralData sd = draw_spectral(cfg.ensemble, stream);
    double t1;
    try {
      t1 = halting_time(sd, cfg.eps);
    } catch (const std::exception&) {
      return;
    }
    const double err = err_top(sd, t1);
    const double n = static_cast<double>(sd.size());
    const double x = x11(sd, t1);
    errs[trial] = err / cfg.eps;
    divs[trial] = std::pow(n, 2.0 / 3.0 + 0.1) * std::abs(sd.lambdas[sd.size() - 2] - x);
  });
  std::vector<double> e, d;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    if (!std::isnan(errs[i])) {
      e.push_back(errs[i]);
      d.push_back(divs[i]);
    }
  }
  if (e.empty()) throw std::runtime_error("prop-error: no successful trials");
  PropErrorResult out;
  for (double q : {0.5, 0.9, 0.95, 0.99}) {
    out.err_quantiles.push_back(quantile_of(e, q));
    out.divergence_quantiles.push_back(quantile_of(d, q));
  }
  std::size_t below = 0;
  for (double v : e) {
    if (v <= 0.1) ++below;
  }
  out.frac_err_below_tenth = static_cast<double>(below) / static_cast<double>(e.size());
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  return f;
}

void write_manifest(std::ofstream& f, const ExperimentConfig& cfg) {
  for (const auto& line : manifest_lines(cfg)) f << line << '\n';
}

}  // namespace

void write_halt_csv(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<HaltingRecord>& records) {
  auto f = open_out(path);
  write_manifest(f, cfg);
  f << HaltingRecord::csv_header() << '\n';
  for (const auto& r : records) f << r.csv_row() << '\n';
}

void write_table1_csv(const std::string& path, const ExperimentConfig& cfg, const Table1Result& table) {
  auto f = open_out(path);
  write_manifest(f, cfg);
  f << "n,margin";
  for (const auto& e : table.ensembles) f << ",ratio_" << e;
  f << '\n';
  for (const auto& row : table.rows) {
    f << row.n << ',' << fmt(row.margin);
    for (double r : row.ratios) f << ',' << fmt(r);
    f << '\n';
  }
}

void write_khat_csv(const std::string& path, const ExperimentConfig& cfg, const KhatResult& result) {
  auto f = open_out(path);
  write_manifest(f, cfg);
  f << "# failed_trials=" << result.failed << '\n';
  f << "k_hat,count,frequency\n";
  for (const auto& [k, c] : result.counts) {
    f << k << ',' << c << ',' << fmt(static_cast<double>(c) / static_cast<double>(result.trials)) << '\n';
  }
}

void write_ecdf_csv(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<double>& sorted_values, std::size_t excluded) {
  auto f = open_out(path);
  write_manifest(f, cfg);
  f << "# excluded_zero_gap_trials=" << excluded << '\n';
  f << "value,ecdf\n";
  const double n = static_cast<double>(sorted_values.size());
  for (std::size_t i = 0; i < sorted_values.size(); ++i) {
    f << fmt(sorted_values[i]) << ',' << fmt(static_cast<double>(i + 1) / n) << '\n';
  }
}

void write_deflation_csv(const std::string& path, const ExperimentConfig& cfg,
                         const std::vector<DeflationResult>& results) {
  auto f = open_out(path);
  write_manifest(f, cfg);
  f << "trial,n,eps,k_hat,t_min\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    f << i << ',' << cfg.ensemble.n << ',' << fmt(cfg.eps) << ',';
    if (r.k_hat) f << *r.k_hat;
    f << ',';
    if (r.t_min) f << fmt(*r.t_min);
    f << '\n';
  }
  std::string long_path = path;
  const auto dot = long_path.rfind('.');
  long_path = (dot == std::string::npos ? long_path : long_path.substr(0, dot)) + "_tk.csv";
  auto g = open_out(long_path);
  write_manifest(g, cfg);
  g << "trial,k,t_k\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    for (std::size_t k = 1; k <= r.t_k.size(); ++k) {
      g << i << ',' << k << ',';
      if (r.t_k[k - 1]) g << fmt(*r.t_k[k - 1]);
      g << '\n';
    }
  }
}

void write_histogram_csv(const std::string& path, const std::vector<std::string>& manifest,
                         const Histogram& h) {
  auto f = open_out(path);
  for (const auto& line : manifest) f << line << '\n';
  f << "edge_lo,edge_hi,mass,density\n";
  for (std::size_t i = 0; i < h.mass.size(); ++i) {
    f << fmt(h.edges[i]) << ',' << fmt(h.edges[i + 1]) << ',' << fmt(h.mass[i]) << ',' << fmt(h.density[i])
      << '\n';
  }
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open input file: " + path);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split(trim(line), ',');
    break;
  }
  std::size_t idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) idx = i;
  }
  if (idx == header.size()) throw std::invalid_argument("column not found in " + path + ": " + column);
  std::vector<double> out;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ',');
    if (idx >= cells.size()) continue;
    const std::string cell = trim(cells[idx]);
    if (cell.empty()) continue;
    out.push_back(parse_double(cell, column));
  }
  return out;
}

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string k = trim(key), v = trim(value);
  if (k == "experiment") cfg.experiment = v;
  else if (k == "ensemble") cfg.ensemble.kind = ensemble_from_string(v);
  else if (k == "n") cfg.ensemble.n = static_cast<std::size_t>(std::stoul(v));
  else if (k == "beta") cfg.ensemble.beta = parse_double(v, k);
  else if (k == "half_width" || k == "half-width") cfg.ensemble.half_width = parse_double(v, k);
  else if (k == "m" || k == "bernoulli_summands") cfg.ensemble.bernoulli_summands = std::stoi(v);
  else if (k == "seed") cfg.ensemble.seed = std::stoull(v);
  else if (k == "eps") cfg.eps = parse_double(v, k);
  else if (k == "trials") cfg.trials = static_cast<std::size_t>(std::stoul(v));
  else if (k == "gamma") cfg.gamma = parse_double(v, k);
  else if (k == "sigma") cfg.sigma = parse_double(v, k);
  else if (k == "p") cfg.p = parse_double(v, k);
  else if (k == "s") cfg.s = parse_double(v, k);
  else if (k == "out") cfg.out = v;
  else if (k == "workers") cfg.workers = static_cast<unsigned>(std::stoul(v));
  else if (k == "n_list") {
    cfg.n_list.clear();
    for (const auto& tok : split(v, ',')) {
      if (!trim(tok).empty()) cfg.n_list.push_back(static_cast<std::size_t>(std::stoul(trim(tok))));
    }
  } else if (k == "ensembles") {
    cfg.ensembles.clear();
    for (const auto& tok : split(v, ',')) {
      if (!trim(tok).empty()) cfg.ensembles.push_back(trim(tok));
    }
  } else {
    throw std::invalid_argument("unknown config key: " + k);
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(f, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + t);
    apply_config_line(cfg, t.substr(0, eq), t.substr(eq + 1));
  }
  return cfg;
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile_of: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - w) + v[hi] * w;
}

}  // namespace todalab
