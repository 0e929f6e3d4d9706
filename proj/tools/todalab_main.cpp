#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "todalab/experiments.hpp"

namespace {

using todalab::ExperimentConfig;

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& ensemble_name) {
  cmd->add_option("--ensemble", ensemble_name, "GOE|GUE|BOE|BUE|factorized|fixed2x2|diagonal");
  cmd->add_option("--n", cfg.ensemble.n, "matrix dimension");
  cmd->add_option("--beta", cfg.ensemble.beta, "symmetry class (factorized admits any beta >= 1)");
  cmd->add_option("--half-width", cfg.ensemble.half_width, "limiting support half-width");
  cmd->add_option("--m", cfg.ensemble.bernoulli_summands, "Rademacher summands per BOE/BUE part");
  cmd->add_option("--eps", cfg.eps, "deflation tolerance");
  cmd->add_option("--trials", cfg.trials, "Monte Carlo trials");
  cmd->add_option("--seed", cfg.ensemble.seed, "master seed");
  cmd->add_option("--gamma", cfg.gamma, "recentering constant in the T-tilde denominator");
  cmd->add_option("--sigma", cfg.sigma, "scaling-region parameter");
  cmd->add_option("--p", [&cfg](const std::vector<std::string>& v) { cfg.p = std::stod(v[0]); return true; },
                  "gap-condition parameter");
  cmd->add_option("--s", [&cfg](const std::vector<std::string>& v) { cfg.s = std::stod(v[0]); return true; },
                  "rigidity parameter");
  cmd->add_option("--workers", cfg.workers, "worker threads (output is worker-count independent)");
  cmd->add_option("--out", cfg.out, "output CSV path");
  cmd->set_config("--config", "", "key=value config file; flags override");
}

void finalize(ExperimentConfig& cfg, const std::string& ensemble_name, const char* experiment) {
  if (!ensemble_name.empty()) cfg.ensemble.kind = todalab::ensemble_from_string(ensemble_name);
  if (cfg.ensemble.kind == todalab::EnsembleKind::goe || cfg.ensemble.kind == todalab::EnsembleKind::boe) {
    cfg.ensemble.beta = 1.0;
  } else if (cfg.ensemble.kind == todalab::EnsembleKind::gue ||
             cfg.ensemble.kind == todalab::EnsembleKind::bue) {
    cfg.ensemble.beta = 2.0;
  }
  cfg.experiment = experiment;
  if (cfg.out.empty()) cfg.out = std::string(experiment) + ".csv";
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for the Toda eigenvalue algorithm's halting times"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string ensemble_name;

  auto* halt = app.add_subcommand("halt", "per-trial halting records (T1, T*, That, Ttilde, gap statistic)");
  add_common_options(halt, cfg, ensemble_name);

  auto* deflate = app.add_subcommand("deflate", "full deflation times T(k), T(H), k-hat per trial");
  add_common_options(deflate, cfg, ensemble_name);
  double t_cap_mult = 6.0;
  deflate->add_option("--cap-mult", t_cap_mult, "t_cap = cap-mult * log(1/eps)/delta_{N-1}");

  auto* gapdist = app.add_subcommand("gapdist", "ECDF of the rescaled top-gap statistic");
  add_common_options(gapdist, cfg, ensemble_name);

  auto* table1 = app.add_subcommand("table1", "mean/std ratios of T1 over an N grid and ensembles");
  add_common_options(table1, cfg, ensemble_name);
  std::string n_list_str, ensembles_str;
  table1->add_option("--n-list", n_list_str, "comma-separated N grid (default 50,100,200)");
  table1->add_option("--ensembles", ensembles_str, "comma-separated ensembles (default GUE,GOE)");

  auto* khat = app.add_subcommand("khat", "frequency table of the minimizing deflation index");
  add_common_options(khat, cfg, ensemble_name);

  auto* compare = app.add_subcommand("compare", "two-sample KS distance between CSV columns");
  std::string file_a, col_a, file_b, col_b;
  std::optional<double> bound;
  compare->add_option("file_a", file_a)->required();
  compare->add_option("column_a", col_a)->required();
  compare->add_option("file_b", file_b)->required();
  compare->add_option("column_b", col_b)->required();
  compare->add_option("--bound", [&bound](const std::vector<std::string>& v) {
    bound = std::stod(v[0]);
    return true;
  }, "pass/fail KS bound");

  auto* hist = app.add_subcommand("hist", "histogram of a CSV column");
  std::string hist_file, hist_col;
  std::size_t hist_bins = 0;
  hist->add_option("file", hist_file)->required();
  hist->add_option("column", hist_col)->required();
  hist->add_option("--bins", hist_bins, "bin count (default Freedman-Diaconis)");
  std::string hist_out = "hist.csv";
  hist->add_option("--out", hist_out, "output CSV path");

  auto* prop = app.add_subcommand("prop-error", "quantiles of the rescaled true error at T1");
  add_common_options(prop, cfg, ensemble_name);

  CLI11_PARSE(app, argc, argv);
  Timer timer;

  try {
    if (halt->parsed()) {
      finalize(cfg, ensemble_name, "halt");
      auto records = todalab::run_halt(cfg);
      todalab::write_halt_csv(cfg.out, cfg, records);
      std::size_t degenerate = 0;
      for (const auto& r : records) degenerate += r.degenerate ? 1 : 0;
      std::cout << "halt: " << records.size() << " trials, " << degenerate << " degenerate, wrote "
                << cfg.out << " (" << timer.seconds() << " s)\n";
    } else if (deflate->parsed()) {
      finalize(cfg, ensemble_name, "deflate");
      cfg.validate();
      std::vector<todalab::DeflationResult> results(cfg.trials);
      todalab::parallel_trials(cfg.trials, cfg.workers, [&](std::size_t trial) {
        todalab::RandomStream stream(cfg.ensemble.seed, trial);
        const auto any = todalab::sample_wigner(cfg.ensemble, stream);
        std::visit(
            [&](const auto& h) {
              const auto es = todalab::eigh(h);
              const double delta = 2.0 * (es.lambdas.back() - es.lambdas[es.lambdas.size() - 2]);
              const double cap = t_cap_mult * std::log(1.0 / cfg.eps) / std::max(delta, 1e-12);
              results[trial] = todalab::deflation_times(es, h, cfg.eps, cap);
            },
            any);
      });
      todalab::write_deflation_csv(cfg.out, cfg, results);
      std::cout << "deflate: " << results.size() << " trials, wrote " << cfg.out << " ("
                << timer.seconds() << " s)\n";
    } else if (gapdist->parsed()) {
      finalize(cfg, ensemble_name, "gapdist");
      auto result = todalab::run_gapdist(cfg);
      todalab::write_ecdf_csv(cfg.out, cfg, result.statistics, result.zero_gap_trials);
      std::cout << "gapdist: " << result.statistics.size() << " samples ("
                << result.zero_gap_trials << " zero-gap excluded), wrote " << cfg.out << " ("
                << timer.seconds() << " s)\n";
    } else if (table1->parsed()) {
      finalize(cfg, ensemble_name, "table1");
      cfg.eps = table1->count("--eps") ? cfg.eps : 1e-5;
      if (!n_list_str.empty()) todalab::apply_config_line(cfg, "n_list", n_list_str);
      if (!ensembles_str.empty()) todalab::apply_config_line(cfg, "ensembles", ensembles_str);
      auto table = todalab::run_table1(cfg);
      todalab::write_table1_csv(cfg.out, cfg, table);
      std::cout << "table1: " << table.rows.size() << " rows, wrote " << cfg.out << " ("
                << timer.seconds() << " s)\n";
    } else if (khat->parsed()) {
      finalize(cfg, ensemble_name, "khat");
      auto result = todalab::run_khat(cfg);
      todalab::write_khat_csv(cfg.out, cfg, result);
      std::cout << "khat: " << result.trials << " trials, " << result.failed << " without crossing, wrote "
                << cfg.out << " (" << timer.seconds() << " s)\n";
    } else if (compare->parsed()) {
      const auto a = todalab::read_csv_column(file_a, col_a);
      const auto b = todalab::read_csv_column(file_b, col_b);
      const auto res = todalab::run_compare(a, b, bound);
      std::cout << "{\"ks\": " << res.ks << ", \"count_a\": " << res.count_a
                << ", \"count_b\": " << res.count_b;
      if (res.bound) std::cout << ", \"bound\": " << *res.bound << ", \"pass\": " << (res.pass ? "true" : "false");
      std::cout << "}\n";
      return res.pass ? 0 : 2;
    } else if (hist->parsed()) {
      const auto samples = todalab::read_csv_column(hist_file, hist_col);
      const auto h = todalab::histogram(samples, hist_bins);
      std::vector<std::string> manifest{"# todalab histogram of " + hist_col + " from " + hist_file};
      todalab::write_histogram_csv(hist_out, manifest, h);
      std::cout << "hist: " << samples.size() << " samples into " << h.mass.size() << " bins, wrote "
                << hist_out << "\n";
    } else if (prop->parsed()) {
      finalize(cfg, ensemble_name, "prop-error");
      auto res = todalab::run_prop_error(cfg);
      std::cout << "prop-error quantiles (0.5/0.9/0.95/0.99)\n  eps^-1 |lambda_N - X11(T1)|:";
      for (double q : res.err_quantiles) std::cout << ' ' << q;
      std::cout << "\n  N^(2/3+0.1) |lambda_{N-1} - X11(T1)|:";
      for (double q : res.divergence_quantiles) std::cout << ' ' << q;
      std::cout << "\n  fraction with eps^-1 err <= 0.1: " << res.frac_err_below_tenth << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
