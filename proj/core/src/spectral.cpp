#include "todalab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace todalab {

namespace {

constexpr double kBetaFloor = 1e-150;
// exp arguments below this are clamped to zero weight (e^-691 ~ 1e-300).
constexpr double kExpFloor = -691.0;

struct Weights {
  // w_j = beta_j^2 e^{2 lambda_j t - M}, M the largest exponent attained.
  std::vector<double> w;
  double total;
};

Weights spectral_weights(const SpectralData& sd, double t) {
  const std::size_t n = sd.size();
  std::vector<double> a(n, -INFINITY);
  double m = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    if (sd.betas[j] > 0.0) {
      a[j] = 2.0 * sd.lambdas[j] * t + 2.0 * std::log(sd.betas[j]);
      m = std::max(m, a[j]);
    }
  }
  if (!(m > -INFINITY)) throw std::invalid_argument("spectral weights: all betas vanish");
  Weights out;
  out.w.assign(n, 0.0);
  out.total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double e = a[j] - m;
    if (e >= kExpFloor) {
      out.w[j] = std::exp(e);
      out.total += out.w[j];
    }
  }
  return out;
}

}  // namespace

void validate_spectral(const SpectralData& sd) {
  const std::size_t n = sd.size();
  if (n == 0 || sd.betas.size() != n) throw std::invalid_argument("SpectralData: shape mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0 && sd.lambdas[j] < sd.lambdas[j - 1])
      throw std::invalid_argument("SpectralData: lambdas not nondecreasing");
    if (sd.betas[j] < 0.0 || sd.betas[j] > 1.0)
      throw std::invalid_argument("SpectralData: beta outside [0,1]");
    sum += sd.betas[j] * sd.betas[j];
  }
  if (std::abs(sum - 1.0) > static_cast<double>(n) * 1e-10)
    throw std::invalid_argument("SpectralData: sum beta^2 != 1");
}

std::optional<GapQuantities> gap_quantities(const SpectralData& sd) {
  const std::size_t n = sd.size();
  if (n < 2 || degenerate_top(sd)) return std::nullopt;
  GapQuantities g;
  g.delta.resize(n - 1);
  g.nu.resize(n - 1);
  const double lam_top = sd.lambdas.back();
  const double b2_top = sd.betas.back() * sd.betas.back();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    g.delta[j] = 2.0 * (lam_top - sd.lambdas[j]);
    g.nu[j] = sd.betas[j] * sd.betas[j] / b2_top;
  }
  return g;
}

double energy(const SpectralData& sd, double t) {
  const auto ws = spectral_weights(sd, t);
  const std::size_t n = sd.size();
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) mean += sd.lambdas[j] * ws.w[j];
  mean /= ws.total;
  double var = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = sd.lambdas[j] - mean;
    var += d * d * ws.w[j];
  }
  return var / ws.total;
}

std::pair<double, double> energy_parts(const SpectralData& sd, double t) {
  auto gq = gap_quantities(sd);
  if (!gq) throw std::invalid_argument("energy_parts: beta_N degenerate, use energy()");
  const std::size_t m = gq->delta.size();

  double s = 0.0, e0_num = 0.0;
  std::vector<double> w(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double e = -gq->delta[j] * t;
    if (e >= kExpFloor) {
      w[j] = gq->nu[j] * std::exp(e);
      s += w[j];
      e0_num += gq->delta[j] * gq->delta[j] * w[j];
    }
  }
  const double denom = (1.0 + s) * (1.0 + s);
  const double e0 = 0.25 * e0_num / denom;

  double e1 = 0.0;
  if (s > 0.0 && m >= 2) {
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += sd.lambdas[j] * w[j];
    mean /= s;
    double var = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = sd.lambdas[j] - mean;
      var += d * d * w[j];
    }
    var /= s;
    const double frac = s / (1.0 + s);
    e1 = frac * frac * var;
  }
  return {e0, e1};
}

double x11(const SpectralData& sd, double t) {
  const auto ws = spectral_weights(sd, t);
  double mean = 0.0;
  for (std::size_t j = 0; j < sd.size(); ++j) mean += sd.lambdas[j] * ws.w[j];
  return mean / ws.total;
}

double err_top(const SpectralData& sd, double t) {
  const auto ws = spectral_weights(sd, t);
  const double lam_top = sd.lambdas.back();
  double acc = 0.0;
  for (std::size_t j = 0; j < sd.size(); ++j) acc += (lam_top - sd.lambdas[j]) * ws.w[j];
  return acc / ws.total;
}

namespace {

// Smallest positive decay rate available for scanning: the top gap when it is
// open, otherwise the gap from lambda_N down to the next distinct level.
double scan_rate(const SpectralData& sd) {
  const std::size_t n = sd.size();
  const double lam_top = sd.lambdas.back();
  for (std::size_t j = n - 1; j-- > 0;) {
    const double d = 2.0 * (lam_top - sd.lambdas[j]);
    if (d > 0.0) return d;
  }
  return 0.0;
}

template <typename F>
double first_crossing(F below, double eps_desc, double rate, double log_inv_eps) {
  if (below(0.0)) return 0.0;
  if (!(rate > 0.0)) {
    throw std::runtime_error("first_crossing: flat spectrum never reaches " + std::to_string(eps_desc));
  }
  const double h = 1.0 / rate;
  const double cap = 1e4 * log_inv_eps / rate;
  double lo = 0.0, hi = h;
  while (!below(hi)) {
    lo = hi;
    hi += h;
    if (hi > cap) {
      throw std::runtime_error("first_crossing: no crossing below the cap (degenerate spectrum)");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (below(mid)) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double halting_time(const SpectralData& sd, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("halting_time: eps must be positive");
  const double e2 = eps * eps;
  return first_crossing([&](double t) { return energy(sd, t) <= e2; }, e2, scan_rate(sd),
                        std::log(1.0 / eps));
}

std::optional<double> t_star(const SpectralData& sd, double eps, std::size_t n) {
  auto gq = gap_quantities(sd);
  if (!gq || n < 2) return std::nullopt;
  const double delta = gq->delta.back();
  if (!(delta > 0.0)) return std::nullopt;
  const double alpha = 2.0 * std::log(1.0 / eps) / std::log(static_cast<double>(n));
  const double nu = gq->nu.back();
  return (alpha * std::log(static_cast<double>(n)) + 2.0 * std::log(delta) + std::log(nu) -
          2.0 * std::log(2.0)) /
         delta;
}

std::optional<double> t_hat(const SpectralData& sd, double eps, std::size_t n) {
  if (sd.size() < 2 || n < 2) return std::nullopt;
  const double delta = 2.0 * (sd.lambdas.back() - sd.lambdas[sd.size() - 2]);
  if (!(delta > 0.0)) return std::nullopt;
  const double alpha = 2.0 * std::log(1.0 / eps) / std::log(static_cast<double>(n));
  return (alpha - 4.0 / 3.0) * std::log(static_cast<double>(n)) / delta;
}

double rescale_tilde(double t1, std::size_t n, double eps, double gamma, double c_v) {
  const double bracket = std::log(1.0 / eps) - (2.0 / 3.0) * std::log(static_cast<double>(n)) + gamma;
  if (!(bracket > 0.0)) {
    throw std::invalid_argument("rescale_tilde: log(1/eps) - (2/3) log n + gamma must be positive");
  }
  const double denom = std::pow(c_v, 2.0 / 3.0) * std::pow(2.0, -2.0 / 3.0) *
                       std::pow(static_cast<double>(n), 2.0 / 3.0) * bracket;
  return t1 / denom;
}

bool scaling_region(double eps, std::size_t n, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("scaling_region: need 0 < sigma < 1");
  return std::log(1.0 / eps) / std::log(static_cast<double>(n)) >= 5.0 / 3.0 + sigma / 2.0;
}

double gap_statistic(double top_gap, std::size_t n, double c_v) {
  return 1.0 / (std::pow(c_v, 2.0 / 3.0) * std::pow(2.0, -2.0 / 3.0) *
                std::pow(static_cast<double>(n), 2.0 / 3.0) * top_gap);
}

std::optional<double> gap_statistic(const SpectralData& sd, std::size_t n, double c_v) {
  if (sd.size() < 2) return std::nullopt;
  const double gap = sd.lambdas.back() - sd.lambdas[sd.size() - 2];
  if (!(gap > 0.0)) return std::nullopt;
  return gap_statistic(gap, n, c_v);
}

double xi_statistic(double top_gap, std::size_t n, double c_v) {
  return 1.0 / (std::pow(c_v, 2.0 / 3.0) * std::pow(2.0, -5.0 / 3.0) *
                std::pow(static_cast<double>(n), 2.0 / 3.0) * top_gap);
}

double ode_halting(const SpectralData& sd, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("ode_halting: eps must be positive");
  const double lam_top = sd.lambdas.back();
  // log S(t), S(t) = sum beta_j^2 e^{-delta_j t}, via log-sum-exp.
  auto log_s = [&](double t) {
    double m = -INFINITY;
    const std::size_t n = sd.size();
    std::vector<double> a(n, -INFINITY);
    for (std::size_t j = 0; j < n; ++j) {
      if (sd.betas[j] > 0.0) {
        a[j] = -2.0 * (lam_top - sd.lambdas[j]) * t + 2.0 * std::log(sd.betas[j]);
        m = std::max(m, a[j]);
      }
    }
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = a[j] - m;
      if (e >= kExpFloor) s += std::exp(e);
    }
    return m + std::log(s);
  };
  auto deviation = [&](double t) { return 0.5 * (log_s(t) - log_s(t + 1.0)); };
  return first_crossing([&](double t) { return deviation(t) <= eps; }, eps, scan_rate(sd),
                        std::log(1.0 / eps));
}

GammaEstimate gamma_constant(double c_v, const std::vector<double>& xi_samples,
                             const std::vector<double>& cauchy_samples) {
  if (xi_samples.empty() || cauchy_samples.empty()) {
    throw std::invalid_argument("gamma_constant: empty sample set");
  }
  const double scale = std::pow(c_v, 2.0 / 3.0) * std::pow(2.0, -5.0 / 3.0);
  double m1 = 0.0, s1 = 0.0;
  for (double xi : xi_samples) m1 += std::log(scale * xi);
  m1 /= static_cast<double>(xi_samples.size());
  for (double xi : xi_samples) {
    const double d = std::log(scale * xi) - m1;
    s1 += d * d;
  }
  s1 /= static_cast<double>(xi_samples.size() - (xi_samples.size() > 1 ? 1 : 0));

  double m2 = 0.0, s2 = 0.0;
  for (double z : cauchy_samples) m2 += std::log(std::abs(z));
  m2 /= static_cast<double>(cauchy_samples.size());
  for (double z : cauchy_samples) {
    const double d = std::log(std::abs(z)) - m2;
    s2 += d * d;
  }
  s2 /= static_cast<double>(cauchy_samples.size() - (cauchy_samples.size() > 1 ? 1 : 0));

  GammaEstimate g;
  g.value = -m1 + 0.5 * m2;
  g.std_error = std::sqrt(s1 / static_cast<double>(xi_samples.size()) +
                          0.25 * s2 / static_cast<double>(cauchy_samples.size()));
  g.n_xi = xi_samples.size();
  g.n_cauchy = cauchy_samples.size();
  return g;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

}  // namespace

std::string HaltingRecord::csv_header() {
  return "trial,kind,n,beta,eps,alpha,t1,t_star,t_hat,t_tilde,gap_stat,err_top,lambda_top,top_gap,"
         "in_scaling_region,degenerate_flag";
}

std::string HaltingRecord::csv_row() const {
  std::string row;
  row += std::to_string(trial);
  row += ',';
  row += kind;
  row += ',';
  row += std::to_string(n);
  row += ',';
  row += fmt_double(beta);
  row += ',';
  row += fmt_double(eps);
  row += ',';
  row += fmt_double(alpha);
  row += ',';
  row += fmt_opt(t1);
  row += ',';
  row += fmt_opt(t_star);
  row += ',';
  row += fmt_opt(t_hat);
  row += ',';
  row += fmt_opt(t_tilde);
  row += ',';
  row += fmt_opt(gap_stat);
  row += ',';
  row += fmt_opt(err_top);
  row += ',';
  row += fmt_double(lambda_top);
  row += ',';
  row += fmt_double(top_gap);
  row += ',';
  row += (in_scaling_region ? "1" : "0");
  row += ',';
  row += (degenerate ? "1" : "0");
  return row;
}

}  // namespace todalab
