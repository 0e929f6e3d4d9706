#pragma once

#include <optional>
#include <string>
#include <vector>

#include "todalab/matrix.hpp"

namespace todalab {

// Eigenvalues (ascending) plus the moduli of the first components of the
// normalized eigenvectors. Everything the halting-time formulas need.
struct SpectralData {
  std::vector<double> lambdas;
  std::vector<double> betas;

  std::size_t size() const { return lambdas.size(); }
};

// Throws unless lambdas are nondecreasing, betas lie in [0,1] and
// |sum beta^2 - 1| <= N * 1e-10.
void validate_spectral(const SpectralData& sd);

// delta_n = 2(lambda_N - lambda_n) and nu_n = beta_n^2 / beta_N^2 for
// n = 1..N-1. Absent when beta_N is below the underflow floor (1e-150).
struct GapQuantities {
  std::vector<double> delta;
  std::vector<double> nu;
};

std::optional<GapQuantities> gap_quantities(const SpectralData& sd);

inline bool degenerate_top(const SpectralData& sd) { return sd.betas.back() <= 1e-150; }

// E(t) = sum_{k>=2} |X_{1k}(t)|^2 evaluated from the spectral solution as the
// weighted variance of lambda under weights beta_j^2 e^{2 lambda_j t}. The
// weights are normalized at the largest exponent with nonzero beta, so the
// value is finite for all t >= 0 even when beta_N underflows.
double energy(const SpectralData& sd, double t);

// The split E = E0 + E1:
//   E0 = (1/4) sum delta_n^2 nu_n e^{-delta_n t} / (1 + S)^2,
//   E1 = (S/(1+S))^2 Var_w(lambda_1..lambda_{N-1}),   S = sum nu_n e^{-delta_n t},
// with the variance accumulated in two passes around the weighted mean.
// Requires gap quantities (throws when beta_N is degenerate).
std::pair<double, double> energy_parts(const SpectralData& sd, double t);

// X_{11}(t) = sum lambda_j |U_{1j}(t)|^2 and the true error lambda_N - X_11(t).
double x11(const SpectralData& sd, double t);
double err_top(const SpectralData& sd, double t);

// T^(1) = inf{t : E(t) <= eps^2}, located by a grid scan of step 1/delta_{N-1}
// followed by bisection. Guaranteed relative time tolerance 1e-9 (the
// implementation bisects to 1e-12). Throws when no crossing occurs below
// 1e4 log(1/eps)/delta_scan.
double halting_time(const SpectralData& sd, double eps);

// T* = (alpha log n + 2 log delta_{N-1} + log nu_{N-1} - 2 log 2)/delta_{N-1},
// alpha = 2 log(1/eps)/log n. Natural logs. Absent for degenerate beta_N or
// zero top gap.
std::optional<double> t_star(const SpectralData& sd, double eps, std::size_t n);

// That = (alpha - 4/3) log n / delta_{N-1}.
std::optional<double> t_hat(const SpectralData& sd, double eps, std::size_t n);

// Ttilde_gamma = t1 / (c_V^{2/3} 2^{-2/3} n^{2/3} (log eps^-1 - (2/3) log n + gamma)).
double rescale_tilde(double t1, std::size_t n, double eps, double gamma, double c_v);

// Scaling region: log(eps^-1)/log n >= 5/3 + sigma/2 (boundary included).
bool scaling_region(double eps, std::size_t n, double sigma);

// 1/(c_V^{2/3} 2^{-2/3} n^{2/3} (lambda_N - lambda_{N-1})); absent on a zero gap.
double gap_statistic(double top_gap, std::size_t n, double c_v);
std::optional<double> gap_statistic(const SpectralData& sd, std::size_t n, double c_v);

// Inverse top gap on the scale consumed by gamma_constant:
// 1/(c_V^{2/3} 2^{-5/3} n^{2/3} (lambda_N - lambda_{N-1})).
double xi_statistic(double top_gap, std::size_t n, double c_v);

// T_ODE for the power-method flow dX/dt = HX, X(0) = e1:
// inf{t : |log(||X(t+1)||/||X(t)||) - lambda_N| <= eps}, evaluated in shifted
// form via log-sum-exp. Same scan-and-bisect scheme as halting_time.
double ode_halting(const SpectralData& sd, double eps);

// Monte Carlo estimate of the recentering constant
//   gamma = -mean(log(c_V^{2/3} 2^{-5/3} xi)) + (1/2) mean(log|zeta|),
// xi drawn from xi_statistic, zeta standard Cauchy. Reports standard error.
struct GammaEstimate {
  double value;
  double std_error;
  std::size_t n_xi;
  std::size_t n_cauchy;
};

GammaEstimate gamma_constant(double c_v, const std::vector<double>& xi_samples,
                             const std::vector<double>& cauchy_samples);

// One Monte Carlo trial's outputs, serializable as a CSV row.
struct HaltingRecord {
  std::size_t trial = 0;
  std::string kind;
  std::size_t n = 0;
  double beta = 0.0;
  double eps = 0.0;
  double alpha = 0.0;  // 2 log(1/eps)/log n
  std::optional<double> t1;
  std::optional<double> t_star;
  std::optional<double> t_hat;
  std::optional<double> t_tilde;
  std::optional<double> gap_stat;
  std::optional<double> err_top;
  double lambda_top = 0.0;
  double top_gap = 0.0;
  bool in_scaling_region = false;
  bool degenerate = false;

  static std::string csv_header();
  std::string csv_row() const;
};

}  // namespace todalab
