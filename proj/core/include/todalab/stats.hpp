#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "todalab/spectral.hpp"

namespace todalab {

// Semicircle equilibrium measure on [-half_width, half_width] with the edge
// expansion rho(x) ~ (2^{3/4} c_V / pi) sqrt(b_V - x), giving
// c_V = 2^{3/4} / half_width^{3/2} (= 2^{-3/2} at half_width 2 sqrt 2).
struct EquilibriumMeasure {
  double a = 0.0;
  double b = 0.0;
  double c_v = 0.0;

  double density(double x) const;
  double cdf(double x) const;
};

EquilibriumMeasure semicircle(double half_width);

// gamma_n: smallest t with n/N = integral of the measure up to t, by monotone
// bisection to 1e-12; gamma_N = b exactly.
double quantile_gamma(const EquilibriumMeasure& m, std::size_t n, std::size_t big_n);

// lambda_{N-1} - lambda_{N-2} >= p (lambda_N - lambda_{N-1}).
bool check_gap_condition(const SpectralData& sd, double p);

struct RigidityReport {
  bool ok = false;
  int failed_clause = 0;  // 1..4, or 0 when ok
};

// The four clauses: delocalization of all betas, lower bounds on the top two
// betas, top-two gaps within [N^{-2/3-s}, N^{-2/3+s}], and rigidity of every
// eigenvalue against the measure's quantiles. Reports the first failure.
RigidityReport check_rigidity(const SpectralData& sd, double s, const EquilibriumMeasure& m);

// Right-continuous empirical distribution function over a sorted copy.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);

  double operator()(double t) const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// sup_t |F_a(t) - F_b(t)|, evaluated at the jump points of both samples.
double ks_distance(const Ecdf& a, const Ecdf& b);

struct Histogram {
  std::vector<double> edges;   // bins + 1 entries
  std::vector<double> mass;    // sums to 1
  std::vector<double> density; // mass / bin width
};

// Equal-width histogram; bins = 0 picks the Freedman-Diaconis count.
Histogram histogram(const std::vector<double>& samples, std::size_t bins = 0);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // unbiased
  double ratio = 0.0;    // mean / std_dev, defined only when std_dev > 0
};

SummaryStats summarize(const std::vector<double>& samples);

// (x - mean)/std; rejects samples with zero variance.
std::vector<double> normalized(const std::vector<double>& samples);

}  // namespace todalab
