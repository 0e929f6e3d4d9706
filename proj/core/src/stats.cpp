#include "todalab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace todalab {

double EquilibriumMeasure::density(double x) const {
  const double r = b;
  if (x <= a || x >= r) return 0.0;
  return 2.0 / (M_PI * r * r) * std::sqrt(r * r - x * x);
}

double EquilibriumMeasure::cdf(double x) const {
  const double r = b;
  if (x <= a) return 0.0;
  if (x >= r) return 1.0;
  return 0.5 + (x * std::sqrt(r * r - x * x) / (r * r) + std::asin(x / r)) / M_PI;
}

EquilibriumMeasure semicircle(double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("semicircle: half_width must be positive");
  EquilibriumMeasure m;
  m.a = -half_width;
  m.b = half_width;
  m.c_v = std::pow(2.0, 0.75) / std::pow(half_width, 1.5);
  return m;
}

double quantile_gamma(const EquilibriumMeasure& m, std::size_t n, std::size_t big_n) {
  if (n < 1 || n > big_n) throw std::invalid_argument("quantile_gamma: need 1 <= n <= N");
  if (n == big_n) return m.b;
  const double target = static_cast<double>(n) / static_cast<double>(big_n);
  double lo = m.a, hi = m.b;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (m.cdf(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool check_gap_condition(const SpectralData& sd, double p) {
  if (!(p > 0.0 && p < 1.0 / 3.0)) throw std::invalid_argument("check_gap_condition: need 0 < p < 1/3");
  const std::size_t n = sd.size();
  if (n < 3) throw std::invalid_argument("check_gap_condition: need N >= 3");
  return sd.lambdas[n - 2] - sd.lambdas[n - 3] >= p * (sd.lambdas[n - 1] - sd.lambdas[n - 2]);
}

RigidityReport check_rigidity(const SpectralData& sd, double s, const EquilibriumMeasure& m) {
  if (!(s > 0.0)) throw std::invalid_argument("check_rigidity: need s > 0");
  const std::size_t n = sd.size();
  if (n < 3) throw std::invalid_argument("check_rigidity: need N >= 3");
  const double dn = static_cast<double>(n);

  const double upper = std::pow(dn, -0.5 + s / 2.0);
  for (double b : sd.betas) {
    if (b > upper) return {false, 1};
  }
  const double lower = std::pow(dn, -0.5 - s / 2.0);
  if (sd.betas[n - 1] < lower || sd.betas[n - 2] < lower) return {false, 2};

  const double gap_lo = std::pow(dn, -2.0 / 3.0 - s);
  const double gap_hi = std::pow(dn, -2.0 / 3.0 + s);
  const double g1 = sd.lambdas[n - 1] - sd.lambdas[n - 2];
  const double g2 = sd.lambdas[n - 1] - sd.lambdas[n - 3];
  if (g1 < gap_lo || g1 > gap_hi || g2 < gap_lo || g2 > gap_hi) return {false, 3};

  for (std::size_t j = 1; j <= n; ++j) {
    const double gamma = quantile_gamma(m, j, n);
    const double cap = gap_hi * std::pow(std::min<double>(static_cast<double>(j), dn - static_cast<double>(j) + 1.0),
                                         -1.0 / 3.0);
    if (std::abs(sd.lambdas[j - 1] - gamma) > cap) return {false, 4};
  }
  return {true, 0};
}

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw std::invalid_argument("Ecdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_distance(const Ecdf& a, const Ecdf& b) {
  double sup = 0.0;
  for (double t : a.sorted()) sup = std::max(sup, std::abs(a(t) - b(t)));
  for (double t : b.sorted()) sup = std::max(sup, std::abs(a(t) - b(t)));
  return sup;
}

Histogram histogram(const std::vector<double>& samples, std::size_t bins) {
  if (samples.empty()) throw std::invalid_argument("histogram: empty sample");
  std::vector<double> v = samples;
  std::sort(v.begin(), v.end());
  const double lo = v.front(), hi = v.back();
  const std::size_t n = v.size();

  if (bins == 0) {
    const double q1 = v[static_cast<std::size_t>(0.25 * static_cast<double>(n - 1))];
    const double q3 = v[static_cast<std::size_t>(0.75 * static_cast<double>(n - 1))];
    const double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(n));
    if (width > 0.0 && hi > lo) {
      bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    } else {
      bins = 1;
    }
    bins = std::clamp<std::size_t>(bins, 1, 10000);
  }

  Histogram h;
  const double span = hi > lo ? hi - lo : 1.0;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = lo + span * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.mass.assign(bins, 0.0);
  for (double x : v) {
    std::size_t idx = static_cast<std::size_t>((x - lo) / span * static_cast<double>(bins));
    if (idx >= bins) idx = bins - 1;
    h.mass[idx] += 1.0 / static_cast<double>(n);
  }
  h.density.resize(bins);
  const double bw = span / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) h.density[i] = h.mass[i] / bw;
  return h;
}

SummaryStats summarize(const std::vector<double>& samples) {
  SummaryStats s;
  s.count = samples.size();
  if (s.count == 0) throw std::invalid_argument("summarize: empty sample");
  for (double x : samples) s.mean += x;
  s.mean /= static_cast<double>(s.count);
  if (s.count >= 2) {
    double acc = 0.0;
    for (double x : samples) acc += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(acc / static_cast<double>(s.count - 1));
  }
  s.ratio = s.std_dev > 0.0 ? s.mean / s.std_dev : 0.0;
  return s;
}

std::vector<double> normalized(const std::vector<double>& samples) {
  const SummaryStats s = summarize(samples);
  if (!(s.std_dev > 0.0)) throw std::invalid_argument("normalized: zero variance");
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = (samples[i] - s.mean) / s.std_dev;
  return out;
}

}  // namespace todalab
