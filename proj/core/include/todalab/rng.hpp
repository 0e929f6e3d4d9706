#pragma once

#include <cmath>
#include <cstdint>

namespace todalab {

// Counter-based stream: every output is a hash of (seed, trial, counter), so
// trials own disjoint reproducible streams no matter how they are scheduled.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t trial = 0)
      : key_(mix(mix(seed) ^ mix(trial + 0x632be59bd9b4e019ull))) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  // Uniform on (0,1), never returning an exact endpoint.
  double uniform() {
    for (;;) {
      double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  // Standard normal via the polar method; second deviate is cached.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    for (;;) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
      }
    }
  }

  // Gamma(shape, scale 1) by Marsaglia-Tsang, with the usual boost for shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = gauss();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // chi distribution with dof degrees of freedom: chi_k = sqrt(2 Gamma(k/2)).
  double chi(double dof) { return std::sqrt(2.0 * gamma(0.5 * dof)); }

  double cauchy() { return std::tan(M_PI * (uniform() - 0.5)); }

  double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace todalab
