#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "todalab/linalg.hpp"
#include "todalab/matrix.hpp"
#include "todalab/rng.hpp"
#include "todalab/spectral.hpp"

namespace todalab {

enum class EnsembleKind {
  goe,
  gue,
  boe,
  bue,
  factorized,  // beta-Hermite eigenvalues + Haar first-row moduli
  fixed2x2,    // test hook: the matrix [[0,1],[1,0]]
  diagonal,    // test hook: fixed diagonal matrix, equally spaced spectrum
};

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_from_string(const std::string& name);

// Which random matrix distribution to draw. half_width r targets limiting
// support [-r, r]; the default 2*sqrt(2) matches edge constant c_V = 2^{-3/2}.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gue;
  std::size_t n = 2;
  double beta = 2.0;  // symmetry class; factorized admits any beta >= 1
  double half_width = 2.0 * 1.4142135623730951;
  int bernoulli_summands = 1;  // m in the BUE/BOE binomial construction
  std::string potential = "quadratic";
  std::uint64_t seed = 1;

  void validate() const;
  bool complex_kind() const { return kind == EnsembleKind::gue || kind == EnsembleKind::bue; }
  // Off-diagonal entry variance (half_width/(2 sqrt 2))^2 * 2/n.
  double entry_variance() const;
};

using HermitianAny = std::variant<Hermitian<double>, Hermitian<cplx>>;

// Wigner samplers. Upper triangle drawn independently and mirrored, so the
// output is exactly Hermitian. GOE doubles the diagonal variance; GUE/BUE
// split the off-diagonal variance evenly between real and imaginary parts;
// BOE/BUE use centered sums of bernoulli_summands Rademacher variables scaled
// to the target variance.
Hermitian<double> sample_goe(const EnsembleSpec& spec, RandomStream& stream);
Hermitian<double> sample_boe(const EnsembleSpec& spec, RandomStream& stream);
Hermitian<cplx> sample_gue(const EnsembleSpec& spec, RandomStream& stream);
Hermitian<cplx> sample_bue(const EnsembleSpec& spec, RandomStream& stream);
HermitianAny sample_wigner(const EnsembleSpec& spec, RandomStream& stream);

// beta-Hermite tridiagonal model for the factorized eigenvalue density
// prod e^{-N beta lambda^2/4 * (2/half_width)^2 ...} prod |lambda_i-lambda_j|^beta,
// rescaled so the limiting support is [-half_width, half_width].
SymTridiagonal sample_beta_hermite_tridiag(const EnsembleSpec& spec, RandomStream& stream);

// Full factorized draw: all eigenvalues plus first-row moduli |g_j|/||g|| for
// g iid real (beta=1) or complex (beta=2) standard normal.
SpectralData sample_factorized(const EnsembleSpec& spec, RandomStream& stream);

// lambdas and betas of a Hermitian matrix (Jacobi first-row fast path).
SpectralData spectral_from_matrix(const Hermitian<double>& h);
SpectralData spectral_from_matrix(const Hermitian<cplx>& h);

// Per-entry variances E|H_ij|^2 of the wigner samplers.
struct VarianceProfile {
  Matrix<double> sigma2;
};

VarianceProfile variance_profile(const EnsembleSpec& spec);

struct ProfileReport {
  bool ok = false;
  double c1 = 0.0;  // N * min sigma^2
  double c2 = 0.0;  // N * max sigma^2
  std::string detail;
};

// Checks symmetry, unit column sums (tolerance 1e-12) and a positive lower
// bound; reports the tightest constants C1, C2.
ProfileReport validate_profile(const VarianceProfile& p);

// Test-hook inputs.
Hermitian<double> fixed2x2_matrix();
Hermitian<double> diagonal_matrix(std::size_t n, double half_width);

}  // namespace todalab
