#include "todalab/ensembles.hpp"

#include <cmath>
#include <stdexcept>

namespace todalab {

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::goe: return "GOE";
    case EnsembleKind::gue: return "GUE";
    case EnsembleKind::boe: return "BOE";
    case EnsembleKind::bue: return "BUE";
    case EnsembleKind::factorized: return "FactorizedGaussianBeta";
    case EnsembleKind::fixed2x2: return "Fixed2x2";
    case EnsembleKind::diagonal: return "Diagonal";
  }
  return "?";
}

EnsembleKind ensemble_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "goe") return EnsembleKind::goe;
  if (s == "gue") return EnsembleKind::gue;
  if (s == "boe") return EnsembleKind::boe;
  if (s == "bue") return EnsembleKind::bue;
  if (s == "factorized" || s == "factorizedgaussianbeta") return EnsembleKind::factorized;
  if (s == "fixed2x2") return EnsembleKind::fixed2x2;
  if (s == "diagonal") return EnsembleKind::diagonal;
  throw std::invalid_argument("unknown ensemble: " + name);
}

void EnsembleSpec::validate() const {
  if (n < 2) throw std::invalid_argument("EnsembleSpec: n >= 2 required");
  if (!(half_width > 0.0)) throw std::invalid_argument("EnsembleSpec: half_width > 0 required");
  switch (kind) {
    case EnsembleKind::goe:
    case EnsembleKind::boe:
      if (beta != 1.0) throw std::invalid_argument("EnsembleSpec: " + to_string(kind) + " needs beta = 1");
      break;
    case EnsembleKind::gue:
    case EnsembleKind::bue:
      if (beta != 2.0) throw std::invalid_argument("EnsembleSpec: " + to_string(kind) + " needs beta = 2");
      break;
    case EnsembleKind::factorized:
      if (!(beta >= 1.0)) throw std::invalid_argument("EnsembleSpec: factorized needs beta >= 1");
      break;
    default:
      break;
  }
  if (bernoulli_summands < 1) throw std::invalid_argument("EnsembleSpec: bernoulli_summands >= 1");
}

double EnsembleSpec::entry_variance() const {
  const double r = half_width / (2.0 * std::sqrt(2.0));
  return r * r * 2.0 / static_cast<double>(n);
}

namespace {

// Centered sum of m Rademacher variables, standardized to unit variance.
double rademacher_sum(RandomStream& stream, int m) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += stream.rademacher();
  return s / std::sqrt(static_cast<double>(m));
}

}  // namespace

Hermitian<double> sample_goe(const EnsembleSpec& spec, RandomStream& stream) {
  spec.validate();
  const std::size_t n = spec.n;
  const double sd_off = std::sqrt(spec.entry_variance());
  const double sd_diag = sd_off * std::sqrt(2.0);
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = sd_diag * stream.gauss();
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = sd_off * stream.gauss();
      m(j, i) = m(i, j);
    }
  }
  return Hermitian<double>(std::move(m));
}

Hermitian<double> sample_boe(const EnsembleSpec& spec, RandomStream& stream) {
  spec.validate();
  const std::size_t n = spec.n;
  const double sd = std::sqrt(spec.entry_variance());
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = sd * rademacher_sum(stream, spec.bernoulli_summands);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = sd * rademacher_sum(stream, spec.bernoulli_summands);
      m(j, i) = m(i, j);
    }
  }
  return Hermitian<double>(std::move(m));
}

Hermitian<cplx> sample_gue(const EnsembleSpec& spec, RandomStream& stream) {
  spec.validate();
  const std::size_t n = spec.n;
  const double sd_part = std::sqrt(spec.entry_variance() / 2.0);
  const double sd_diag = std::sqrt(spec.entry_variance());
  Matrix<cplx> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = cplx(sd_diag * stream.gauss(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = cplx(sd_part * stream.gauss(), sd_part * stream.gauss());
      m(j, i) = std::conj(m(i, j));
    }
  }
  return Hermitian<cplx>(std::move(m));
}

Hermitian<cplx> sample_bue(const EnsembleSpec& spec, RandomStream& stream) {
  spec.validate();
  const std::size_t n = spec.n;
  const double sd_part = std::sqrt(spec.entry_variance() / 2.0);
  const double sd_diag = std::sqrt(spec.entry_variance());
  Matrix<cplx> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = cplx(sd_diag * rademacher_sum(stream, spec.bernoulli_summands), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = cplx(sd_part * rademacher_sum(stream, spec.bernoulli_summands),
                     sd_part * rademacher_sum(stream, spec.bernoulli_summands));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return Hermitian<cplx>(std::move(m));
}

HermitianAny sample_wigner(const EnsembleSpec& spec, RandomStream& stream) {
  switch (spec.kind) {
    case EnsembleKind::goe: return sample_goe(spec, stream);
    case EnsembleKind::boe: return sample_boe(spec, stream);
    case EnsembleKind::gue: return sample_gue(spec, stream);
    case EnsembleKind::bue: return sample_bue(spec, stream);
    case EnsembleKind::fixed2x2: return fixed2x2_matrix();
    case EnsembleKind::diagonal: return diagonal_matrix(spec.n, spec.half_width);
    default: throw std::invalid_argument("sample_wigner: not a matrix ensemble");
  }
}

SymTridiagonal sample_beta_hermite_tridiag(const EnsembleSpec& spec, RandomStream& stream) {
  spec.validate();
  if (spec.kind != EnsembleKind::factorized) {
    throw std::invalid_argument("sample_beta_hermite_tridiag: kind must be factorized");
  }
  if (spec.potential != "quadratic") {
    throw std::invalid_argument("factorized sampler: only the quadratic (Gaussian) potential is supported");
  }
  const std::size_t n = spec.n;
  // Dumitriu-Edelman model scaled by (half_width/2) sqrt(2/(n beta)): diagonal
  // N(0,1), off-diagonal chi_{beta (n-k)}/sqrt(2) = sqrt(Gamma(beta (n-k)/2)).
  const double c = (spec.half_width / 2.0) * std::sqrt(2.0 / (static_cast<double>(n) * spec.beta));
  SymTridiagonal t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = c * stream.gauss();
  for (std::size_t k = 1; k < n; ++k) {
    t.offdiag[k - 1] = c * std::sqrt(stream.gamma(spec.beta * static_cast<double>(n - k) / 2.0));
  }
  return t;
}

SpectralData sample_factorized(const EnsembleSpec& spec, RandomStream& stream) {
  if (!(spec.beta == 1.0 || spec.beta == 2.0)) {
    throw std::invalid_argument("sample_factorized: eigenvector moduli defined for beta in {1,2}");
  }
  const SymTridiagonal t = sample_beta_hermite_tridiag(spec, stream);
  SpectralData sd;
  sd.lambdas = eigs_tridiag_all(t);

  const std::size_t n = spec.n;
  std::vector<double> g2(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double v = stream.gauss();
    g2[j] = v * v;
    if (spec.beta == 2.0) {
      double w = stream.gauss();
      g2[j] += w * w;
    }
    total += g2[j];
  }
  sd.betas.resize(n);
  for (std::size_t j = 0; j < n; ++j) sd.betas[j] = std::sqrt(g2[j] / total);
  return sd;
}

namespace {

template <typename T>
SpectralData spectral_from_matrix_impl(const Hermitian<T>& h) {
  auto [lambdas, moduli] = eigh_first_row(h);
  SpectralData sd{std::move(lambdas), std::move(moduli)};
  validate_spectral(sd);
  return sd;
}

}  // namespace

SpectralData spectral_from_matrix(const Hermitian<double>& h) { return spectral_from_matrix_impl(h); }
SpectralData spectral_from_matrix(const Hermitian<cplx>& h) { return spectral_from_matrix_impl(h); }

VarianceProfile variance_profile(const EnsembleSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const double off = spec.entry_variance();
  double diag = off;
  switch (spec.kind) {
    case EnsembleKind::goe: diag = 2.0 * off; break;
    case EnsembleKind::gue:
    case EnsembleKind::bue:
    case EnsembleKind::boe: diag = off; break;
    default: throw std::invalid_argument("variance_profile: not a wigner ensemble");
  }
  VarianceProfile p{Matrix<double>(n, n, off)};
  for (std::size_t i = 0; i < n; ++i) p.sigma2(i, i) = diag;
  return p;
}

ProfileReport validate_profile(const VarianceProfile& p) {
  const std::size_t n = p.sigma2.rows();
  ProfileReport r;
  if (n == 0 || p.sigma2.cols() != n) {
    r.detail = "empty or non-square profile";
    return r;
  }
  double mn = p.sigma2(0, 0), mx = p.sigma2(0, 0);
  bool symmetric = true, sums_ok = true;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = p.sigma2(i, j);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      col += v;
      if (std::abs(v - p.sigma2(j, i)) > 0.0) symmetric = false;
    }
    if (std::abs(col - 1.0) > 1e-12) sums_ok = false;
  }
  r.c1 = static_cast<double>(n) * mn;
  r.c2 = static_cast<double>(n) * mx;
  r.ok = symmetric && sums_ok && mn > 0.0;
  if (!symmetric) r.detail = "profile not symmetric";
  else if (!sums_ok) r.detail = "column sums differ from 1";
  else if (!(mn > 0.0)) r.detail = "zero entry variance violates the lower bound";
  return r;
}

Hermitian<double> fixed2x2_matrix() {
  Matrix<double> m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return Hermitian<double>(std::move(m));
}

Hermitian<double> diagonal_matrix(std::size_t n, double half_width) {
  // Descending diagonal: the (1,1) entry already holds the top eigenvalue,
  // matching the flow's fixed point diag(lambda_N, ..., lambda_1).
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = n == 1 ? 0.0 : half_width - 2.0 * half_width * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return Hermitian<double>(std::move(m));
}

}  // namespace todalab
