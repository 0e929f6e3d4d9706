#include "todalab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace todalab {

namespace {

template <typename T>
double offdiag_frob(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += abs2(a(i, j));
  return std::sqrt(2.0 * s);
}

template <typename T>
double real_part(T x) {
  if constexpr (std::is_same_v<T, cplx>) {
    return x.real();
  } else {
    return x;
  }
}

// One cyclic-Jacobi run. Rotations are chosen to annihilate the (p,q) entry;
// the complex case absorbs the pivot phase into the rotation so the same
// real-coefficient update applies to both scalar kinds.
// FullVectors=false tracks only row 0 of the accumulated U.
template <typename T, bool FullVectors>
void jacobi_core(Matrix<T>& a, Matrix<T>* vecs, std::vector<T>* row0) {
  const std::size_t n = a.rows();
  const double norm_h = frobenius(a);
  const double tol_off = static_cast<double>(n) * static_cast<double>(n) * 1e-14 * norm_h;
  const double skip = tol_off / (static_cast<double>(n) * static_cast<double>(n) + 1.0) * 1e-2;
  constexpr int kMaxSweeps = 60;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_frob(a) <= tol_off) return;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        const double mag = std::sqrt(abs2(apq));
        if (mag <= skip) continue;

        const double app = real_part(a(p, p));
        const double aqq = real_part(a(q, q));
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const T w = apq / static_cast<T>(mag);  // pivot phase, +-1 in the real case
        const T sw = static_cast<T>(s) * w;
        const T cw = static_cast<T>(c) * w;
        const T swc = conj_of(sw);
        const T cwc = conj_of(cw);

        T* rp = a.row_ptr(p);
        T* rq = a.row_ptr(q);
        for (std::size_t j = 0; j < n; ++j) {
          const T x = rp[j], y = rq[j];
          rp[j] = static_cast<T>(c) * x - sw * y;
          rq[j] = static_cast<T>(s) * x + cw * y;
        }
        T* base = a.data();
        for (std::size_t i = 0; i < n; ++i) {
          const T x = base[i * n + p], y = base[i * n + q];
          base[i * n + p] = static_cast<T>(c) * x - swc * y;
          base[i * n + q] = static_cast<T>(s) * x + cwc * y;
        }
        a(p, q) = T{};
        a(q, p) = T{};
        a(p, p) = static_cast<T>(real_part(a(p, p)));
        a(q, q) = static_cast<T>(real_part(a(q, q)));

        if constexpr (FullVectors) {
          T* v = vecs->data();
          for (std::size_t i = 0; i < n; ++i) {
            const T x = v[i * n + p], y = v[i * n + q];
            v[i * n + p] = static_cast<T>(c) * x - swc * y;
            v[i * n + q] = static_cast<T>(s) * x + cwc * y;
          }
        } else {
          const T x = (*row0)[p], y = (*row0)[q];
          (*row0)[p] = static_cast<T>(c) * x - swc * y;
          (*row0)[q] = static_cast<T>(s) * x + cwc * y;
        }
      }
    }
  }
  if (offdiag_frob(a) > tol_off) throw std::runtime_error("eigh: Jacobi iteration did not converge");
}

std::vector<std::size_t> ascending_stable_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  return idx;
}

}  // namespace

template <typename T>
EigenSystem<T> eigh(const Hermitian<T>& h) {
  const std::size_t n = h.size();
  Matrix<T> a = h.matrix();
  Matrix<T> v = Matrix<T>::identity(n);
  jacobi_core<T, true>(a, &v, nullptr);

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = real_part(a(i, i));
  auto order = ascending_stable_order(diag);

  EigenSystem<T> es;
  es.lambdas.resize(n);
  es.vectors = Matrix<T>(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    es.lambdas[j] = diag[order[j]];
    for (std::size_t i = 0; i < n; ++i) es.vectors(i, j) = v(i, order[j]);
  }
  return es;
}

template <typename T>
std::pair<std::vector<double>, std::vector<double>> eigh_first_row(const Hermitian<T>& h) {
  const std::size_t n = h.size();
  Matrix<T> a = h.matrix();
  std::vector<T> row0(n, T{});
  row0[0] = T{1};
  jacobi_core<T, false>(a, nullptr, &row0);

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = real_part(a(i, i));
  auto order = ascending_stable_order(diag);

  std::vector<double> lambdas(n), moduli(n);
  for (std::size_t j = 0; j < n; ++j) {
    lambdas[j] = diag[order[j]];
    moduli[j] = std::sqrt(abs2(row0[order[j]]));
  }
  return {std::move(lambdas), std::move(moduli)};
}

namespace {

// Underflow-safe Euclidean norm of a strided column segment.
template <typename T>
double scaled_col_norm(const Matrix<T>& a, std::size_t col, std::size_t from) {
  double amax = 0.0;
  for (std::size_t i = from; i < a.rows(); ++i) amax = std::max(amax, std::sqrt(abs2(a(i, col))));
  if (amax == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = from; i < a.rows(); ++i) {
    double r = std::sqrt(abs2(a(i, col))) / amax;
    s += r * r;
  }
  return amax * std::sqrt(s);
}

}  // namespace

template <typename T>
std::pair<Matrix<T>, Matrix<T>> qr_pos(const Matrix<T>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("qr_pos: matrix not square");
  const std::size_t n = m.rows();
  Matrix<T> r = m;
  std::vector<std::vector<T>> reflectors;
  reflectors.reserve(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double normx = scaled_col_norm(r, k, k);
    if (!(normx > 1e-300)) {
      throw std::runtime_error("qr_pos: column " + std::to_string(k + 1) +
                               " numerically singular during elimination");
    }
    const T x0 = r(k, k);
    const double x0mag = std::sqrt(abs2(x0));
    const T phase = x0mag > 0.0 ? x0 / static_cast<T>(x0mag) : T{1};

    std::vector<T> v(n - k);
    for (std::size_t i = k; i < n; ++i) v[i - k] = r(i, k);
    v[0] += phase * static_cast<T>(normx);
    double vnorm2 = 0.0;
    for (const T& vi : v) vnorm2 += abs2(vi);
    if (vnorm2 == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    const double beta = 2.0 / vnorm2;
    for (std::size_t j = k; j < n; ++j) {
      T dot{};
      for (std::size_t i = k; i < n; ++i) dot += conj_of(v[i - k]) * r(i, j);
      dot *= static_cast<T>(beta);
      for (std::size_t i = k; i < n; ++i) r(i, j) -= dot * v[i - k];
    }
    reflectors.push_back(std::move(v));
  }

  // Q = H_1 H_2 ... H_{n-1} applied to the identity, last reflector first.
  Matrix<T> q = Matrix<T>::identity(n);
  for (std::size_t kk = reflectors.size(); kk-- > 0;) {
    const auto& v = reflectors[kk];
    if (v.empty()) continue;
    double vnorm2 = 0.0;
    for (const T& vi : v) vnorm2 += abs2(vi);
    const double beta = 2.0 / vnorm2;
    for (std::size_t j = 0; j < n; ++j) {
      T dot{};
      for (std::size_t i = kk; i < n; ++i) dot += conj_of(v[i - kk]) * q(i, j);
      dot *= static_cast<T>(beta);
      for (std::size_t i = kk; i < n; ++i) q(i, j) -= dot * v[i - kk];
    }
  }

  // Normalize so R has a positive real diagonal.
  for (std::size_t i = 0; i < n; ++i) {
    const T d = r(i, i);
    const double dmag = std::sqrt(abs2(d));
    if (!(dmag > 0.0)) {
      throw std::runtime_error("qr_pos: column " + std::to_string(i + 1) + " produced a zero pivot");
    }
    const T ph = d / static_cast<T>(dmag);
    const T phc = conj_of(ph);
    for (std::size_t j = i; j < n; ++j) r(i, j) *= phc;
    r(i, i) = static_cast<T>(real_part(r(i, i)));
    for (std::size_t k2 = 0; k2 < n; ++k2) q(k2, i) *= ph;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) r(i, j) = T{};

  return {std::move(q), std::move(r)};
}

namespace {

// Number of eigenvalues of the tridiagonal below x (Sturm pivot count; exact
// zero pivots are nudged negative, so boundary hits count as below).
int sturm_count(const SymTridiagonal& t, double x) {
  const std::size_t n = t.size();
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b2 = i > 0 ? t.offdiag[i - 1] * t.offdiag[i - 1] : 0.0;
    d = (t.diag[i] - x) - b2 / d;
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

double bisect_index(const SymTridiagonal& t, int m, double lo, double hi, double tol) {
  // Invariant: count(lo) < m <= count(hi).
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) >= m) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> top_eigs_tridiag(const SymTridiagonal& t, std::size_t k) {
  const std::size_t n = t.size();
  if (t.offdiag.size() + 1 != n || n == 0) throw std::invalid_argument("top_eigs_tridiag: bad shape");
  if (k < 1 || k > n) throw std::invalid_argument("top_eigs_tridiag: k out of range");

  double lo = t.diag[0], hi = t.diag[0], dmax = std::abs(t.diag[0]), omax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(t.offdiag[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.offdiag[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
    dmax = std::max(dmax, std::abs(t.diag[i]));
    if (i + 1 < n) omax = std::max(omax, std::abs(t.offdiag[i]));
  }
  const double tol = 0.5e-12 * (dmax + 2.0 * omax) + 1e-300;
  // count(x) is strict-below, so pad the bracket until count(hi) = n holds.
  const double pad = 4.0 * tol + 4e-16 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  lo -= pad;
  hi += pad;

  std::vector<double> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const int m = static_cast<int>(n - j);  // m-th smallest == (j+1)-th largest
    out.push_back(bisect_index(t, m, lo, hi, tol));
  }
  return out;
}

std::vector<double> eigs_tridiag_all(const SymTridiagonal& t) {
  auto desc = top_eigs_tridiag(t, t.size());
  std::reverse(desc.begin(), desc.end());
  return desc;
}

template <typename T>
Matrix<T> spectral_exp(const EigenSystem<T>& es, double t, double shift) {
  if (t < 0.0) throw std::invalid_argument("spectral_exp: t must be nonnegative");
  const std::size_t n = es.lambdas.size();
  double emax = 0.0;
  for (double lam : es.lambdas) emax = std::max(emax, t * (lam - shift));
  if (emax > 709.0) {
    throw std::runtime_error("spectral_exp: exponent overflow; use shift = lambda_max");
  }
  Matrix<T> b = es.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double f = std::exp(t * (es.lambdas[j] - shift));
    for (std::size_t i = 0; i < n; ++i) b(i, j) *= static_cast<T>(f);
  }
  return matmul(b, es.vectors.conj_transpose());
}

template EigenSystem<double> eigh(const Hermitian<double>&);
template EigenSystem<cplx> eigh(const Hermitian<cplx>&);
template std::pair<std::vector<double>, std::vector<double>> eigh_first_row(const Hermitian<double>&);
template std::pair<std::vector<double>, std::vector<double>> eigh_first_row(const Hermitian<cplx>&);
template std::pair<Matrix<double>, Matrix<double>> qr_pos(const Matrix<double>&);
template std::pair<Matrix<cplx>, Matrix<cplx>> qr_pos(const Matrix<cplx>&);
template Matrix<double> spectral_exp(const EigenSystem<double>&, double, double);
template Matrix<cplx> spectral_exp(const EigenSystem<cplx>&, double, double);

}  // namespace todalab
