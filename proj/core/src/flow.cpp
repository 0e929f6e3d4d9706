#include "todalab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace todalab {

namespace {

// Exponent budget per propagation step: e^{dt (lambda_1 - lambda_N)} stays
// above ~1e-11, far from the roundoff floor of a QR factorization.
constexpr double kStepExponentBudget = 25.0;

template <typename T>
void hermitize(Matrix<T>& x) {
  const std::size_t n = x.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<T, cplx>) {
      x(i, i) = cplx(x(i, i).real(), 0.0);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const T v = static_cast<T>(0.5) * (x(i, j) + conj_of(x(j, i)));
      x(i, j) = v;
      x(j, i) = conj_of(v);
    }
  }
}

}  // namespace

template <typename T>
FlowPropagator<T>::FlowPropagator(const EigenSystem<T>& es, const Hermitian<T>& h)
    : es_(es), h_(h.matrix()), q_(Matrix<T>::identity(h.size())) {
  const double spread = es_.lambdas.back() - es_.lambdas.front();
  dt_max_ = spread > 0.0 ? kStepExponentBudget / spread : INFINITY;
}

template <typename T>
Matrix<T> FlowPropagator<T>::x_at(double t) {
  if (t < 0.0) throw std::invalid_argument("flow: t must be nonnegative");
  if (t < t_ - 1e-15 * std::max(1.0, t_)) {
    throw std::invalid_argument("FlowPropagator: cannot advance backwards; copy the propagator");
  }
  const double shift = es_.lambdas.back();
  while (t_ < t) {
    const double dt = std::min(dt_max_, t - t_);
    // A = e^{dt (H - shift I)} Q = U diag(e^{dt (lambda - shift)}) (U^* Q)
    Matrix<T> w = matmul(es_.vectors.conj_transpose(), q_);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double f = std::exp(dt * (es_.lambdas[i] - shift));
      T* row = w.row_ptr(i);
      for (std::size_t j = 0; j < w.cols(); ++j) row[j] *= static_cast<T>(f);
    }
    Matrix<T> a = matmul(es_.vectors, w);
    auto [q, r] = qr_pos(a);
    q_ = std::move(q);
    t_ = (dt == t - t_) ? t : t_ + dt;
    if (std::abs(t_ - t) < 1e-15 * std::max(1.0, t)) t_ = t;
  }
  Matrix<T> x = matmul(matmul(q_.conj_transpose(), h_), q_);
  hermitize(x);
  return x;
}

template <typename T>
Matrix<T> flow_at(const EigenSystem<T>& es, const Hermitian<T>& h, double t) {
  if (t == 0.0) return h.matrix();
  FlowPropagator<T> prop(es, h);
  return prop.x_at(t);
}

namespace {

template <typename T>
Matrix<T> lax_rhs(const Matrix<T>& x) {
  const std::size_t n = x.rows();
  // B(X) = X_- - (X_-)^*
  Matrix<T> b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      b(i, j) = x(i, j);
      b(j, i) = -conj_of(x(i, j));
    }
  Matrix<T> xb = matmul(x, b);
  Matrix<T> bx = matmul(b, x);
  for (std::size_t i = 0; i < n * n; ++i) xb.data()[i] -= bx.data()[i];
  return xb;
}

}  // namespace

template <typename T>
Matrix<T> rk4_flow(const Hermitian<T>& h, double t, double dt) {
  if (t < 0.0) throw std::invalid_argument("rk4_flow: t must be nonnegative");
  const double hnorm = frobenius(h.matrix());
  if (dt > 0.01 / std::max(hnorm, 1e-300)) {
    throw std::invalid_argument("rk4_flow: dt must be <= 0.01/||H||_F");
  }
  Matrix<T> x = h.matrix();
  if (t == 0.0) return x;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t / dt));
  const double step = t / static_cast<double>(steps);
  const std::size_t total = x.rows() * x.cols();
  for (std::size_t s = 0; s < steps; ++s) {
    Matrix<T> k1 = lax_rhs(x);
    Matrix<T> y = x;
    for (std::size_t i = 0; i < total; ++i) y.data()[i] = x.data()[i] + static_cast<T>(0.5 * step) * k1.data()[i];
    Matrix<T> k2 = lax_rhs(y);
    for (std::size_t i = 0; i < total; ++i) y.data()[i] = x.data()[i] + static_cast<T>(0.5 * step) * k2.data()[i];
    Matrix<T> k3 = lax_rhs(y);
    for (std::size_t i = 0; i < total; ++i) y.data()[i] = x.data()[i] + static_cast<T>(step) * k3.data()[i];
    Matrix<T> k4 = lax_rhs(y);
    for (std::size_t i = 0; i < total; ++i) {
      x.data()[i] += static_cast<T>(step / 6.0) *
                     (k1.data()[i] + static_cast<T>(2.0) * k2.data()[i] + static_cast<T>(2.0) * k3.data()[i] +
                      k4.data()[i]);
    }
    hermitize(x);
  }
  return x;
}

template <typename T>
double offdiag_block_norm(const Matrix<T>& x, std::size_t k) {
  const std::size_t n = x.rows();
  if (k < 1 || k > n - 1) throw std::invalid_argument("offdiag_block_norm: k out of range");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = k; j < n; ++j) s += abs2(x(i, j));
  return std::sqrt(s);
}

template <typename T>
double energy_from_matrix(const Matrix<T>& x) {
  double s = 0.0;
  for (std::size_t j = 1; j < x.cols(); ++j) s += abs2(x(0, j));
  return s;
}

template <typename T>
DeflationResult deflation_times(const EigenSystem<T>& es, const Hermitian<T>& h, double eps,
                                double t_cap, bool stop_after_first) {
  if (!(eps > 0.0)) throw std::invalid_argument("deflation_times: eps must be positive");
  const std::size_t n = h.size();
  DeflationResult out;
  out.eps = eps;
  out.t_k.assign(n - 1, std::nullopt);

  const double top_gap = es.lambdas.back() - es.lambdas[n - 2];
  const double step =
      top_gap > 0.0 ? 1.0 / (2.0 * top_gap) : 1.0 / (2.0 * std::max(frobenius(h.matrix()), 1e-300));

  FlowPropagator<T> prop(es, h);
  FlowPropagator<T> grid_state = prop;  // state at the previous grid time
  std::size_t remaining = n - 1;
  double t_prev = 0.0;

  bool any_found = false;
  for (double t = 0.0; remaining > 0 && t <= t_cap; t += step) {
    FlowPropagator<T> before = prop;  // state at t_prev
    Matrix<T> x = prop.x_at(t);
    for (std::size_t k = 1; k < n; ++k) {
      if (out.t_k[k - 1]) continue;
      if (offdiag_block_norm(x, k) <= eps) {
        if (t == 0.0) {
          out.t_k[k - 1] = 0.0;
        } else {
          // Bisect inside (t_prev, t], branching off the previous grid state.
          double lo = t_prev, hi = t;
          for (int it = 0; it < 120 && hi - lo > 1e-6 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            FlowPropagator<T> branch = before;
            if (offdiag_block_norm(branch.x_at(mid), k) <= eps) hi = mid;
            else lo = mid;
          }
          out.t_k[k - 1] = 0.5 * (lo + hi);
        }
        --remaining;
        any_found = true;
      }
    }
    if (stop_after_first && any_found) break;
    t_prev = t;
  }

  for (std::size_t k = 1; k < n; ++k) {
    if (!out.t_k[k - 1]) continue;
    if (!out.t_min || *out.t_k[k - 1] < *out.t_min) {
      out.t_min = out.t_k[k - 1];
      out.k_hat = k;
    }
  }
  return out;
}

template class FlowPropagator<double>;
template class FlowPropagator<cplx>;
template Matrix<double> flow_at(const EigenSystem<double>&, const Hermitian<double>&, double);
template Matrix<cplx> flow_at(const EigenSystem<cplx>&, const Hermitian<cplx>&, double);
template Matrix<double> rk4_flow(const Hermitian<double>&, double, double);
template Matrix<cplx> rk4_flow(const Hermitian<cplx>&, double, double);
template double offdiag_block_norm(const Matrix<double>&, std::size_t);
template double offdiag_block_norm(const Matrix<cplx>&, std::size_t);
template double energy_from_matrix(const Matrix<double>&);
template double energy_from_matrix(const Matrix<cplx>&);
template DeflationResult deflation_times(const EigenSystem<double>&, const Hermitian<double>&, double,
                                         double, bool);
template DeflationResult deflation_times(const EigenSystem<cplx>&, const Hermitian<cplx>&, double,
                                         double, bool);

}  // namespace todalab
