#pragma once

#include <optional>
#include <vector>

#include "todalab/linalg.hpp"
#include "todalab/matrix.hpp"

namespace todalab {

// Q(t) from the flow's QR solution e^{tH} = Q(t) R(t), advanced in steps of
// bounded exponent range: Q(t+d) = qr_pos(e^{d(H - lambda_max I)} Q(t)).Q.
// A single step keeps every column of the propagator above the roundoff floor
// (the one-shot factorization loses all trailing columns once
// e^{-t (lambda_N - lambda_2)} drops below machine precision), so X(t) stays
// accurate for every deflation block, not just the first row. Copy the
// propagator to branch a bisection off a grid state.
template <typename T>
class FlowPropagator {
 public:
  FlowPropagator(const EigenSystem<T>& es, const Hermitian<T>& h);

  // Advance forward to time t (t must not decrease) and return X(t) = Q*(t) H Q(t).
  Matrix<T> x_at(double t);

  double time() const { return t_; }

 private:
  EigenSystem<T> es_;
  Matrix<T> h_;
  Matrix<T> q_;
  double t_ = 0.0;
  double dt_max_;
};

// X(t) for a single time. t = 0 returns H exactly.
template <typename T>
Matrix<T> flow_at(const EigenSystem<T>& es, const Hermitian<T>& h, double t);

// Classical fourth-order integration of dX/dt = [X, B(X)], B(X) = X_- - X_-^*,
// re-Hermitizing after every step. Requires dt <= 0.01/||H||_F.
template <typename T>
Matrix<T> rk4_flow(const Hermitian<T>& h, double t, double dt);

// Frobenius norm of the top-right k x (n-k) block, 1 <= k <= n-1.
template <typename T>
double offdiag_block_norm(const Matrix<T>& x, std::size_t k);

// sum_{j>=2} |X_{1j}|^2.
template <typename T>
double energy_from_matrix(const Matrix<T>& x);

// First times T^(k) at which the k-split block norm reaches eps, their minimum
// T(H) and the smallest index attaining it.
struct DeflationResult {
  std::vector<std::optional<double>> t_k;  // index k-1 holds T^(k)
  std::optional<double> t_min;
  std::optional<std::size_t> k_hat;
  double eps = 0.0;
};

// Shared grid scan (step 1/delta_{N-1} when the top gap is open, else
// 1/(2||H||_F)) with one propagator evaluation per grid time for all k,
// followed by per-k bisection to relative time tolerance 1e-6. Blocks that
// have not crossed by t_cap are reported absent. stop_after_first ends the
// scan at the grid time where the earliest block is detected, which leaves
// t_min and k_hat intact and the later t_k absent.
template <typename T>
DeflationResult deflation_times(const EigenSystem<T>& es, const Hermitian<T>& h, double eps,
                                double t_cap, bool stop_after_first = false);

}  // namespace todalab
