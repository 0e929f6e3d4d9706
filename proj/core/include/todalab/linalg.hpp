#pragma once

#include <utility>
#include <vector>

#include "todalab/matrix.hpp"

namespace todalab {

// Eigendecomposition H = U diag(lambdas) U^*, lambdas ascending (stable order),
// U unitary with column j belonging to lambdas[j].
template <typename T>
struct EigenSystem {
  std::vector<double> lambdas;
  Matrix<T> vectors;
};

// Full eigendecomposition by cyclic Jacobi sweeps (real rotations for double,
// complex rotations for cplx). Iterates until the off-diagonal Frobenius mass
// drops below n^2 * 1e-14 * ||H||_F.
template <typename T>
EigenSystem<T> eigh(const Hermitian<T>& h);

// Same Jacobi iteration, but accumulates only the first row of U. Returns
// ascending eigenvalues and |U_{1j}|; identical rotation sequence to eigh, so
// the moduli agree with eigh's first row to the last bit.
template <typename T>
std::pair<std::vector<double>, std::vector<double>> eigh_first_row(const Hermitian<T>& h);

// QR factorization M = QR with R_ii > 0 (Householder reflections followed by a
// diagonal phase normalization), which makes the factorization unique.
// Throws naming the failing column when an eliminated column is numerically zero.
template <typename T>
std::pair<Matrix<T>, Matrix<T>> qr_pos(const Matrix<T>& m);

// Symmetric tridiagonal matrix. Off-diagonal signs do not affect the spectrum,
// so negative entries are accepted as-is.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;  // size diag.size() - 1

  std::size_t size() const { return diag.size(); }
};

// k largest eigenvalues in descending order via Sturm-sequence bisection.
std::vector<double> top_eigs_tridiag(const SymTridiagonal& t, std::size_t k);

// All eigenvalues, ascending (bisection per index).
std::vector<double> eigs_tridiag_all(const SymTridiagonal& t);

// U diag(exp(t (lambda_j - shift))) U^*. Throws when t (lambda_max - shift)
// would overflow, advising shift = lambda_max.
template <typename T>
Matrix<T> spectral_exp(const EigenSystem<T>& es, double t, double shift);

}  // namespace todalab
