#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace todalab {

using cplx = std::complex<double>;

template <typename T>
inline double abs2(T x) {
  if constexpr (std::is_same_v<T, cplx>) {
    return x.real() * x.real() + x.imag() * x.imag();
  } else {
    return x * x;
  }
}

template <typename T>
inline T conj_of(T x) {
  if constexpr (std::is_same_v<T, cplx>) {
    return std::conj(x);
  } else {
    return x;
  }
}

// Dense row-major matrix. Value type, no views.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  T* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const T* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  Matrix conj_transpose() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = conj_of((*this)(i, j));
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;

// C = A * B, accumulated in ikj order so the inner loop runs over contiguous rows.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T* ci = c.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      const T* bk = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

// Frobenius norm sqrt(sum |entries|^2).
template <typename T>
double frobenius(const Matrix<T>& m) {
  double s = 0.0;
  const T* p = m.data();
  const std::size_t total = m.rows() * m.cols();
  for (std::size_t i = 0; i < total; ++i) s += abs2(p[i]);
  return std::sqrt(s);
}

// Largest |a_ij - conj(a_ji)| over the matrix; 0 for an exactly Hermitian input.
template <typename T>
double hermiticity_defect(const Matrix<T>& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      double d = std::sqrt(abs2(static_cast<T>(m(i, j) - conj_of(m(j, i)))));
      if (d > worst) worst = d;
    }
  return worst;
}

// Real-symmetric or complex-Hermitian matrix with the symmetry checked at
// construction (absolute tolerance 1e-12, exact mirroring afterwards).
template <typename T>
class Hermitian {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  explicit Hermitian(Matrix<T> entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("Hermitian: matrix not square");
    double defect = hermiticity_defect(m_);
    if (defect > kSymmetryTol) {
      throw std::invalid_argument("Hermitian: symmetry violated by " + std::to_string(defect));
    }
    // Mirror the upper triangle so the stored matrix is Hermitian exactly.
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      if constexpr (std::is_same_v<T, cplx>) m_(i, i) = cplx(m_(i, i).real(), 0.0);
      for (std::size_t j = i + 1; j < m_.cols(); ++j) m_(j, i) = conj_of(m_(i, j));
    }
  }

  std::size_t size() const { return m_.rows(); }
  const Matrix<T>& matrix() const { return m_; }
  const T& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  Matrix<T> m_;
};

}  // namespace todalab
