#include <doctest.h>

#include <cmath>

#include "todalab/ensembles.hpp"
#include "todalab/linalg.hpp"
#include "todalab/rng.hpp"

using namespace todalab;

namespace {

Hermitian<double> sym(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  Matrix<double> m(n, n);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return Hermitian<double>(std::move(m));
}

template <typename T>
double residual(const Hermitian<T>& h, const EigenSystem<T>& es) {
  const std::size_t n = h.size();
  Matrix<T> hu = matmul(h.matrix(), es.vectors);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) hu(i, j) -= es.vectors(i, j) * static_cast<T>(es.lambdas[j]);
  return frobenius(hu);
}

template <typename T>
double orthogonality_defect(const Matrix<T>& u) {
  Matrix<T> g = matmul(u.conj_transpose(), u);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= T{1};
  return frobenius(g);
}

}  // namespace

TEST_CASE("eigh on a diagonal matrix sorts and permutes") {
  auto h = sym({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}});
  auto es = eigh(h);
  CHECK(es.lambdas[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(es.lambdas[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(es.lambdas[2] == doctest::Approx(3.0).epsilon(1e-14));
  // permutation columns: one unit entry per column
  for (std::size_t j = 0; j < 3; ++j) {
    int ones = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double a = std::abs(es.vectors(i, j));
      if (a > 0.5) {
        ++ones;
        CHECK(a == doctest::Approx(1.0).epsilon(1e-14));
      } else {
        CHECK(a < 1e-14);
      }
    }
    CHECK(ones == 1);
  }
}

TEST_CASE("eigh on [[0,1],[1,0]]") {
  auto es = eigh(fixed2x2_matrix());
  CHECK(es.lambdas[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(es.lambdas[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(es.vectors(0, 0)) == doctest::Approx(inv_sqrt2).epsilon(1e-13));
  CHECK(std::abs(es.vectors(0, 1)) == doctest::Approx(inv_sqrt2).epsilon(1e-13));
}

TEST_CASE("eigh on the identity") {
  auto h = Hermitian<double>(Matrix<double>::identity(4));
  auto es = eigh(h);
  for (double l : es.lambdas) CHECK(l == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(orthogonality_defect(es.vectors) <= 4e-10);
}

TEST_CASE("eigh residual and orthogonality on random draws") {
  for (std::size_t n : {5, 12, 30}) {
    EnsembleSpec spec;
    spec.n = n;
    spec.seed = 11 + n;

    spec.kind = EnsembleKind::goe;
    spec.beta = 1.0;
    RandomStream s1(spec.seed, 0);
    auto hr = sample_goe(spec, s1);
    auto esr = eigh(hr);
    CHECK(residual(hr, esr) <= n * 1e-9 * (1.0 + frobenius(hr.matrix())));
    CHECK(orthogonality_defect(esr.vectors) <= n * 1e-10);

    spec.kind = EnsembleKind::gue;
    spec.beta = 2.0;
    RandomStream s2(spec.seed, 1);
    auto hc = sample_gue(spec, s2);
    auto esc = eigh(hc);
    CHECK(residual(hc, esc) <= n * 1e-9 * (1.0 + frobenius(hc.matrix())));
    CHECK(orthogonality_defect(esc.vectors) <= n * 1e-10);
  }
}

TEST_CASE("eigh_first_row matches the full decomposition") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::gue;
  spec.n = 17;
  spec.beta = 2.0;
  RandomStream s(99, 0);
  auto h = sample_gue(spec, s);
  auto es = eigh(h);
  auto [lams, mods] = eigh_first_row(h);
  for (std::size_t j = 0; j < spec.n; ++j) {
    CHECK(lams[j] == es.lambdas[j]);
    CHECK(mods[j] == doctest::Approx(std::abs(es.vectors(0, j))).epsilon(1e-15));
  }
}

TEST_CASE("non-Hermitian input is rejected with a diagnostic") {
  Matrix<double> m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 0.5;
  CHECK_THROWS_WITH_AS(Hermitian<double>(std::move(m)),
                       doctest::Contains("symmetry violated"), std::invalid_argument);
}

TEST_CASE("qr_pos basic examples") {
  auto [qi, ri] = qr_pos(Matrix<double>::identity(3));
  CHECK(frobenius(qi) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(qi(i, i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ri(i, i) == doctest::Approx(1.0).epsilon(1e-14));
  }

  Matrix<double> d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  auto [qd, rd] = qr_pos(d);
  CHECK(qd(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(qd(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rd(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rd(1, 1) == doctest::Approx(3.0).epsilon(1e-14));

  Matrix<double> x(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  auto [qx, rx] = qr_pos(x);
  CHECK(qx(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(qx(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rx(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rx(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("qr_pos reconstructs with a positive diagonal on random matrices") {
  RandomStream s(2024, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 10;
    if (rep % 2 == 0) {
      Matrix<double> m(n, n);
      for (std::size_t i = 0; i < n * n; ++i) m.data()[i] = s.gauss();
      for (std::size_t i = 0; i < n; ++i) m(i, i) += 4.0;  // keep it well-conditioned
      auto [q, r] = qr_pos(m);
      Matrix<double> qr = matmul(q, r);
      for (std::size_t i = 0; i < n * n; ++i) qr.data()[i] -= m.data()[i];
      CHECK(frobenius(qr) / frobenius(m) <= n * 1e-12);
      CHECK(orthogonality_defect(q) <= n * 1e-12);
      for (std::size_t i = 0; i < n; ++i) CHECK(r(i, i) > 0.0);
    } else {
      Matrix<cplx> m(n, n);
      for (std::size_t i = 0; i < n * n; ++i) m.data()[i] = cplx(s.gauss(), s.gauss());
      for (std::size_t i = 0; i < n; ++i) m(i, i) += cplx(6.0, 0.0);
      auto [q, r] = qr_pos(m);
      Matrix<cplx> qr = matmul(q, r);
      for (std::size_t i = 0; i < n * n; ++i) qr.data()[i] -= m.data()[i];
      CHECK(frobenius(qr) / frobenius(m) <= n * 1e-12);
      CHECK(orthogonality_defect(q) <= n * 1e-12);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(r(i, i).real() > 0.0);
        CHECK(std::abs(r(i, i).imag()) <= 1e-13 * r(i, i).real());
      }
    }
  }
}

TEST_CASE("qr_pos names the failing column on singular input") {
  Matrix<double> m(2, 2);
  m(1, 1) = 1.0;  // first column identically zero
  CHECK_THROWS_WITH_AS(qr_pos(m), doctest::Contains("column 1"), std::runtime_error);
}

TEST_CASE("top_eigs_tridiag closed forms") {
  SymTridiagonal one{{5.0}, {}};
  auto top1 = top_eigs_tridiag(one, 1);
  CHECK(top1[0] == doctest::Approx(5.0).epsilon(1e-12));

  SymTridiagonal two{{0.0, 0.0}, {1.0}};
  auto top2 = top_eigs_tridiag(two, 2);
  CHECK(top2[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top2[1] == doctest::Approx(-1.0).epsilon(1e-12));

  SymTridiagonal three{{0.0, 0.0, 0.0}, {1.0, 1.0}};
  auto top3 = top_eigs_tridiag(three, 2);
  CHECK(top3[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(top3[1]) <= 1e-12);

  CHECK_THROWS_AS(top_eigs_tridiag(two, 3), std::invalid_argument);
  CHECK_THROWS_AS(top_eigs_tridiag(two, 0), std::invalid_argument);
}

TEST_CASE("top_eigs_tridiag agrees with eigh on the dense embedding") {
  RandomStream s(5150, 0);
  const std::size_t n = 50;
  SymTridiagonal t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = s.gauss();
  for (std::size_t i = 0; i + 1 < n; ++i) t.offdiag[i] = s.gauss();  // signs may be negative

  Matrix<double> dense(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    dense(i, i) = t.diag[i];
    if (i + 1 < n) {
      dense(i, i + 1) = t.offdiag[i];
      dense(i + 1, i) = t.offdiag[i];
    }
  }
  auto es = eigh(Hermitian<double>(std::move(dense)));
  auto all = eigs_tridiag_all(t);
  for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == doctest::Approx(es.lambdas[i]).epsilon(1e-10));
  auto top5 = top_eigs_tridiag(t, 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(top5[j] == doctest::Approx(es.lambdas[n - 1 - j]).epsilon(1e-10));
  }
}

TEST_CASE("frobenius norm") {
  CHECK(frobenius(Matrix<double>::identity(3)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(frobenius(Matrix<double>(4, 4)) == 0.0);
  Matrix<double> m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0;
  m(1, 1) = 1.0;
  CHECK(frobenius(m) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
}

TEST_CASE("spectral_exp") {
  auto es2 = eigh(sym({{1, 0}, {0, 2}}));
  SUBCASE("t = 0 is the identity for any shift") {
    for (double shift : {-3.0, 0.0, 7.5}) {
      auto m = spectral_exp(es2, 0.0, shift);
      m(0, 0) -= 1.0;
      m(1, 1) -= 1.0;
      CHECK(frobenius(m) <= 1e-13);
    }
  }
  SUBCASE("diagonal exponential with shift") {
    auto m = spectral_exp(es2, 1.0, 2.0);
    CHECK(m(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(m(1, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(m(0, 1)) <= 1e-13);
  }
  SUBCASE("2x2 closed form cosh/sinh") {
    auto es = eigh(fixed2x2_matrix());
    auto m = spectral_exp(es, 1.0, 0.0);
    CHECK(m(0, 0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
    CHECK(m(0, 1) == doctest::Approx(std::sinh(1.0)).epsilon(1e-13));
    CHECK(m(1, 1) == doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
  }
  SUBCASE("overflow is rejected with advice") {
    CHECK_THROWS_WITH_AS(spectral_exp(es2, 1000.0, 0.0), doctest::Contains("lambda_max"),
                         std::runtime_error);
  }
}
