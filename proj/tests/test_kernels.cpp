#include <doctest.h>

#include "specloc/kernels.hpp"

using namespace specloc;

namespace {

std::mt19937_64 rng(424242);
double uni() { return (rng() >> 11) * 0x1p-53 - 0.5; }

Matrix random_hermitian(int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cplx(uni(), uni());
  return 0.5 * (g + Matrix(g.adjoint()));
}

Eigen::MatrixXd random_antisymmetric(int n) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = uni();
  return 0.5 * (g - g.transpose());
}

long eigencount_signature(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  long s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    s += es.eigenvalues()(i) > 0 ? 1 : -1;
  return s;
}

// Independent oracle: recursive Pfaffian expansion along the first row,
// pf([[0, a], [-a, 0]]) = a. Only for small even dimensions.
double pfaffian_bruteforce(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 1.0;
  if (n == 2) return m(0, 1);
  double total = 0;
  int sign = 1;
  for (Eigen::Index j = 1; j < n; ++j) {
    Eigen::MatrixXd sub(n - 2, n - 2);
    Eigen::Index r = 0;
    for (Eigen::Index a = 1; a < n; ++a) {
      if (a == j) continue;
      Eigen::Index c = 0;
      for (Eigen::Index b = 1; b < n; ++b) {
        if (b == j) continue;
        sub(r, c++) = m(a, b);
      }
      ++r;
    }
    total += sign * m(0, j) * pfaffian_bruteforce(sub);
    sign = -sign;
  }
  return total;
}

}  // namespace

TEST_CASE("signature of small diagonal matrices") {
  Matrix m1 = Matrix::Zero(3, 3);
  m1.diagonal() << 2, 3, -1;
  CHECK(hermitian_signature(m1).signature == 1);
  Matrix m2 = Matrix::Zero(2, 2);
  m2.diagonal() << 1, -1;
  CHECK(hermitian_signature(m2).signature == 0);
}

TEST_CASE("signature matches the eigendecomposition count on random input") {
  for (int n : {5, 40, 200}) {
    Matrix m = random_hermitian(n);
    SignatureResult r = hermitian_signature(m);
    CHECK(r.signature == eigencount_signature(m));
    CHECK(r.n_plus + r.n_minus == n);
  }
}

TEST_CASE("sylvester congruence invariance") {
  for (int trial = 0; trial < 20; ++trial) {
    int n = 4 + static_cast<int>(rng() % 40);
    Matrix m = random_hermitian(n);
    Matrix s = identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) += 0.3 * cplx(uni(), uni());
    Matrix congruent = s.adjoint() * m * s;
    CHECK(hermitian_signature(congruent).signature ==
          hermitian_signature(m).signature);
  }
}

TEST_CASE("signature of a direct sum adds") {
  Matrix a = random_hermitian(13), b = random_hermitian(8);
  Matrix d = Matrix::Zero(21, 21);
  d.topLeftCorner(13, 13) = a;
  d.bottomRightCorner(8, 8) = b;
  CHECK(hermitian_signature(d).signature ==
        hermitian_signature(a).signature + hermitian_signature(b).signature);
}

TEST_CASE("near-singular pivots abort loudly") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 1.0, 1e-14, -1.0;
  CHECK_THROWS_AS(hermitian_signature(m), NearSingularError);
  Matrix nh(2, 2);
  nh << 0, 1, 2, 0;
  CHECK_THROWS_AS(hermitian_signature(nh), SpeclocError);
}

TEST_CASE("pfaffian signs of the elementary blocks") {
  Eigen::MatrixXd p(2, 2), q(2, 2);
  p << 0, 1, -1, 0;
  q << 0, -1, 1, 0;
  CHECK(pfaffian_sign(p) == 1);
  CHECK(pfaffian_sign(q) == -1);
}

TEST_CASE("pfaffian matches the recursive expansion") {
  for (int n : {4, 6, 8, 10, 12}) {
    Eigen::MatrixXd m = random_antisymmetric(n);
    PfaffianResult r = pfaffian_real(m);
    double brute = pfaffian_bruteforce(m);
    CHECK(r.sign == (brute > 0 ? 1 : -1));
    CHECK(std::abs(r.value - brute) < 1e-10 * std::max(1.0, std::abs(brute)));
  }
}

TEST_CASE("pfaffian squared is the determinant") {
  for (int n : {10, 40, 100}) {
    Eigen::MatrixXd m = random_antisymmetric(n);
    double pf = pfaffian_real(m).value;
    double det = m.determinant();
    CHECK(std::abs(pf * pf - det) < 1e-8 * std::max(1.0, std::abs(det)));
  }
}

TEST_CASE("pfaffian congruence picks up the determinant sign") {
  for (int trial = 0; trial < 10; ++trial) {
    int n = 6;
    Eigen::MatrixXd m = random_antisymmetric(n);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = uni();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    int detq = q.determinant() > 0 ? 1 : -1;
    CHECK(pfaffian_sign(Eigen::MatrixXd(q * m * q.transpose())) ==
          detq * pfaffian_sign(m));
  }
}

TEST_CASE("pfaffian rejects odd dimension, complex and singular input") {
  CHECK_THROWS_AS(pfaffian_real(random_antisymmetric(5)), DimensionError);
  Matrix c(2, 2);
  c << 0, cplx(0, 1), cplx(0, -1), 0;
  CHECK_THROWS_AS(pfaffian_sign(c), SpeclocError);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 4);
  CHECK_THROWS_AS(pfaffian_real(z), NearSingularError);
}

TEST_CASE("spectral projections") {
  Matrix m = Matrix::Zero(2, 2);
  m.diagonal() << 1, -1;
  Matrix p = spectral_projection(m, SpectralSide::Negative);
  Matrix expect = Matrix::Zero(2, 2);
  expect(1, 1) = 1;
  CHECK((p - expect).cwiseAbs().maxCoeff() < 1e-14);
  Matrix pc = spectral_projection(m, SpectralSide::NonNegative);
  CHECK((p + pc - identity(2)).cwiseAbs().maxCoeff() < 1e-14);

  for (int trial = 0; trial < 5; ++trial) {
    Matrix h = random_hermitian(30);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-6) continue;
    Matrix proj = spectral_projection(h, SpectralSide::Negative);
    long neg = 0;
    for (Eigen::Index i = 0; i < 30; ++i)
      if (es.eigenvalues()(i) < 0) ++neg;
    CHECK(std::lround(proj.trace().real()) == neg);
    CHECK((proj * proj - proj).cwiseAbs().maxCoeff() < 1e-12);
  }
  Matrix sing = Matrix::Zero(2, 2);
  sing.diagonal() << 1, 0;
  CHECK_THROWS_AS(spectral_projection(sing, SpectralSide::Negative),
                  GapClosedError);
}

TEST_CASE("extremal singular values") {
  Matrix id = identity(4);
  SingularPair p = extremal_singular_values(id);
  CHECK(p.smallest == doctest::Approx(1.0));
  CHECK(p.largest == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 3, 0.5;
  p = extremal_singular_values(d);
  CHECK(p.smallest == doctest::Approx(0.5));
  CHECK(p.largest == doctest::Approx(3.0));

  for (int trial = 0; trial < 5; ++trial) {
    Matrix g(25, 25);
    for (int i = 0; i < 25; ++i)
      for (int j = 0; j < 25; ++j) g(i, j) = cplx(uni(), uni());
    Eigen::BDCSVD<Matrix> svd(g);
    SingularPair q = extremal_singular_values(g);
    CHECK(std::abs(q.largest - svd.singularValues()(0)) <
          1e-8 * svd.singularValues()(0));
    CHECK(std::abs(q.smallest - svd.singularValues()(24)) <
          1e-8 * std::max(1e-8, svd.singularValues()(24)));
  }
}
