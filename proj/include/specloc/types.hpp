#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace specloc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr cplx I{0.0, 1.0};

// Relative tolerance below which a symmetry relation counts as exact.
inline constexpr double kExactTol = 1e-12;

struct SpeclocError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : SpeclocError {
  using SpeclocError::SpeclocError;
};

struct GapClosedError : SpeclocError {
  using SpeclocError::SpeclocError;
};

struct NearSingularError : SpeclocError {
  using SpeclocError::SpeclocError;
};

inline Matrix pauli(int i) {
  Matrix s(2, 2);
  switch (i) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I, I, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw SpeclocError("pauli: index must be 0..3");
  }
  return s;
}

// Cayley transform diagonalizing pauli(1)- resp. pauli(2)-type involutions;
// also the particle-hole rotation taking a BdG operator to its Majorana form.
inline Matrix cayley2() {
  Matrix c(2, 2);
  c << 1, I, 1, -I;
  return c / std::sqrt(2.0);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline bool is_hermitian(const Matrix& m, double tol = kExactTol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline bool is_unitary(const Matrix& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - identity(m.rows())).cwiseAbs().maxCoeff() <= tol;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace specloc
