#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <random>
#include <vector>

#include "specloc/types.hpp"

extern "C" {
void zhetrf_(const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, int* ipiv, std::complex<double>* work,
             const int* lwork, int* info);
}

namespace specloc {

// Dense-solver size below which norms and extremal singular values fall back
// to full decompositions instead of iteration.
inline constexpr int kDenseFallbackDim = 2000;

struct SignatureResult {
  long n_plus = 0;
  long n_minus = 0;
  long signature = 0;
  double min_abs_eig_lower_bound = 0;  // smallest pivot-block eigenvalue; a
                                       // zero-eigenvalue guard, not a
                                       // certified spectral bound
};

// Matrix inertia from a Bunch-Kaufman LDL^* factorization. The block-diagonal
// factor is scanned: 1x1 pivots contribute their sign, 2x2 pivots are
// indefinite and contribute (+1,-1). Pivot eigenvalues below
// pivot_tol * max-row-sum norm abort: a signature at a closing gap carries no
// meaning, so fail loudly.
inline SignatureResult hermitian_signature(const Matrix& m,
                                           double pivot_tol = 1e-10) {
  const int n = static_cast<int>(m.rows());
  if (m.rows() != m.cols()) throw DimensionError("hermitian_signature: not square");
  if (n == 0) return {};
  double scale = 0;
  for (int j = 0; j < n; ++j) scale = std::max(scale, m.col(j).cwiseAbs().sum());
  if (scale == 0) throw NearSingularError("hermitian_signature: zero matrix");
  if (!is_hermitian(m, 1e-12))
    throw SpeclocError("hermitian_signature: matrix not hermitian");

  Matrix a = m;
  std::vector<int> ipiv(n);
  int info = 0, lwork = -1;
  cplx wk_query;
  zhetrf_("L", &n, a.data(), &n, ipiv.data(), &wk_query, &lwork, &info);
  lwork = std::max(1, static_cast<int>(wk_query.real()));
  std::vector<cplx> work(lwork);
  zhetrf_("L", &n, a.data(), &n, ipiv.data(), work.data(), &lwork, &info);
  if (info < 0) throw SpeclocError("hermitian_signature: zhetrf invalid arg");
  if (info > 0)
    throw NearSingularError("hermitian_signature: exactly singular pivot");

  SignatureResult res;
  double min_abs = std::numeric_limits<double>::infinity();
  const double cutoff = pivot_tol * scale;
  for (int k = 0; k < n;) {
    if (ipiv[k] > 0) {
      double dkk = a(k, k).real();
      if (std::abs(dkk) < cutoff)
        throw NearSingularError("hermitian_signature: pivot below tolerance");
      min_abs = std::min(min_abs, std::abs(dkk));
      (dkk > 0 ? res.n_plus : res.n_minus)++;
      ++k;
    } else {
      // 2x2 pivot stored in rows/cols k, k+1 (lower storage).
      double p = a(k, k).real(), q = a(k + 1, k + 1).real();
      cplx e = a(k + 1, k);
      double tr = p + q;
      double det = p * q - std::norm(e);
      double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
      double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
      if (std::min(std::abs(l1), std::abs(l2)) < cutoff)
        throw NearSingularError("hermitian_signature: pivot below tolerance");
      min_abs = std::min({min_abs, std::abs(l1), std::abs(l2)});
      (l1 > 0 ? res.n_plus : res.n_minus)++;
      (l2 > 0 ? res.n_plus : res.n_minus)++;
      k += 2;
    }
  }
  res.signature = res.n_plus - res.n_minus;
  res.min_abs_eig_lower_bound = min_abs;
  return res;
}

struct PfaffianResult {
  int sign = 0;
  double value = 0;
};

// Pfaffian of a real antisymmetric matrix by Parlett-Reid elimination with
// partial pivoting; the sign collects the permutation parity and the signs of
// the surviving superdiagonal entries.
inline PfaffianResult pfaffian_real(Eigen::MatrixXd m) {
  const Eigen::Index n = m.rows();
  if (n % 2 != 0) throw DimensionError("pfaffian: odd dimension");
  double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw SpeclocError("pfaffian: matrix not antisymmetric");
  if (n == 0) return {1, 1.0};
  double value = 1.0;
  for (Eigen::Index k = 0; k < n - 1; k += 2) {
    Eigen::Index piv = k + 1;
    for (Eigen::Index i = k + 2; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (piv != k + 1) {
      m.row(k + 1).swap(m.row(piv));
      m.col(k + 1).swap(m.col(piv));
      value = -value;
    }
    double el = m(k + 1, k);
    if (el == 0.0) throw NearSingularError("pfaffian: singular matrix");
    value *= -el;  // pf convention: pf([[0, a], [-a, 0]]) = a
    if (k + 2 < n) {
      Eigen::VectorXd tau = m.col(k).segment(k + 2, n - k - 2) / el;
      auto rest = m.block(k + 2, k + 2, n - k - 2, n - k - 2);
      Eigen::VectorXd col = m.col(k + 1).segment(k + 2, n - k - 2);
      rest += tau * col.transpose() - col * tau.transpose();
    }
  }
  PfaffianResult out;
  out.value = value;
  out.sign = (value > 0) ? 1 : -1;
  return out;
}

inline int pfaffian_sign(const Eigen::MatrixXd& m) {
  return pfaffian_real(m).sign;
}

// Complex input is refused rather than silently realified.
inline int pfaffian_sign(const Matrix& m) {
  double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  if (m.imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw SpeclocError("pfaffian: complex input refused; pass the real form");
  return pfaffian_sign(Eigen::MatrixXd(m.real()));
}

enum class SpectralSide { Negative, NonNegative };

// Orthogonal spectral projection of a Hermitian matrix onto the strictly
// negative (resp. nonnegative) part; errors out when an eigenvalue sits
// within gap_tol of zero.
inline Matrix spectral_projection(const Matrix& m, SpectralSide side,
                                  double gap_tol = 1e-10) {
  if (!is_hermitian(m, 1e-10))
    throw SpeclocError("spectral_projection: matrix not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const auto& ev = es.eigenvalues();
  double scale = std::max(1.0, std::abs(ev(ev.size() - 1)));
  Matrix p = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < gap_tol * scale)
      throw GapClosedError("spectral_projection: gap below tolerance");
    bool take = (side == SpectralSide::Negative) ? (ev(i) < 0) : (ev(i) >= 0);
    if (take) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return p;
}

namespace detail {

inline Vector deterministic_start(Eigen::Index n) {
  std::mt19937_64 rng(0x5eedULL);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = (rng() >> 11) * 0x1p-53;
    double b = (rng() >> 11) * 0x1p-53;
    v(i) = cplx(2 * a - 1, 2 * b - 1);
  }
  v /= v.norm();
  return v;
}

// Largest singular value by power iteration on A^* A. The Rayleigh sequence
// is monotone from below; when the top of the spectrum clusters the loop exits
// at the cap with the current (slightly low) estimate.
template <class Op>
double power_largest(const Op& apply_ata, Eigen::Index n, double rel_tol,
                     int max_iter) {
  Vector v = deterministic_start(n);
  double lambda = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = apply_ata(v);
    double nl = w.norm();
    if (nl == 0) return 0;
    w /= nl;
    if (it > 3 && std::abs(nl - lambda) <= rel_tol * std::max(1.0, nl))
      return std::sqrt(nl);
    lambda = nl;
    v = w;
  }
  return std::sqrt(lambda);
}

}  // namespace detail

inline double operator_norm(const SparseMatrix& a, double rel_tol = 1e-10,
                            int max_iter = 5000) {
  if (a.rows() == 0) return 0;
  if (a.rows() < 600) {
    Matrix dense(a);
    if (dense.cwiseAbs().maxCoeff() == 0.0) return 0;
    Matrix ata = dense.adjoint() * dense;
    Eigen::SelfAdjointEigenSolver<Matrix> es(ata, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  SparseMatrix ad = a.adjoint();
  auto apply = [&](const Vector& v) { return Vector(ad * (a * v)); };
  return detail::power_largest(apply, a.rows(), rel_tol, max_iter);
}

inline double operator_norm(const Matrix& a, double rel_tol = 1e-10,
                            int max_iter = 5000) {
  if (a.rows() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0;
  if (std::max(a.rows(), a.cols()) < 600) {
    Matrix ata = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(ata, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  Matrix ad = a.adjoint();
  auto apply = [&](const Vector& v) { return Vector(ad * (a * v)); };
  return detail::power_largest(apply, a.rows(), rel_tol, max_iter);
}

// Smallest |eigenvalue| of a Hermitian operator via shift-free inverse power
// iteration; returns 0 when the factorization detects singularity.
inline double min_abs_eig_hermitian(const SparseMatrix& h,
                                    double rel_tol = 1e-10,
                                    int max_iter = 5000) {
  if (h.rows() == 0) return 0;
  if (h.rows() < 600) {
    Matrix dense(h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().minCoeff();
  }
  Eigen::SparseLU<SparseMatrix> lu;
  SparseMatrix hc = h;
  hc.makeCompressed();
  lu.compute(hc);
  if (lu.info() != Eigen::Success) return 0;
  Vector v = detail::deterministic_start(h.rows());
  double mu = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = lu.solve(v);
    double nw = w.norm();
    if (!(nw > 0) || !std::isfinite(nw)) return 0;
    w /= nw;
    double rayleigh = std::abs((w.adjoint() * (h * w))(0, 0).real());
    if (it > 0 && std::abs(rayleigh - mu) <= rel_tol * std::max(1e-300, rayleigh))
      return rayleigh;
    mu = rayleigh;
    v = w;
  }
  return mu;
}

struct HermitianExtremes {
  double min_abs = 0;
  double max_abs = 0;
};

// Extreme |eigenvalues| of a sparse Hermitian matrix. Iterations act through
// H^2 so the near-symmetric spectra of localizer matrices do not stall the
// convergence on a +-lambda pair.
inline HermitianExtremes hermitian_extremes_sparse(const SparseMatrix& h,
                                                   double rel_tol = 1e-10,
                                                   int max_iter = 5000) {
  HermitianExtremes out;
  if (h.rows() == 0) return out;
  if (h.rows() < 600) {
    Matrix dense(h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense, Eigen::EigenvaluesOnly);
    out.min_abs = es.eigenvalues().cwiseAbs().minCoeff();
    out.max_abs = es.eigenvalues().cwiseAbs().maxCoeff();
    return out;
  }
  {
    Vector v = detail::deterministic_start(h.rows());
    double est = 0;
    for (int it = 0; it < max_iter; ++it) {
      Vector w = h * Vector(h * v);
      double nl = w.norm();
      if (nl == 0) {
        est = 0;
        break;
      }
      w /= nl;
      if (it > 3 && std::abs(nl - est) <= rel_tol * nl) {
        est = nl;
        break;
      }
      est = nl;
      v = w;
    }
    out.max_abs = std::sqrt(est);
  }
  {
    Eigen::SparseLU<SparseMatrix> lu;
    SparseMatrix hc = h;
    hc.makeCompressed();
    lu.compute(hc);
    if (lu.info() != Eigen::Success) {
      out.min_abs = 0;
      return out;
    }
    Vector v = detail::deterministic_start(h.rows());
    double est = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
      Vector w = lu.solve(Vector(lu.solve(v)));
      double nw = w.norm();
      if (!(nw > 0) || !std::isfinite(nw)) {
        out.min_abs = 0;
        return out;
      }
      w /= nw;
      double val = Vector(h * w).norm();
      if (it > 3 && std::abs(val - est) <= rel_tol * std::max(val, 1e-300)) {
        est = val;
        break;
      }
      est = val;
      v = w;
    }
    out.min_abs = est;
  }
  return out;
}

struct SingularPair {
  double smallest = 0;
  double largest = 0;
};

inline SingularPair extremal_singular_values(const Matrix& m) {
  SingularPair out;
  if (m.rows() == 0) return out;
  if (is_hermitian(m, 1e-10) && m.rows() < kDenseFallbackDim) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    out.smallest = es.eigenvalues().cwiseAbs().minCoeff();
    out.largest = es.eigenvalues().cwiseAbs().maxCoeff();
    return out;
  }
  if (std::max(m.rows(), m.cols()) < 600) {
    Eigen::BDCSVD<Matrix> svd(m);
    out.largest = svd.singularValues()(0);
    out.smallest = svd.singularValues()(svd.singularValues().size() - 1);
    return out;
  }
  out.largest = operator_norm(m);
  if (is_hermitian(m, 1e-10)) {
    out.smallest = min_abs_eig_hermitian(m.sparseView());
  } else {
    // Hermitian dilation [[0, M],[M^*, 0]]: its spectrum is +-singular values.
    Eigen::Index n = m.rows();
    Matrix dil = Matrix::Zero(2 * n, 2 * n);
    dil.topRightCorner(n, n) = m;
    dil.bottomLeftCorner(n, n) = m.adjoint();
    out.smallest = min_abs_eig_hermitian(dil.sparseView());
  }
  return out;
}

inline double min_abs_eig_hermitian(const Matrix& m) {
  return extremal_singular_values(m).smallest;
}

}  // namespace specloc
