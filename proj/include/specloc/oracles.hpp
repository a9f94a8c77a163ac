#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "specloc/kernels.hpp"
#include "specloc/symmetry.hpp"

namespace specloc {

// Bloch symbol of a translation-invariant hopping family on the torus:
// symbol(k) = sum_o B_o e^{-i k.o}, with the hermitization mirroring assemble.
struct BlochClosure {
  int d = 1;
  int fiber = 1;
  std::vector<Hopping> hoppings;
  bool hermitize = true;

  Matrix symbol(const std::vector<double>& k) const {
    Matrix m = Matrix::Zero(fiber, fiber);
    for (const auto& h : hoppings) {
      double phase = 0;
      bool zero_offset = true;
      for (int i = 0; i < d; ++i) {
        phase += k[i] * h.offset[i];
        zero_offset = zero_offset && h.offset[i] == 0;
      }
      if (hermitize && zero_offset) {
        m += 0.5 * (h.block + Matrix(h.block.adjoint()));
      } else {
        m += std::exp(-I * phase) * h.block;
        if (hermitize) m += std::exp(I * phase) * Matrix(h.block.adjoint());
      }
    }
    return m;
  }

  // Smallest |eigenvalue| over a uniform k-grid.
  double gap_on_grid(int grid_n) const {
    double g = std::numeric_limits<double>::infinity();
    std::vector<double> k(d, 0.0);
    std::vector<int> idx(d, 0);
    while (true) {
      for (int i = 0; i < d; ++i) k[i] = 2 * M_PI * idx[i] / grid_n;
      Eigen::SelfAdjointEigenSolver<Matrix> es(symbol(k), Eigen::EigenvaluesOnly);
      g = std::min(g, es.eigenvalues().cwiseAbs().minCoeff());
      int i = d - 1;
      while (i >= 0 && idx[i] == grid_n - 1) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
    return g;
  }
};

namespace detail {

// Orthonormal frame of the band subspace selected by the projector rule.
inline Matrix occupied_frame(const Matrix& symbol, double gap_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symbol);
  const auto& ev = es.eigenvalues();
  int occ = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < gap_tol)
      throw GapClosedError("chern_number: gap closure on grid");
    if (ev(i) < 0) ++occ;
  }
  return es.eigenvectors().leftCols(occ);
}

}  // namespace detail

// Orientation of the plaquette Berry-flux sum. Frozen once against the even
// spectral-localizer pipeline (regression value: the two-band model with
// d(k) = (sin k1, sin k2, m + cos k1 + cos k2) has chern_number(m=1) = +1).
inline constexpr double kChernOrientation = 1.0;

// Plaquette Berry-flux (gauge-invariant) Chern number on an n x n grid.
// A frame-valued generalization is used so degenerate multiband projectors
// are handled; the result must round to an integer within 0.01.
inline int chern_number(const std::function<Matrix(double, double)>& symbol,
                        int grid_n = 64, double gap_tol = 1e-8) {
  std::vector<std::vector<Matrix>> frames(grid_n, std::vector<Matrix>(grid_n));
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      double k1 = 2 * M_PI * i / grid_n, k2 = 2 * M_PI * j / grid_n;
      frames[i][j] = detail::occupied_frame(symbol(k1, k2), gap_tol);
      if (frames[i][j].cols() != frames[0][0].cols())
        throw GapClosedError("chern_number: occupied band count changes on grid");
    }
  auto link = [&](int i1, int j1, int i2, int j2) {
    cplx u = Matrix(frames[i1][j1].adjoint() * frames[i2][j2]).determinant();
    if (std::abs(u) < 1e-12)
      throw SpeclocError("chern_number: degenerate link variable");
    return u / std::abs(u);
  };
  double total = 0;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      int ip = (i + 1) % grid_n, jp = (j + 1) % grid_n;
      cplx plaq = link(i, j, ip, j) * link(ip, j, ip, jp) /
                  (link(i, jp, ip, jp) * link(i, j, i, jp));
      total += std::arg(plaq);
    }
  double raw = kChernOrientation * total / (2 * M_PI);
  int rounded = static_cast<int>(std::lround(raw));
  if (std::abs(raw - rounded) > 0.01)
    throw SpeclocError("chern_number: rounding residue too large; grid too coarse");
  return rounded;
}

inline int chern_number(const BlochClosure& closure, int grid_n = 64,
                        double gap_tol = 1e-8) {
  if (closure.d != 2) throw DimensionError("chern_number: requires d = 2");
  return chern_number(
      [&](double k1, double k2) { return closure.symbol({k1, k2}); }, grid_n,
      gap_tol);
}

// Winding of det a(k) around the circle: total counterclockwise phase
// increment / 2 pi on the grid, with every step required to stay well below
// half a turn.
inline int winding_number(const std::function<Matrix(double)>& a,
                          int grid_n = 256, double det_tol = 1e-10) {
  double total = 0;
  cplx prev = a(0.0).determinant();
  double scale = std::abs(prev);
  if (!(scale > 0)) throw NearSingularError("winding_number: zero determinant");
  for (int j = 1; j <= grid_n; ++j) {
    double k = 2 * M_PI * j / grid_n;
    cplx cur = a(k).determinant();
    if (std::abs(cur) < det_tol * std::max(1.0, scale))
      throw NearSingularError("winding_number: near-zero determinant sample");
    double step = std::arg(cur / prev);
    if (std::abs(step) > M_PI / 2)
      throw SpeclocError("winding_number: phase step too large; grid too coarse");
    total += step;
    prev = cur;
  }
  double raw = total / (2 * M_PI);
  int rounded = static_cast<int>(std::lround(raw));
  if (std::abs(raw - rounded) > 0.01)
    throw SpeclocError("winding_number: total phase not an integer multiple");
  return rounded;
}

struct SplitP {
  BlockLatticeOperator h_plus, h_minus;
  Matrix rotation;  // fiber unitary bringing the conservation op to diag(1,-1)
};

// Diagonal blocks of H in the eigenbasis of a conserved (or nearly conserved)
// fiber observable, both certified invertible.
inline SplitP split_P(const BlockLatticeOperator& h, const Matrix& s,
                      double g, double eta) {
  if (!(eta < 2 * g))
    throw SpeclocError("split_P: eta >= 2g, blocks not certified invertible");
  Grading gr = grading_basis(s);
  BlockLatticeOperator rotated = h.fiber_sandwich(gr.rotation, gr.rotation);
  int half = gr.half;
  BlockLatticeOperator hp(h.window(), half), hm(h.window(), half);
  for (const auto& [k, b] : rotated.entries()) {
    Site x = rotated.site_of(k.first), y = rotated.site_of(k.second);
    Matrix bp = b.topLeftCorner(half, half);
    Matrix bm = b.bottomRightCorner(half, half);
    if (bp.cwiseAbs().maxCoeff() > 0) hp.add_entry(x, y, bp);
    if (bm.cwiseAbs().maxCoeff() > 0) hm.add_entry(x, y, bm);
  }
  hp.set_hermitian(true);
  hm.set_hermitian(true);
  for (const BlockLatticeOperator* blk : {&hp, &hm}) {
    double mg = min_abs_eig_hermitian(blk->window_sparse());
    if (!(mg > 0))
      throw SpeclocError("split_P: block not invertible");  // unreachable under the precondition
  }
  return {std::move(hp), std::move(hm), gr.rotation};
}

struct SplitQ {
  Matrix q_plus, q_minus;
  double psp_gap = 0;
};

// Prodan's splitting: spectral halves of P S P on the range of P. Requires a
// spectral gap of P S P at zero, guarded by ||[S,P]|| < 1.
inline SplitQ split_Q(const Matrix& p, const Matrix& s, double gap_tol = 1e-6) {
  Matrix comm = s * p - p * s;
  double cn = operator_norm(comm);
  if (cn >= 1.0)
    throw GapClosedError("split_Q: ||[S,P]|| >= 1, no protected gap");
  Matrix psp = p * s * p;
  Eigen::SelfAdjointEigenSolver<Matrix> es(psp);
  const auto& ev = es.eigenvalues();
  SplitQ out;
  out.q_plus = Matrix::Zero(p.rows(), p.cols());
  out.q_minus = Matrix::Zero(p.rows(), p.cols());
  double rank_tol = 1e-8;
  out.psp_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    // Eigenvectors of PSP with eigenvalue ~0 belong to the kernel of P.
    Matrix outer = es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    double overlap = (p * es.eigenvectors().col(i)).norm();
    if (overlap < rank_tol) continue;
    if (std::abs(ev(i)) < gap_tol)
      throw GapClosedError("split_Q: spectrum of PSP reaches zero");
    out.psp_gap = std::min(out.psp_gap, std::abs(ev(i)));
    (ev(i) > 0 ? out.q_plus : out.q_minus) += outer;
  }
  if (rel_diff(out.q_plus + out.q_minus, p) > 1e-8)
    throw SpeclocError("split_Q: Q+ + Q- != P");
  return out;
}

struct ZeroDimResult {
  int pf_sign = 0;
  int formula_sign = 0;
  double eta = 0;
  double gap = 0;
};

// Zero-dimensional parity: the sign of Pf(i H_Maj) against the closed form
// (-1)^{(L^2 + Sig(h))/2} from the upper diagonal block, valid for
// eta = ||[H, tau3]|| < 2/||H^{-1}||.
inline ZeroDimResult zero_dim_invariant(const Matrix& h_bdg,
                                        bool enforce_precondition = true) {
  const Eigen::Index n2 = h_bdg.rows();
  if (n2 % 2 != 0) throw DimensionError("zero_dim_invariant: odd dimension");
  const Eigen::Index L = n2 / 2;
  Matrix tau1 = kron(pauli(1), identity(L));
  double scale = std::max(1.0, h_bdg.cwiseAbs().maxCoeff());
  if ((tau1.adjoint() * h_bdg.conjugate() * tau1 + h_bdg).cwiseAbs().maxCoeff() >
      1e-10 * scale)
    throw SpeclocError("zero_dim_invariant: even particle-hole relation violated");

  ZeroDimResult out;
  Matrix tau3 = kron(pauli(3), identity(L));
  out.eta = operator_norm(Matrix(h_bdg * tau3 - tau3 * h_bdg));
  out.gap = extremal_singular_values(h_bdg).smallest;
  if (enforce_precondition && !(out.eta < 2 * out.gap))
    throw SpeclocError("zero_dim_invariant: eta >= 2g precondition violated");

  Matrix h = h_bdg.topLeftCorner(L, L);
  double hgap = extremal_singular_values(h).smallest;
  if (!(hgap > 0))
    throw NearSingularError("zero_dim_invariant: h not invertible");

  Matrix tc = kron(cayley2(), identity(L));
  Matrix maj = tc.adjoint() * h_bdg * tc;
  if (maj.real().cwiseAbs().maxCoeff() > 1e-10 * scale ||
      (maj + maj.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw SpeclocError("zero_dim_invariant: Majorana form violated");
  out.pf_sign = pfaffian_sign(Eigen::MatrixXd((I * maj).real()));

  long sig = hermitian_signature(h).signature;
  long expo = (L * L + sig) / 2;
  out.formula_sign = (expo % 2 == 0) ? 1 : -1;
  return out;
}

}  // namespace specloc
