#pragma once

#include <vector>

#include "specloc/clifford.hpp"
#include "specloc/lattice_op.hpp"

namespace specloc {

// Position-diagonal Dirac operator sum_i X_i (x) 1_L (x) gamma_i on a window,
// with the off-diagonal part D0 extracted in the grading for even d.
struct DiracData {
  CliffordRep rep;
  int fiber_L = 1;
  BlockLatticeOperator D;                  // fiber L * d'
  std::optional<BlockLatticeOperator> D0;  // even d; fiber L * d'/2
};

inline DiracData build_dirac(const CliffordRep& rep, int fiber_L,
                             Window window) {
  DiracData out;
  out.rep = rep;
  out.fiber_L = fiber_L;
  const int d = rep.d;
  BlockLatticeOperator D(window, fiber_L * rep.dprime);
  std::optional<BlockLatticeOperator> D0;
  if (d % 2 == 0) D0.emplace(window, fiber_L * rep.dprime / 2);
  for (const Site& s : window.sites()) {
    std::vector<double> x(d);
    for (int i = 0; i < d; ++i) x[i] = s[i];
    Matrix block = rep.site_block(x);
    D.add_entry(s, s, kron(identity(fiber_L), block));
    if (D0) {
      int h = rep.dprime / 2;
      Matrix upper = block.block(0, h, h, h);
      D0->add_entry(s, s, kron(identity(fiber_L), upper));
    }
  }
  D.set_hermitian(true);
  out.D = std::move(D);
  out.D0 = std::move(D0);
  return out;
}

struct HardyData {
  Matrix E;  // chi(D >= 0) on the ball; the origin's full fiber is in E
  Matrix F;  // even d: unitary phase per site, F(0) = 1
  std::vector<Site> sites;
};

// E = chi(D >= 0) compressed to the ball, computed per site from the exact
// identity D(x)^2 = |x|^2: E(x) = (1 + D(x)/|x|)/2 away from the origin.
inline HardyData hardy_data(const DiracData& dd, double rho) {
  const CliffordRep& rep = dd.rep;
  const int d = rep.d;
  const int fiber = dd.fiber_L * rep.dprime;
  HardyData out;
  out.sites = ball_sites(d, rho);
  for (const Site& s : out.sites)
    if (!dd.D.window().contains(s))
      throw SpeclocError("hardy_data: ball exceeds window");
  const std::size_t n = out.sites.size();
  out.E = Matrix::Zero(n * fiber, n * fiber);
  int h = rep.dprime / 2;
  int hfiber = dd.fiber_L * h;
  if (d % 2 == 0) out.F = Matrix::Zero(n * hfiber, n * hfiber);
  for (std::size_t i = 0; i < n; ++i) {
    const Site& s = out.sites[i];
    double r = s.norm();
    Matrix e;
    if (r == 0.0) {
      e = identity(fiber);
    } else {
      e = 0.5 * (identity(fiber) + dd.D.entry(s, s) / r);
    }
    out.E.block(i * fiber, i * fiber, fiber, fiber) = e;
    if (d % 2 == 0) {
      Matrix f;
      if (r == 0.0) {
        f = identity(hfiber);
      } else {
        f = dd.D0->entry(s, s) / r;
      }
      out.F.block(i * hfiber, i * hfiber, hfiber, hfiber) = f;
    }
  }
  return out;
}

}  // namespace specloc
