#pragma once

#include <numeric>
#include <optional>
#include <vector>

#include "specloc/types.hpp"

namespace specloc {

// Irreducible complex Clifford representation gamma_1..gamma_d of size
// 2^floor(d/2), with gamma_{2i+1} real and gamma_{2i} purely imaginary.
// For even d the extra symmetry gamma_{d+1} is brought to diag(1,-1) form so
// positional Dirac operators are block off-diagonal in its grading.
//
// sigma_op / gamma_op implement the antiunitary symmetries S = sigma_op * conj
// and C = gamma_op * conj of the Dirac operator (S D S^-1 = D, C D C^-1 = -D)
// in the basis rotated by cayley_v; their defined-ness per dimension follows
// the real classification. reduced_sigma is the real symmetry acting on the
// Hardy projection (odd d) or on the Dirac phase / off-diagonal part (even d).
struct CliffordRep {
  int d = 0;
  int dprime = 0;
  std::vector<Matrix> gammas;
  Matrix grading;  // even d only: gamma_{d+1} = diag(1,-1)

  Matrix cayley_v;  // identity except d = 2, 6
  std::optional<Matrix> sigma_op;
  int sigma_sign = 0;  // sigma_op * conj(sigma_op) = sign * 1
  std::optional<Matrix> gamma_op;
  int gamma_sign = 0;

  Matrix reduced_sigma;
  int reduced_square = 0;      // reduced_sigma^2 = sign * 1
  bool reduced_flips = false;  // odd d: relation maps E to 1 - E
  bool reduced_transpose = false;  // even d: transpose relation (else conj)

  Matrix site_block(const std::vector<double>& x) const {
    Matrix b = Matrix::Zero(dprime, dprime);
    for (int i = 0; i < d; ++i) b += x[i] * gammas[i];
    return b;
  }

  // Upper-right block of gamma_i in the grading (even d).
  Matrix half_block(int i) const {
    int h = dprime / 2;
    return gammas[i].block(0, h, h, h);
  }
};

namespace detail {

inline Matrix kron_chain(const std::vector<Matrix>& ms) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& m : ms) out = kron(out, m);
  return out;
}

inline Matrix jw_factor(int m, int slot, const Matrix& op) {
  std::vector<Matrix> chain;
  for (int i = 0; i < m; ++i) {
    if (i < slot)
      chain.push_back(pauli(3));
    else if (i == slot)
      chain.push_back(op);
    else
      chain.push_back(pauli(0));
  }
  return kron_chain(chain);
}

inline double anticomm_residual(const Matrix& a, const Matrix& b) {
  return (a * b + b * a).cwiseAbs().maxCoeff();
}

inline Matrix gamma_subset_product(const std::vector<Matrix>& gs,
                                   unsigned mask) {
  Matrix p = Matrix::Identity(gs[0].rows(), gs[0].rows());
  for (std::size_t i = 0; i < gs.size(); ++i)
    if (mask & (1u << i)) p = p * gs[i];
  return p;
}

}  // namespace detail

inline void verify_clifford(const CliffordRep& rep, double tol = 1e-12);

inline CliffordRep build_clifford(int d) {
  if (d < 1 || d > 8) throw SpeclocError("build_clifford: d must be in 1..8");
  CliffordRep rep;
  rep.d = d;
  int m = d / 2;
  rep.dprime = 1 << m;

  // Jordan-Wigner ladder; reality pattern holds factor by factor.
  std::vector<Matrix> gs;
  for (int k = 0; k < m; ++k) {
    gs.push_back(detail::jw_factor(m, k, pauli(1)));
    gs.push_back(detail::jw_factor(m, k, pauli(2)));
  }
  Matrix grading = detail::jw_factor(m, 0, pauli(3));
  if (m > 0) {
    std::vector<Matrix> chain(m, pauli(3));
    grading = detail::kron_chain(chain);
  } else {
    grading = Matrix::Identity(1, 1);
  }

  if (d % 2 == 0) {
    // Permute the basis so the grading is diag(1,...,1,-1,...,-1); a
    // permutation is real, so the reality pattern survives.
    std::vector<int> order(rep.dprime);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return grading(a, a).real() > grading(b, b).real();
    });
    Matrix perm = Matrix::Zero(rep.dprime, rep.dprime);
    for (int j = 0; j < rep.dprime; ++j) perm(order[j], j) = 1.0;
    for (auto& g : gs) g = perm.adjoint() * g * perm;
    rep.grading = perm.adjoint() * grading * perm;
    rep.gammas = gs;
  } else {
    rep.gammas = gs;
    rep.gammas.push_back(grading);  // real, odd index
  }

  // Reduced symmetry acting on E (odd d) or on F and the off-diagonal Dirac
  // part (even d). Odd d: fixed gamma products, made real by an i where the
  // product is purely imaginary. Even d: deterministic search over monomials
  // of the half-space algebra, first hit wins.
  if (d % 2 == 1) {
    switch (d) {
      case 1:
        rep.reduced_sigma = Matrix::Identity(1, 1);
        rep.reduced_square = 1;
        rep.reduced_flips = false;
        break;
      case 3:
        rep.reduced_sigma = I * rep.gammas[1];
        rep.reduced_square = -1;
        rep.reduced_flips = true;
        break;
      case 5:
        rep.reduced_sigma = rep.gammas[1] * rep.gammas[3];
        rep.reduced_square = -1;
        rep.reduced_flips = false;
        break;
      case 7:
        rep.reduced_sigma = I * rep.gammas[1] * rep.gammas[3] * rep.gammas[5];
        rep.reduced_square = 1;
        rep.reduced_flips = true;
        break;
    }
  } else {
    int h = rep.dprime / 2;
    bool transpose_rel = (d == 2 || d == 6);
    int target_square = (d == 2 || d == 8) ? 1 : -1;
    auto monomials = [&](bool real_orthogonal_only) {
      // Monomials of the half-space algebra generated by the upper blocks of
      // gamma_i gamma_d, with phases 1 and i; deterministic order.
      std::vector<Matrix> gens;
      for (int i = 0; i + 1 < d; ++i) {
        Matrix gd_prod = rep.gammas[i] * rep.gammas[d - 1];
        gens.push_back(gd_prod.topLeftCorner(h, h));
      }
      std::vector<Matrix> out;
      for (unsigned mask = 0; mask < (1u << gens.size()); ++mask) {
        for (cplx phase : {cplx(1, 0), cplx(0, 1)}) {
          Matrix cand = phase * detail::gamma_subset_product(gens, mask);
          if (cand.imag().cwiseAbs().maxCoeff() > 1e-12) continue;
          if (real_orthogonal_only && !is_unitary(cand, 1e-12)) continue;
          out.push_back(cand);
        }
      }
      return out;
    };
    auto search_sigma = [&](const std::vector<Matrix>& blocks,
                            const std::vector<Matrix>& candidates)
        -> std::optional<Matrix> {
      for (const Matrix& cand : candidates) {
        if (!is_unitary(cand, 1e-12)) continue;
        Matrix sq = cand * cand;
        if ((sq - double(target_square) * identity(h)).cwiseAbs().maxCoeff() >
            1e-12)
          continue;
        bool ok = true;
        for (const Matrix& b : blocks) {
          Matrix lhs = transpose_rel
                           ? Matrix(cand.adjoint() * b.transpose() * cand)
                           : Matrix(cand.adjoint() * b.conjugate() * cand);
          if ((lhs - b).cwiseAbs().maxCoeff() > 1e-12) {
            ok = false;
            break;
          }
        }
        if (ok) return cand;
      }
      return std::nullopt;
    };

    std::vector<Matrix> candidates = monomials(false);
    std::vector<Matrix> blocks;
    for (int i = 0; i < d; ++i) blocks.push_back(rep.half_block(i));
    std::optional<Matrix> sigma = search_sigma(blocks, candidates);
    if (!sigma) {
      // The conjugation relation can be obstructed by a scalar imaginary
      // component of the blocks; a real-orthogonal rotation of the lower
      // grading half removes it without touching the reality pattern.
      for (const Matrix& o : monomials(true)) {
        std::vector<Matrix> rotated;
        for (const Matrix& b : blocks) rotated.push_back(Matrix(b * o));
        sigma = search_sigma(rotated, candidates);
        if (sigma) {
          Matrix w = Matrix::Zero(rep.dprime, rep.dprime);
          w.topLeftCorner(h, h) = identity(h);
          w.bottomRightCorner(h, h) = o;
          for (auto& g : rep.gammas) g = w.adjoint() * g * w;
          break;
        }
      }
    }
    if (!sigma)
      throw SpeclocError(
          "build_clifford: no reduced symmetry candidate passed the stated "
          "relations for d = " +
          std::to_string(d) + "; row reported unsupported");
    rep.reduced_sigma = *sigma;
    rep.reduced_square = target_square;
    rep.reduced_transpose = transpose_rel;
  }

  // Real symmetries of the Dirac operator. Products of all even-index or all
  // odd-index generators intertwine D with its conjugate; for d = 2 and 6 the
  // two operators anticommute and a Cayley-type rotation is applied first.
  auto product_of = [&](bool even_indices) {
    Matrix p = Matrix::Identity(rep.dprime, rep.dprime);
    for (int i = 0; i < d; ++i)
      if ((i % 2 == 1) == even_indices) p = p * rep.gammas[i];
    return p;
  };
  rep.cayley_v = Matrix::Identity(rep.dprime, rep.dprime);
  switch (d) {
    case 1:
      rep.sigma_op = Matrix::Identity(1, 1);
      rep.sigma_sign = 1;
      break;
    case 2: {
      int h = rep.dprime / 2;
      Matrix v(rep.dprime, rep.dprime);
      v.topLeftCorner(h, h) = identity(h);
      v.topRightCorner(h, h) = I * identity(h);
      v.bottomLeftCorner(h, h) = identity(h);
      v.bottomRightCorner(h, h) = -I * identity(h);
      rep.cayley_v = v / std::sqrt(2.0);
      rep.sigma_op = Matrix::Identity(rep.dprime, rep.dprime);
      rep.sigma_sign = 1;
      rep.gamma_op = rep.gammas[1];
      rep.gamma_sign = -1;
      break;
    }
    case 3:
      rep.gamma_op = rep.gammas[1];
      rep.gamma_sign = -1;
      break;
    case 4:
      rep.sigma_op = product_of(true);
      rep.sigma_sign = -1;
      rep.gamma_op = product_of(false);
      rep.gamma_sign = -1;
      break;
    case 5:
      rep.sigma_op = rep.gammas[1] * rep.gammas[3];
      rep.sigma_sign = -1;
      break;
    case 6: {
      Matrix g246 = product_of(true);
      rep.cayley_v =
          (Matrix::Identity(rep.dprime, rep.dprime) + g246) / std::sqrt(2.0);
      rep.sigma_op = product_of(false);
      rep.sigma_sign = -1;
      rep.gamma_op = Matrix::Identity(rep.dprime, rep.dprime);
      rep.gamma_sign = 1;
      break;
    }
    case 7:
      rep.gamma_op = product_of(true);
      rep.gamma_sign = 1;
      break;
    case 8:
      rep.sigma_op = product_of(true);
      rep.sigma_sign = 1;
      rep.gamma_op = product_of(false);
      rep.gamma_sign = 1;
      break;
  }

  verify_clifford(rep);
  return rep;
}

// Asserts every representation invariant: anticommutation, reality pattern,
// grading form, and the real-symmetry relations in the rotated basis.
inline void verify_clifford(const CliffordRep& rep, double tol) {
  const int d = rep.d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Matrix ac = rep.gammas[i] * rep.gammas[j] + rep.gammas[j] * rep.gammas[i];
      Matrix expect = (i == j) ? Matrix(2.0 * identity(rep.dprime))
                               : Matrix(Matrix::Zero(rep.dprime, rep.dprime));
      if ((ac - expect).cwiseAbs().maxCoeff() > tol)
        throw SpeclocError("clifford: anticommutation violated");
    }
    bool odd_index = (i % 2 == 0);  // gamma_1, gamma_3, ... are real
    const Matrix& g = rep.gammas[i];
    double off = odd_index ? g.imag().cwiseAbs().maxCoeff()
                           : g.real().cwiseAbs().maxCoeff();
    if (off > tol) throw SpeclocError("clifford: reality pattern violated");
  }
  if (d % 2 == 0) {
    int h = rep.dprime / 2;
    Matrix expect = Matrix::Zero(rep.dprime, rep.dprime);
    expect.topLeftCorner(h, h) = identity(h);
    expect.bottomRightCorner(h, h) = -identity(h);
    if ((rep.grading - expect).cwiseAbs().maxCoeff() > tol)
      throw SpeclocError("clifford: grading not diag(1,-1)");
    for (int i = 0; i < d; ++i)
      if (detail::anticomm_residual(rep.grading, rep.gammas[i]) > tol)
        throw SpeclocError("clifford: grading does not anticommute");
  }

  // Dirac-operator symmetries, checked generator-wise in the rotated basis:
  // sigma: S conj(D') S^-1 = D'; gamma: C conj(D') C^-1 = -D'.
  const Matrix& v = rep.cayley_v;
  auto rotated = [&](int i) { return Matrix(v.adjoint() * rep.gammas[i] * v); };
  if (rep.sigma_op) {
    const Matrix& s = *rep.sigma_op;
    Matrix ssbar = s * s.conjugate();
    if ((ssbar - double(rep.sigma_sign) * identity(rep.dprime))
            .cwiseAbs()
            .maxCoeff() > tol)
      throw SpeclocError("clifford: sigma_op type sign violated");
    for (int i = 0; i < d; ++i) {
      Matrix gi = rotated(i);
      if ((s.adjoint() * gi.conjugate() * s - gi).cwiseAbs().maxCoeff() > tol)
        throw SpeclocError("clifford: sigma_op relation violated");
    }
  }
  if (rep.gamma_op) {
    const Matrix& c = *rep.gamma_op;
    Matrix ccbar = c * c.conjugate();
    if ((ccbar - double(rep.gamma_sign) * identity(rep.dprime))
            .cwiseAbs()
            .maxCoeff() > tol)
      throw SpeclocError("clifford: gamma_op type sign violated");
    for (int i = 0; i < d; ++i) {
      Matrix gi = rotated(i);
      if ((c.adjoint() * gi.conjugate() * c + gi).cwiseAbs().maxCoeff() > tol)
        throw SpeclocError("clifford: gamma_op relation violated");
    }
  }
  if (rep.sigma_op && rep.gamma_op) {
    if ((*rep.sigma_op * *rep.gamma_op - *rep.gamma_op * *rep.sigma_op)
            .cwiseAbs()
            .maxCoeff() > tol)
      throw SpeclocError("clifford: sigma_op and gamma_op do not commute");
  }
  if (rep.reduced_sigma.size() > 0) {
    if (rep.reduced_sigma.imag().cwiseAbs().maxCoeff() > tol)
      throw SpeclocError("clifford: reduced symmetry not real");
    Matrix sq = rep.reduced_sigma * rep.reduced_sigma;
    if ((sq - double(rep.reduced_square) * identity(sq.rows()))
            .cwiseAbs()
            .maxCoeff() > tol)
      throw SpeclocError("clifford: reduced symmetry square violated");
  }
}

}  // namespace specloc
