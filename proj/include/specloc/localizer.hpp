#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specloc/dirac.hpp"
#include "specloc/kernels.hpp"
#include "specloc/symmetry.hpp"

namespace specloc {

enum class Variant {
  OddStandard,
  EvenStandard,
  OddTwistedChiral,
  OddReduced,
  EvenTwistedConservation,
  OddTwistedCommuting_i,
  OddTwistedCommuting_ii,
};

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::OddStandard: return "OddStandard";
    case Variant::EvenStandard: return "EvenStandard";
    case Variant::OddTwistedChiral: return "OddTwistedChiral";
    case Variant::OddReduced: return "OddReduced";
    case Variant::EvenTwistedConservation: return "EvenTwistedConservation";
    case Variant::OddTwistedCommuting_i: return "OddTwistedCommuting_i";
    case Variant::OddTwistedCommuting_ii: return "OddTwistedCommuting_ii";
  }
  return "?";
}

inline bool variant_is_twisted(Variant v) {
  return v == Variant::OddTwistedChiral ||
         v == Variant::EvenTwistedConservation ||
         v == Variant::OddTwistedCommuting_i ||
         v == Variant::OddTwistedCommuting_ii;
}

inline int variant_factor(Variant v) { return variant_is_twisted(v) ? 4 : 2; }

struct LocalizerSpec {
  Variant variant = Variant::OddStandard;
  std::optional<double> kappa;  // empty: empirical default
  std::optional<double> rho;
  bool strict_mode = false;
  double empirical_gap_fraction = 0.25;  // accept when localizer gap >= g/4
};

// Hamiltonian data in the normal-form basis of the relevant grading: the
// grading operator is diag(1,-1) with the + block first, A is the upper-right
// block and Hp/Hm the diagonal blocks.
struct GradedOperator {
  int d = 1;
  BlockLatticeOperator H;
  std::optional<BlockLatticeOperator> A, Hp, Hm;
  double g = 0;       // invertibility gap (bulk estimator)
  double eta = 0;     // residual of the approximate law (0 when exact)
  double norm_H = 0;  // ||H||
};

// Normal form relative to a fiber involution: rotate so the grading operator
// becomes diag(1,-1) and slice the blocks. A commuting secondary involution
// (for the commuting-law variants, where the block A keeps a nu grading) can
// be passed so the rotation preserves it as diag(1,-1) inside each block.
inline GradedOperator grade_operator(const BlockLatticeOperator& h,
                                     const Matrix& grading_op, int d, double g,
                                     double eta,
                                     const Matrix* secondary = nullptr) {
  Grading gr = secondary ? grading_basis_pair(grading_op, *secondary)
                         : grading_basis(grading_op);
  GradedOperator out;
  out.d = d;
  out.H = h.fiber_sandwich(gr.rotation, gr.rotation);
  out.g = g;
  out.eta = eta;
  out.norm_H = operator_norm(h.window_sparse());
  int half = gr.half;
  BlockLatticeOperator a(h.window(), half), hp(h.window(), half),
      hm(h.window(), half);
  for (const auto& [k, b] : out.H.entries()) {
    Site x = out.H.site_of(k.first), y = out.H.site_of(k.second);
    Matrix ba = b.topRightCorner(half, half);
    Matrix bp = b.topLeftCorner(half, half);
    Matrix bm = b.bottomRightCorner(half, half);
    if (ba.cwiseAbs().maxCoeff() > 0) a.add_entry(x, y, ba);
    if (bp.cwiseAbs().maxCoeff() > 0) hp.add_entry(x, y, bp);
    if (bm.cwiseAbs().maxCoeff() > 0) hm.add_entry(x, y, bm);
  }
  hp.set_hermitian(true);
  hm.set_hermitian(true);
  out.A = std::move(a);
  out.Hp = std::move(hp);
  out.Hm = std::move(hm);
  return out;
}

// || [D, B] || with the Clifford factor appended: sum_i [X_i, B] (x) gamma_i,
// assembled from (x - y)-weighted hopping blocks, then normed. use_half
// selects the off-diagonal Dirac blocks (even d).
inline double dirac_commutator_norm(const BlockLatticeOperator& b,
                                    const CliffordRep& rep, bool use_half) {
  BlockLatticeOperator sum(b.window(),
                           b.fiber_dim() * (use_half ? rep.dprime / 2 : rep.dprime));
  for (int i = 0; i < rep.d; ++i) {
    Matrix cf = use_half ? rep.half_block(i) : rep.gammas[i];
    sum = sum + b.position_commutator(i).tensor_right(cf);
  }
  return operator_norm(sum.window_sparse());
}

enum class AdmissibilityVerdict { Strict, Empirical, Violated };

inline std::string verdict_name(AdmissibilityVerdict v) {
  switch (v) {
    case AdmissibilityVerdict::Strict: return "strict";
    case AdmissibilityVerdict::Empirical: return "empirical";
    case AdmissibilityVerdict::Violated: return "violated";
  }
  return "?";
}

struct Admissibility {
  AdmissibilityVerdict verdict = AdmissibilityVerdict::Violated;
  double kappa_max = 0;
  double rho_min = 0;
  double eta_max = std::numeric_limits<double>::infinity();
  double kappa_margin = 0;  // kappa_max - kappa
  double rho_margin = 0;    // rho - rho_min (must be strictly positive)
  double eta_margin = 0;    // eta_max - eta
  double commutator_norm = 0;
};

// A priori bounds per variant. The standard variants use
// kappa <= g^3 / (12 ||H|| ||[D,.]||) and rho > 2g/kappa; the twisted ones
// kappa <= 2 g^3 / (81 ||H|| ||[D,.]||), rho > 8g/(3 kappa), eta < 2g/3.
inline Admissibility admissibility_bounds(const GradedOperator& op,
                                          const CliffordRep& rep, double kappa,
                                          double rho, Variant variant) {
  Admissibility adm;
  const double g = op.g;
  switch (variant) {
    case Variant::OddStandard: {
      adm.commutator_norm = dirac_commutator_norm(*op.A, rep, false);
      adm.kappa_max = g * g * g / (12 * op.norm_H * adm.commutator_norm);
      adm.rho_min = 2 * g / kappa;
      break;
    }
    case Variant::EvenStandard: {
      adm.commutator_norm = dirac_commutator_norm(op.H, rep, true);
      adm.kappa_max = g * g * g / (12 * op.norm_H * adm.commutator_norm);
      adm.rho_min = 2 * g / kappa;
      break;
    }
    case Variant::OddTwistedChiral:
    case Variant::OddReduced:
    case Variant::OddTwistedCommuting_i:
    case Variant::OddTwistedCommuting_ii: {
      adm.commutator_norm = dirac_commutator_norm(*op.A, rep, false);
      adm.kappa_max = 2 * g * g * g / (81 * op.norm_H * adm.commutator_norm);
      adm.rho_min = 8 * g / (3 * kappa);
      adm.eta_max = 2 * g / 3;
      break;
    }
    case Variant::EvenTwistedConservation: {
      double cp = dirac_commutator_norm(*op.Hp, rep, false);
      double cm = dirac_commutator_norm(*op.Hm, rep, false);
      adm.commutator_norm = std::max(cp, cm);
      adm.kappa_max = 2 * g * g * g / (81 * op.norm_H * adm.commutator_norm);
      adm.rho_min = 8 * g / (3 * kappa);
      adm.eta_max = 2 * g / 3;
      break;
    }
  }
  adm.kappa_margin = adm.kappa_max - kappa;
  adm.rho_margin = rho - adm.rho_min;
  adm.eta_margin = adm.eta_max - op.eta;
  bool strict = kappa <= adm.kappa_max && rho > adm.rho_min &&
                (adm.eta_max == std::numeric_limits<double>::infinity() ||
                 op.eta < adm.eta_max);
  adm.verdict =
      strict ? AdmissibilityVerdict::Strict : AdmissibilityVerdict::Violated;
  return adm;
}

inline Admissibility admissibility(const GradedOperator& op,
                                   const CliffordRep& rep, double kappa,
                                   double rho, Variant variant,
                                   std::optional<double> localizer_gap = {},
                                   double empirical_fraction = 0.25) {
  Admissibility adm = admissibility_bounds(op, rep, kappa, rho, variant);
  if (adm.verdict == AdmissibilityVerdict::Violated && localizer_gap &&
      *localizer_gap >= empirical_fraction * op.g)
    adm.verdict = AdmissibilityVerdict::Empirical;
  return adm;
}

namespace detail {

// Dense position-diagonal Dirac factor over the ball: per site
// twist (x) sum_i x_i gamma_i (or the off-diagonal part for half = true).
inline Matrix dirac_ball(const CliffordRep& rep, const std::vector<Site>& sites,
                         const Matrix& twist, bool half) {
  int gdim = half ? rep.dprime / 2 : rep.dprime;
  Eigen::Index fiber = twist.rows() * gdim;
  Matrix out = Matrix::Zero(sites.size() * fiber, sites.size() * fiber);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<double> x(rep.d);
    for (int a = 0; a < rep.d; ++a) x[a] = sites[i][a];
    Matrix blk = rep.site_block(x);
    if (half) blk = blk.block(0, gdim, gdim, gdim).eval();
    out.block(i * fiber, i * fiber, fiber, fiber) = kron(twist, blk);
  }
  return out;
}

inline Matrix two_by_two(const Matrix& a11, const Matrix& a12,
                         const Matrix& a21, const Matrix& a22) {
  Eigen::Index n = a11.rows();
  Matrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a11;
  out.topRightCorner(n, n) = a12;
  out.bottomLeftCorner(n, n) = a21;
  out.bottomRightCorner(n, n) = a22;
  return out;
}

}  // namespace detail

// Compressed localizer matrix of the requested variant. The outer 2x2
// super-structure is the doubling written in the defining block formulas;
// inside each block the fiber order is (sites) x (fiber) x (Clifford).
inline Matrix assemble_localizer(Variant variant, const GradedOperator& op,
                                 const CliffordRep& rep, double kappa,
                                 double rho) {
  const std::vector<Site> sites = ball_sites(op.d, rho);
  for (const Site& s : sites)
    if (!op.H.window().contains(s))
      throw SpeclocError("assemble_localizer: ball exceeds window");
  Matrix loc;
  switch (variant) {
    case Variant::OddStandard: {
      if (rep.d % 2 == 0)
        throw SpeclocError("OddStandard: odd dimension required");
      Matrix a = op.A->tensor_right(identity(rep.dprime)).dense_on(sites);
      Matrix dk = kappa * detail::dirac_ball(rep, sites,
                                             identity(op.A->fiber_dim()), false);
      loc = detail::two_by_two(dk, a, a.adjoint(), -dk);
      break;
    }
    case Variant::EvenStandard: {
      if (rep.d % 2 != 0)
        throw SpeclocError("EvenStandard: even dimension required");
      Matrix h = op.H.tensor_right(identity(rep.dprime / 2)).dense_on(sites);
      Matrix d0 =
          kappa * detail::dirac_ball(rep, sites, identity(op.H.fiber_dim()), true);
      loc = detail::two_by_two(h, d0, d0.adjoint(), -h);
      break;
    }
    case Variant::OddTwistedChiral: {
      if (rep.d % 2 == 0)
        throw SpeclocError("OddTwistedChiral: odd dimension required");
      int half = op.H.fiber_dim() / 2;
      Matrix s3 = Matrix::Zero(2 * half, 2 * half);
      s3.topLeftCorner(half, half) = identity(half);
      s3.bottomRightCorner(half, half) = -identity(half);
      Matrix h = op.H.tensor_right(identity(rep.dprime)).dense_on(sites);
      Matrix dk = kappa * detail::dirac_ball(rep, sites, s3, false);
      loc = detail::two_by_two(dk, h, h, dk);
      break;
    }
    case Variant::OddReduced: {
      if (rep.d % 2 == 0)
        throw SpeclocError("OddReduced: odd dimension required");
      Matrix a = op.A->tensor_right(identity(rep.dprime)).dense_on(sites);
      Matrix hp = op.Hp->tensor_right(identity(rep.dprime)).dense_on(sites);
      Matrix hm = op.Hm->tensor_right(identity(rep.dprime)).dense_on(sites);
      Matrix dk = kappa * detail::dirac_ball(rep, sites,
                                             identity(op.A->fiber_dim()), false);
      loc = detail::two_by_two(hp + dk, a, a.adjoint(), hm - dk);
      break;
    }
    case Variant::EvenTwistedConservation: {
      if (rep.d % 2 != 0)
        throw SpeclocError("EvenTwistedConservation: even dimension required");
      // Conservation-weighted even localizer: the grading weight S turns H
      // into (SH + HS)/2 = diag(H+, -H-), so the two conserved sectors enter
      // with opposite orientation and the half-signature counts their index
      // difference. The off-diagonal law-breaking block cancels in the
      // symmetrization; its size only enters through the eta threshold.
      int half = op.H.fiber_dim() / 2;
      Matrix s3 = Matrix::Zero(2 * half, 2 * half);
      s3.topLeftCorner(half, half) = identity(half);
      s3.bottomRightCorner(half, half) = -identity(half);
      BlockLatticeOperator w(op.H.window(), op.H.fiber_dim());
      for (const auto& [k, b] : op.H.entries())
        w.add_entry(op.H.site_of(k.first), op.H.site_of(k.second),
                    0.5 * (s3 * b + b * s3));
      w.set_hermitian(true);
      Matrix wd = w.tensor_right(identity(rep.dprime / 2)).dense_on(sites);
      Matrix d0 =
          kappa * detail::dirac_ball(rep, sites, identity(op.H.fiber_dim()), true);
      loc = detail::two_by_two(wd, d0, d0.adjoint(), -wd);
      break;
    }
    case Variant::OddTwistedCommuting_i:
    case Variant::OddTwistedCommuting_ii: {
      if (rep.d % 2 == 0)
        throw SpeclocError("OddTwistedCommuting: odd dimension required");
      // A carries the commuting-law grading (nu) outermost in its fiber.
      int half = op.A->fiber_dim() / 2;
      if (half == 0)
        throw SpeclocError("OddTwistedCommuting: A lacks the nu grading");
      Matrix n3 = Matrix::Zero(2 * half, 2 * half);
      n3.topLeftCorner(half, half) = identity(half);
      n3.bottomRightCorner(half, half) = -identity(half);
      Matrix a = op.A->tensor_right(identity(rep.dprime)).dense_on(sites);
      Matrix dk = kappa * detail::dirac_ball(rep, sites, n3, false);
      double lower = variant == Variant::OddTwistedCommuting_i ? 1.0 : -1.0;
      loc = detail::two_by_two(dk, a, a.adjoint(), lower * dk);
      break;
    }
  }
  double scale = std::max(1.0, loc.cwiseAbs().maxCoeff());
  if ((loc - loc.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw SpeclocError("assemble_localizer: result not hermitian");
  return loc;
}

// Empirical defaults: kappa = g / (2 ||[D,.]|| rho) clipped to [1e-3, 1];
// rho = max(2g/kappa + 1, 12) when not user-pinned.
inline std::pair<double, double> default_parameters(
    const GradedOperator& op, const CliffordRep& rep, Variant variant,
    std::optional<double> kappa_user, std::optional<double> rho_user) {
  double comm;
  if (variant == Variant::EvenStandard)
    comm = dirac_commutator_norm(op.H, rep, true);
  else if (variant == Variant::EvenTwistedConservation)
    comm = std::max(dirac_commutator_norm(*op.Hp, rep, false),
                    dirac_commutator_norm(*op.Hm, rep, false));
  else
    comm = dirac_commutator_norm(*op.A, rep, false);
  double rho0 = rho_user.value_or(12.0);
  double kappa = kappa_user.value_or(
      std::clamp(op.g / (2 * comm * rho0), 1e-3, 1.0));
  double rho = rho_user.value_or(std::max(2 * op.g / kappa + 1.0, 12.0));
  return {kappa, rho};
}

struct InvariantReport {
  std::string variant;
  long signature = 0;
  long invariant = 0;
  int z2 = 0;
  std::string admissibility;  // strict / empirical / violated
  double localizer_gap = 0;
  double eta = 0, g = 0, kappa = 0, rho = 0;
  long matrix_dim = 0;
  std::vector<std::string> warnings;
};

// Full pipeline: admissibility, assembly, signature, division by the variant
// factor, parity. The gap certificate min|eig(L)| >= g/2 is asserted in
// strict mode and logged otherwise.
inline InvariantReport invariant(const LocalizerSpec& spec,
                                 const GradedOperator& op,
                                 const CliffordRep& rep) {
  if (!(op.g > 1e-8)) throw GapClosedError("invariant: not an insulator");
  auto [kappa, rho] =
      default_parameters(op, rep, spec.variant, spec.kappa, spec.rho);
  InvariantReport rep_out;
  rep_out.variant = variant_name(spec.variant);
  rep_out.eta = op.eta;
  rep_out.g = op.g;
  rep_out.kappa = kappa;
  rep_out.rho = rho;

  Matrix loc = assemble_localizer(spec.variant, op, rep, kappa, rho);
  rep_out.matrix_dim = loc.rows();
  HermitianExtremes ext = hermitian_extremes_sparse(loc.sparseView());
  rep_out.localizer_gap = ext.min_abs;

  Admissibility adm =
      admissibility(op, rep, kappa, rho, spec.variant, rep_out.localizer_gap,
                    spec.empirical_gap_fraction);
  rep_out.admissibility = verdict_name(adm.verdict);
  if (spec.strict_mode && adm.verdict != AdmissibilityVerdict::Strict)
    throw SpeclocError("invariant: strict mode requires strict admissibility");

  if (adm.verdict == AdmissibilityVerdict::Strict) {
    double bound = op.g / 2 - 1e-8 * ext.max_abs;
    if (rep_out.localizer_gap < bound)
      throw SpeclocError("invariant: localizer gap certificate violated");
  } else if (rep_out.localizer_gap < op.g / 2) {
    rep_out.warnings.push_back("localizer gap below g/2 (empirical mode)");
  }

  SignatureResult sig = hermitian_signature(loc);
  rep_out.signature = sig.signature;
  int factor = variant_factor(spec.variant);
  if (rep_out.signature % factor != 0) {
    rep_out.warnings.push_back("signature not divisible by " +
                               std::to_string(factor));
    rep_out.invariant =
        static_cast<long>(std::lround(double(rep_out.signature) / factor));
  } else {
    rep_out.invariant = rep_out.signature / factor;
  }
  rep_out.z2 = static_cast<int>(((rep_out.invariant % 2) + 2) % 2);
  return rep_out;
}

// Signatures along a path of gapped operators; the gap and (for twisted
// variants) the residual threshold are checked pointwise, and constancy of
// the signature is asserted.
inline std::vector<long> homotopy_scan(const std::vector<GradedOperator>& path,
                                       const LocalizerSpec& spec,
                                       const CliffordRep& rep) {
  std::vector<long> sigs;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const GradedOperator& op = path[i];
    if (!(op.g > 1e-6))
      throw GapClosedError("homotopy_scan: gap closes along path at index " +
                           std::to_string(i));
    if (variant_is_twisted(spec.variant) && !(op.eta < 2 * op.g / 3))
      throw SpeclocError("homotopy_scan: eta threshold violated at index " +
                         std::to_string(i));
    auto [kappa, rho] =
        default_parameters(op, rep, spec.variant, spec.kappa, spec.rho);
    Matrix loc = assemble_localizer(spec.variant, op, rep, kappa, rho);
    sigs.push_back(hermitian_signature(loc).signature);
  }
  for (long s : sigs)
    if (s != sigs.front())
      throw SpeclocError("homotopy_scan: signature not constant along path");
  return sigs;
}

}  // namespace specloc
