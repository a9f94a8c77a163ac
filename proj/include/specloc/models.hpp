#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "specloc/localizer.hpp"
#include "specloc/oracles.hpp"

namespace specloc {

namespace detail {

// Deterministic across platforms: raw 53-bit mantissa draws, Box-Muller for
// normals. Never std::*_distribution (implementation-defined streams).
struct DetRng {
  std::mt19937_64 eng;
  explicit DetRng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return (eng() >> 11) * 0x1p-53; }
  double symmetric(double width) { return (uniform() - 0.5) * width; }
  double gauss() {
    double u1 = std::max(uniform(), 1e-16), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * M_PI * u2);
  }
  cplx cgauss() { return cplx(gauss(), gauss()) / std::sqrt(2.0); }
};

}  // namespace detail

struct ModelInstance {
  std::string name;
  std::map<std::string, double> parameters;
  int d = 1;
  FiberLayout layout;
  Window window;
  std::vector<Hopping> hoppings;
  std::vector<std::tuple<Site, Site, Matrix>> disorder_terms;  // directed
  BlockLatticeOperator real_space;
  std::optional<BlochClosure> bloch;
  std::vector<SymmetrySpec> declared;
  double disorder_W = 0;
  std::uint64_t seed = 0;

  Variant default_variant = Variant::OddStandard;
  std::optional<Matrix> pipeline_grading;  // fiber involution for block form
  std::string grading_label;

  const SymmetrySpec* approximate_law() const {
    for (const auto& s : declared)
      if (s.kind == SymmetryKind::ApproxChiral ||
          s.kind == SymmetryKind::ApproxConservation)
        return &s;
    return nullptr;
  }
};

namespace detail {

inline void materialize(ModelInstance& m) {
  m.real_space = assemble(m.hoppings, m.window, true);
  for (const auto& [x, y, b] : m.disorder_terms) {
    if (x == y) {
      m.real_space.add_entry(x, x, 0.5 * (b + Matrix(b.adjoint())));
    } else {
      m.real_space.add_entry(x, y, b);
      m.real_space.add_entry(y, x, b.adjoint());
    }
  }
  m.real_space.set_hermitian(true);
  if (m.disorder_W == 0.0)
    m.bloch = BlochClosure{m.d, m.layout.dim(), m.hoppings, true};
  // Declared exact symmetries must hold at assembly precision.
  double scale = std::max(1.0, operator_norm(m.real_space.window_sparse()));
  for (const auto& s : m.declared)
    if (s.declared_exact && residual(m.real_space, s) > 1e-12 * scale)
      throw SpeclocError(m.name + ": declared exact symmetry violated");
}

}  // namespace detail

// Periodic closure of the (possibly disordered) model on the window torus of
// side 2n+1 per axis; the bulk-gap estimator for disordered samples.
inline SparseMatrix torus_sparse(const ModelInstance& m) {
  const int n = m.window.n;
  const int side = 2 * n + 1;
  const int fiber = m.layout.dim();
  std::vector<Site> sites = m.window.sites();
  std::map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < sites.size(); ++i) index[sites[i].key()] = i;
  auto wrapped = [&](Site s) {
    for (int i = 0; i < m.d; ++i) {
      while (s.x[i] > n) s.x[i] -= side;
      while (s.x[i] < -n) s.x[i] += side;
    }
    return s;
  };
  std::vector<Eigen::Triplet<cplx>> trips;
  auto put = [&](std::size_t r, std::size_t c, const Matrix& b) {
    for (int i = 0; i < fiber; ++i)
      for (int j = 0; j < fiber; ++j)
        if (b(i, j) != cplx(0.0))
          trips.emplace_back(r * fiber + i, c * fiber + j, b(i, j));
  };
  for (const Site& x : sites) {
    for (const auto& h : m.hoppings) {
      Site y = x;
      bool zero_offset = true;
      for (int i = 0; i < m.d; ++i) {
        y.x[i] += h.offset[i];
        zero_offset = zero_offset && h.offset[i] == 0;
      }
      y = wrapped(y);
      if (zero_offset) {
        put(index.at(x.key()), index.at(x.key()),
            0.5 * (h.block + Matrix(h.block.adjoint())));
      } else {
        put(index.at(y.key()), index.at(x.key()), h.block);
        put(index.at(x.key()), index.at(y.key()), h.block.adjoint());
      }
    }
  }
  for (const auto& [x, y, b] : m.disorder_terms) {
    if (x == y) {
      put(index.at(x.key()), index.at(x.key()), 0.5 * (b + Matrix(b.adjoint())));
    } else {
      put(index.at(x.key()), index.at(y.key()), b);
      put(index.at(y.key()), index.at(x.key()), b.adjoint());
    }
  }
  SparseMatrix out(sites.size() * fiber, sites.size() * fiber);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// Invertibility gap. Clean periodic models use the Bloch minimum (preferred);
// disordered samples the periodic-torus spectrum, so open-boundary edge modes
// never masquerade as gap closings.
inline double model_gap(const ModelInstance& m) {
  if (m.bloch) {
    int grid = m.d == 1 ? 512 : 128;
    double g = m.bloch->gap_on_grid(grid);
    if (g < 1e-8) throw GapClosedError(m.name + ": not an insulator");
    return g;
  }
  double g = min_abs_eig_hermitian(torus_sparse(m));
  if (g < 1e-8) throw GapClosedError(m.name + ": not an insulator");
  return g;
}

// Pipeline glue: measured gap and residual, then the normal-form blocks for
// the model's default grading.
inline GradedOperator graded_for_pipeline(const ModelInstance& m) {
  double g = model_gap(m);
  double eta = 0;
  if (const SymmetrySpec* law = m.approximate_law())
    eta = residual(m.real_space, *law);
  if (m.pipeline_grading)
    return grade_operator(m.real_space, *m.pipeline_grading, m.d, g, eta);
  GradedOperator out;
  out.d = m.d;
  out.H = m.real_space;
  out.g = g;
  out.eta = eta;
  out.norm_H = operator_norm(m.real_space.window_sparse());
  return out;
}

// --- builders ---------------------------------------------------------

inline ModelInstance ssh(double t1, double t2, double W, int n,
                         std::uint64_t seed = 1) {
  ModelInstance m;
  m.name = "ssh";
  m.parameters = {{"t1", t1}, {"t2", t2}, {"W", W}};
  m.d = 1;
  m.layout.slots = {{FiberSlot::Chiral, 2}};
  m.window = {1, n};
  Matrix intra = t1 * pauli(1);
  Matrix inter = t2 * 0.5 * (pauli(1) + I * pauli(2));
  m.hoppings = {{{0}, intra}, {{1}, inter}};
  m.disorder_W = W;
  m.seed = seed;
  if (W > 0) {
    detail::DetRng rng(seed);
    for (const Site& x : m.window.sites()) {
      m.disorder_terms.emplace_back(x, x, rng.symmetric(W) * pauli(1));
      Site y = x;
      y.x[0] += 1;
      if (m.window.contains(y))
        m.disorder_terms.emplace_back(
            y, x, rng.symmetric(W) * 0.5 * (pauli(1) + I * pauli(2)));
    }
  }
  m.declared = {{SymmetryKind::CHS, "sigma3", pauli(3), true}};
  m.default_variant = Variant::OddStandard;
  m.pipeline_grading = pauli(3);
  m.grading_label = "sigma3";
  detail::materialize(m);
  return m;
}

// SSH plus an on-site sigma3 staggering: the chiral relation only holds up to
// eta = 2 epsilon.
inline ModelInstance ssh_perturbed(double t1, double t2, double eps, double W,
                                   int n, std::uint64_t seed = 1) {
  ModelInstance m = ssh(t1, t2, W, n, seed);
  m.name = "ssh_perturbed";
  m.parameters["eps"] = eps;
  m.hoppings[0].block += eps * pauli(3);
  m.declared = {{SymmetryKind::ApproxChiral, "sigma3", pauli(3), false}};
  m.default_variant = Variant::OddTwistedChiral;
  detail::materialize(m);
  return m;
}

inline ModelInstance kitaev_chain(double mu, double t, double delta, double W,
                                  int n, std::uint64_t seed = 1) {
  ModelInstance m;
  m.name = "kitaev_chain";
  m.parameters = {{"mu", mu}, {"t", t}, {"delta", delta}, {"W", W}};
  m.d = 1;
  m.layout.slots = {{FiberSlot::ParticleHole, 2}};
  m.window = {1, n};
  Matrix onsite = -mu * pauli(3);
  Matrix hop = -t * pauli(3) + delta * (I * pauli(2));
  m.hoppings = {{{0}, onsite}, {{1}, hop}};
  m.disorder_W = W;
  m.seed = seed;
  if (W > 0) {
    detail::DetRng rng(seed);
    for (const Site& x : m.window.sites())
      m.disorder_terms.emplace_back(x, x, -rng.symmetric(W) * pauli(3));
  }
  // Real parameters put the chain in the tau1-chiral class as well; chemical
  // potential disorder preserves both relations.
  m.declared = {{SymmetryKind::PHS, "tau1", pauli(1), true},
                {SymmetryKind::CHS, "tau1", pauli(1), true}};
  m.default_variant = Variant::OddStandard;
  m.pipeline_grading = pauli(1);
  m.grading_label = "tau1";
  detail::materialize(m);
  return m;
}

// Two particle-hole chains coupled only through an inter-chain block, so the
// sublattice involution nu3 is an approximate chiral symmetry with eta = 2 eps.
inline ModelInstance kitaev_chain_stacked(double mu, double t, double delta,
                                          double eps, int n,
                                          std::uint64_t seed = 1) {
  ModelInstance m;
  m.name = "kitaev_chain_stacked";
  m.parameters = {{"mu", mu}, {"t", t}, {"delta", delta}, {"eps", eps}};
  m.d = 1;
  m.layout.slots = {{FiberSlot::ParticleHole, 2}, {FiberSlot::Sublattice, 2}};
  m.window = {1, n};
  auto phs_block = [](cplx p, cplx q) {
    Matrix b(2, 2);
    b << p, q, std::conj(q), std::conj(p);
    return Matrix(-I * b);
  };
  Matrix a0 = phs_block(mu, mu);
  Matrix a1 = phs_block(t + delta, I * (t - delta));
  Matrix e01 = 0.5 * (pauli(1) + I * pauli(2));
  Matrix onsite = kron(a0, e01) + kron(a0.adjoint().eval(), e01.adjoint().eval()) +
                  eps * kron(pauli(3), pauli(3));
  Matrix hop = kron(a1, e01);
  m.hoppings = {{{0}, onsite}, {{1}, hop}};
  m.seed = seed;
  Matrix tau1 = m.layout.expand(FiberSlot::ParticleHole, pauli(1));
  Matrix nu3 = m.layout.expand(FiberSlot::Sublattice, pauli(3));
  m.declared = {{SymmetryKind::PHS, "tau1", tau1, true},
                {SymmetryKind::ApproxChiral, "nu3", nu3, false}};
  m.default_variant = Variant::OddTwistedChiral;
  m.pipeline_grading = nu3;
  m.grading_label = "nu3";
  detail::materialize(m);
  return m;
}

inline ModelInstance qwz(double mass, double W, int n, std::uint64_t seed = 1) {
  ModelInstance m;
  m.name = "qwz";
  m.parameters = {{"m", mass}, {"W", W}};
  m.d = 2;
  m.layout.slots = {{FiberSlot::Sublattice, 2}};
  m.window = {2, n};
  Matrix b1 = 0.5 * (pauli(3) + I * pauli(1));
  Matrix b2 = 0.5 * (pauli(3) + I * pauli(2));
  m.hoppings = {{{0, 0}, mass * pauli(3)}, {{1, 0}, b1}, {{0, 1}, b2}};
  m.disorder_W = W;
  m.seed = seed;
  if (W > 0) {
    detail::DetRng rng(seed);
    for (const Site& x : m.window.sites())
      m.disorder_terms.emplace_back(x, x, rng.symmetric(W) * identity(2));
  }
  m.default_variant = Variant::EvenStandard;
  detail::materialize(m);
  return m;
}

// Four-band quantum spin Hall model: two time-reversed copies of the two-band
// Chern block, with a Rashba-type spin-mixing hopping as the only term
// breaking the s3 conservation.
inline ModelInstance bhz_rashba(double mass, double lambda, double W, int n,
                                std::uint64_t seed = 1) {
  ModelInstance m;
  m.name = "bhz_rashba";
  m.parameters = {{"mass", mass}, {"lambda", lambda}, {"W", W}};
  m.d = 2;
  m.layout.slots = {{FiberSlot::Spin, 2}, {FiberSlot::Sublattice, 2}};
  m.window = {2, n};
  Matrix up0 = mass * pauli(3);
  Matrix up1 = 0.5 * (pauli(3) + I * pauli(1));
  Matrix up2 = 0.5 * (pauli(3) + I * pauli(2));
  Matrix e00 = 0.5 * (identity(2) + pauli(3));
  Matrix e11 = 0.5 * (identity(2) - pauli(3));
  auto spinful = [&](const Matrix& b) {
    return Matrix(kron(e00, b) + kron(e11, b.conjugate().eval()));
  };
  Matrix rashba = (I * lambda / 2.0) * kron(pauli(1), identity(2));
  m.hoppings = {{{0, 0}, spinful(up0)},
                {{1, 0}, spinful(up1) + rashba},
                {{0, 1}, spinful(up2)}};
  m.disorder_W = W;
  m.seed = seed;
  if (W > 0) {
    detail::DetRng rng(seed);
    for (const Site& x : m.window.sites())
      m.disorder_terms.emplace_back(x, x, rng.symmetric(W) * identity(4));
  }
  Matrix s2 = m.layout.expand(FiberSlot::Spin, pauli(2));
  Matrix s3 = m.layout.expand(FiberSlot::Spin, pauli(3));
  m.declared = {{SymmetryKind::TRS, "s2", s2, true},
                {SymmetryKind::ApproxConservation, "s3", s3, false}};
  m.default_variant = Variant::EvenTwistedConservation;
  m.pipeline_grading = s3;
  m.grading_label = "s3";
  detail::materialize(m);
  return m;
}

// Finite BdG matrix with the pairing scaled until eta = ||[H, tau3]|| sits
// safely below twice the gap.
inline ModelInstance random_bdg(int bands, double delta_scale,
                                std::uint64_t seed) {
  ModelInstance m;
  m.name = "random_bdg";
  m.parameters = {{"L", double(bands)}, {"delta_scale", delta_scale}};
  m.d = 0;
  m.layout.slots = {{FiberSlot::ParticleHole, 2}, {FiberSlot::Band, bands}};
  m.window = {0, 0};
  m.seed = seed;
  detail::DetRng rng(seed);
  Matrix h(bands, bands);
  while (true) {
    Matrix gm(bands, bands);
    for (int i = 0; i < bands; ++i)
      for (int j = 0; j < bands; ++j) gm(i, j) = rng.cgauss();
    h = 0.5 * (gm + Matrix(gm.adjoint()));
    if (extremal_singular_values(h).smallest > 0.3) break;
  }
  Matrix gm2(bands, bands);
  for (int i = 0; i < bands; ++i)
    for (int j = 0; j < bands; ++j) gm2(i, j) = rng.cgauss();
  Matrix delta = delta_scale * 0.5 * (gm2 - Matrix(gm2.transpose()));
  Matrix hb(2 * bands, 2 * bands);
  auto build = [&](const Matrix& dd) {
    Matrix out(2 * bands, 2 * bands);
    out.topLeftCorner(bands, bands) = h;
    out.topRightCorner(bands, bands) = dd;
    out.bottomLeftCorner(bands, bands) = dd.adjoint();
    out.bottomRightCorner(bands, bands) = -h.conjugate();
    return out;
  };
  hb = build(delta);
  while (2 * operator_norm(delta) >= 1.9 * extremal_singular_values(hb).smallest) {
    delta *= 0.5;
    hb = build(delta);
  }
  BlockLatticeOperator op(m.window, 2 * bands);
  op.add_entry(Site::zero(0), Site::zero(0), hb);
  op.set_hermitian(true);
  m.real_space = op;
  Matrix tau1 = m.layout.expand(FiberSlot::ParticleHole, pauli(1));
  m.declared = {{SymmetryKind::PHS, "tau1", tau1, true}};
  double scale = std::max(1.0, operator_norm(hb));
  if (residual(m.real_space, m.declared[0]) > 1e-12 * scale)
    throw SpeclocError("random_bdg: particle-hole relation violated");
  return m;
}

inline ModelInstance make_model(const std::string& name,
                                const std::map<std::string, double>& p, int n,
                                double W, std::uint64_t seed) {
  auto get = [&](const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
  };
  if (name == "ssh") return ssh(get("t1", 1.0), get("t2", 0.5), W, n, seed);
  if (name == "ssh_perturbed")
    return ssh_perturbed(get("t1", 1.0), get("t2", 0.5), get("eps", 0.1), W, n,
                         seed);
  if (name == "kitaev_chain")
    return kitaev_chain(get("mu", 1.0), get("t", 1.0), get("delta", 1.0), W, n,
                        seed);
  if (name == "kitaev_chain_stacked")
    return kitaev_chain_stacked(get("mu", 1.5), get("t", 1.0),
                                get("delta", 1.0), get("eps", 0.1), n, seed);
  if (name == "qwz") return qwz(get("m", 1.0), W, n, seed);
  if (name == "bhz_rashba")
    return bhz_rashba(get("mass", 1.0), get("lambda", 0.1), W, n, seed);
  if (name == "random_bdg")
    return random_bdg(static_cast<int>(get("L", 2)), get("delta_scale", 0.3),
                      seed);
  throw SpeclocError("make_model: unknown model '" + name + "'");
}

}  // namespace specloc
