#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "specloc/site.hpp"
#include "specloc/types.hpp"

namespace specloc {

// Where a fiber factor sits in the canonical tensor order. The order is fixed
// globally as (lattice) x ParticleHole x Spin x Sublattice x Chiral x Clifford;
// every symmetry operator and basis change is expanded in this order.
enum class FiberSlot { ParticleHole, Spin, Sublattice, Chiral, Band, Clifford };

struct FiberExtension {
  Matrix factor;
  FiberSlot placement = FiberSlot::Chiral;
};

// A finitely supported operator on l^2(Z^d, C^L) restricted to a window.
// Entries are stored per site pair; everything is immutable after assembly.
class BlockLatticeOperator {
 public:
  using Key = std::pair<std::uint64_t, std::uint64_t>;

  BlockLatticeOperator() = default;
  BlockLatticeOperator(Window window, int fiber_dim)
      : window_(window), fiber_dim_(fiber_dim) {}

  const Window& window() const { return window_; }
  int dim() const { return window_.d; }
  int fiber_dim() const { return fiber_dim_; }
  bool hermitian_flag() const { return hermitian_; }
  int range() const { return range_; }

  const std::map<Key, Matrix>& entries() const { return entries_; }

  void add_entry(const Site& x, const Site& y, const Matrix& block) {
    if (block.rows() != fiber_dim_ || block.cols() != fiber_dim_)
      throw DimensionError("BlockLatticeOperator: block size mismatch");
    if (!window_.contains(x) || !window_.contains(y)) return;  // open boundary
    Matrix& e = entries_[{x.key(), y.key()}];
    if (e.size() == 0)
      e = block;
    else
      e += block;
    int r = static_cast<int>(std::ceil((x - y).norm() - 1e-12));
    range_ = std::max(range_, r);
    sites_[x.key()] = x;
    sites_[y.key()] = y;
  }

  Matrix entry(const Site& x, const Site& y) const {
    auto it = entries_.find({x.key(), y.key()});
    if (it == entries_.end()) return Matrix::Zero(fiber_dim_, fiber_dim_);
    return it->second;
  }

  Site site_of(std::uint64_t key) const { return sites_.at(key); }

  void set_hermitian(bool h) { hermitian_ = h; }

  BlockLatticeOperator adjoint() const {
    BlockLatticeOperator out(window_, fiber_dim_);
    for (const auto& [k, b] : entries_)
      out.add_entry(site_of(k.second), site_of(k.first), b.adjoint());
    out.hermitian_ = hermitian_;
    return out;
  }

  BlockLatticeOperator conjugate() const {
    BlockLatticeOperator out(window_, fiber_dim_);
    for (const auto& [k, b] : entries_)
      out.add_entry(site_of(k.first), site_of(k.second), b.conjugate());
    return out;
  }

  BlockLatticeOperator operator*(cplx c) const {
    BlockLatticeOperator out(window_, fiber_dim_);
    for (const auto& [k, b] : entries_)
      out.add_entry(site_of(k.first), site_of(k.second), c * b);
    return out;
  }

  BlockLatticeOperator operator+(const BlockLatticeOperator& o) const {
    if (o.fiber_dim_ != fiber_dim_ || o.window_.d != window_.d)
      throw DimensionError("operator+: incompatible operators");
    BlockLatticeOperator out(window_, fiber_dim_);
    for (const auto& [k, b] : entries_)
      out.add_entry(site_of(k.first), site_of(k.second), b);
    for (const auto& [k, b] : o.entries_)
      out.add_entry(o.site_of(k.first), o.site_of(k.second), b);
    return out;
  }

  BlockLatticeOperator operator-(const BlockLatticeOperator& o) const {
    return *this + o * cplx(-1.0, 0.0);
  }

  BlockLatticeOperator compose(const BlockLatticeOperator& o) const {
    if (o.fiber_dim_ != fiber_dim_ || o.window_.d != window_.d)
      throw DimensionError("compose: incompatible operators");
    // Index o's entries by left site for the sum over the intermediate site.
    std::map<std::uint64_t, std::vector<const std::pair<const Key, Matrix>*>> by_left;
    for (const auto& kv : o.entries_) by_left[kv.first.first].push_back(&kv);
    BlockLatticeOperator out(window_, fiber_dim_);
    for (const auto& [k, b] : entries_) {
      auto it = by_left.find(k.second);
      if (it == by_left.end()) continue;
      for (const auto* kv : it->second)
        out.add_entry(site_of(k.first), o.site_of(kv->first.second),
                      b * kv->second);
    }
    return out;
  }

  // Fiber-level sandwich U^* (.) V; U, V must be fiber_dim x fiber_dim.
  BlockLatticeOperator fiber_sandwich(const Matrix& u, const Matrix& v) const {
    if (u.rows() != fiber_dim_ || v.rows() != fiber_dim_)
      throw DimensionError("fiber_sandwich: size mismatch");
    BlockLatticeOperator out(window_, fiber_dim_);
    for (const auto& [k, b] : entries_)
      out.add_entry(site_of(k.first), site_of(k.second), u.adjoint() * b * v);
    out.hermitian_ = hermitian_;
    return out;
  }

  // Kronecker-extend each block on the right: B -> B (x) f. With the lattice
  // factor leftmost this appends a new innermost fiber factor.
  BlockLatticeOperator tensor_right(const Matrix& f) const {
    BlockLatticeOperator out(window_, static_cast<int>(fiber_dim_ * f.rows()));
    for (const auto& [k, b] : entries_)
      out.add_entry(site_of(k.first), site_of(k.second), kron(b, f));
    out.hermitian_ = hermitian_ && is_hermitian(f);
    return out;
  }

  BlockLatticeOperator tensor_left(const Matrix& f) const {
    BlockLatticeOperator out(window_, static_cast<int>(fiber_dim_ * f.rows()));
    for (const auto& [k, b] : entries_)
      out.add_entry(site_of(k.first), site_of(k.second), kron(f, b));
    out.hermitian_ = hermitian_ && is_hermitian(f);
    return out;
  }

  // Entrywise weight by (x_i - y_i): the commutator with the position
  // operator X_i, exact for finite-range operators.
  BlockLatticeOperator position_commutator(int axis) const {
    BlockLatticeOperator out(window_, fiber_dim_);
    for (const auto& [k, b] : entries_) {
      Site x = site_of(k.first), y = site_of(k.second);
      double w = x[axis] - y[axis];
      if (w != 0.0) out.add_entry(x, y, w * b);
    }
    return out;
  }

  // Dense compression pi_rho (.) pi_rho^* to the closed Euclidean ball
  // {|x| <= rho} in lexicographic site order.
  Matrix compress(double rho) const {
    std::vector<Site> sites = ball_sites(window_.d, rho);
    for (const Site& s : sites)
      if (!window_.contains(s))
        throw SpeclocError("compress: ball exceeds window");
    return dense_on(sites);
  }

  Matrix dense_on(const std::vector<Site>& sites) const {
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < sites.size(); ++i) index[sites[i].key()] = i;
    std::size_t n = sites.size() * static_cast<std::size_t>(fiber_dim_);
    Matrix m = Matrix::Zero(n, n);
    for (const auto& [k, b] : entries_) {
      auto ix = index.find(k.first);
      auto iy = index.find(k.second);
      if (ix == index.end() || iy == index.end()) continue;
      m.block(ix->second * fiber_dim_, iy->second * fiber_dim_, fiber_dim_,
              fiber_dim_) = b;
    }
    return m;
  }

  // Full-window sparse matrix, used for norm and gap estimates.
  SparseMatrix window_sparse() const {
    std::vector<Site> sites = window_.sites();
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < sites.size(); ++i) index[sites[i].key()] = i;
    Eigen::Index n = static_cast<Eigen::Index>(sites.size()) * fiber_dim_;
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(entries_.size() * fiber_dim_ * fiber_dim_);
    for (const auto& [k, b] : entries_) {
      auto rx = index.at(k.first) * fiber_dim_;
      auto cy = index.at(k.second) * fiber_dim_;
      for (int i = 0; i < fiber_dim_; ++i)
        for (int j = 0; j < fiber_dim_; ++j)
          if (b(i, j) != cplx(0.0))
            trips.emplace_back(static_cast<Eigen::Index>(rx + i),
                               static_cast<Eigen::Index>(cy + j), b(i, j));
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }

  double hermiticity_defect() const {
    double defect = 0, scale = 1;
    for (const auto& [k, b] : entries_) {
      Matrix bt = entry(site_of(k.second), site_of(k.first));
      defect = std::max(defect, (b - bt.adjoint()).cwiseAbs().maxCoeff());
      scale = std::max(scale, b.cwiseAbs().maxCoeff());
    }
    return defect / scale;
  }

 private:
  Window window_;
  int fiber_dim_ = 1;
  bool hermitian_ = false;
  int range_ = 0;
  std::map<Key, Matrix> entries_;
  std::map<std::uint64_t, Site> sites_;
};

struct Hopping {
  std::vector<int> offset;
  Matrix block;
};

// Translation-invariant assembly on a window with open boundary: entries with
// either endpoint outside the window are dropped. A hopping (o, B) places
// <x+o|A|x> = B; hermitize adds the adjoint hoppings, with zero offsets
// contributing the symmetrized block (B + B^*)/2 once.
inline BlockLatticeOperator assemble(const std::vector<Hopping>& hoppings,
                                     Window window, bool hermitize,
                                     bool merge_duplicates = false) {
  int fiber = hoppings.empty() ? 1 : static_cast<int>(hoppings[0].block.rows());
  for (const auto& h : hoppings) {
    if (static_cast<int>(h.offset.size()) != window.d)
      throw DimensionError("assemble: offset length differs from d");
    if (h.block.rows() != fiber || h.block.cols() != fiber)
      throw DimensionError("assemble: inconsistent block sizes");
  }
  if (!merge_duplicates) {
    for (std::size_t i = 0; i < hoppings.size(); ++i)
      for (std::size_t j = i + 1; j < hoppings.size(); ++j)
        if (hoppings[i].offset == hoppings[j].offset)
          throw SpeclocError("assemble: duplicate offset without merge flag");
  }
  BlockLatticeOperator op(window, fiber);
  for (const Site& x : window.sites()) {
    for (const auto& h : hoppings) {
      bool zero_offset = true;
      Site y = x;
      for (int i = 0; i < window.d; ++i) {
        y.x[i] += h.offset[i];
        zero_offset = zero_offset && h.offset[i] == 0;
      }
      if (!window.contains(y)) continue;
      if (hermitize && zero_offset) {
        op.add_entry(x, x, 0.5 * (h.block + Matrix(h.block.adjoint())));
      } else {
        op.add_entry(y, x, h.block);
        if (hermitize) op.add_entry(x, y, h.block.adjoint());
      }
    }
  }
  if (hermitize) op.set_hermitian(true);
  return op;
}

inline BlockLatticeOperator tensor_extend(const BlockLatticeOperator& a,
                                          const FiberExtension& ext) {
  if (!is_unitary(ext.factor) ||
      !(is_hermitian(ext.factor, 1e-10) ||
        is_hermitian(cplx(0, 1) * ext.factor, 1e-10)))
    throw SpeclocError("tensor_extend: factor must be unitary and (anti)hermitian");
  return a.tensor_right(ext.factor);
}

// Dense matrix of the periodic closure on a ring/torus of n sites per axis,
// built from the same hoppings. Used for Bloch cross-checks.
inline Matrix periodic_dense(const std::vector<Hopping>& hoppings, int d, int n,
                             bool hermitize) {
  int fiber = hoppings.empty() ? 1 : static_cast<int>(hoppings[0].block.rows());
  std::size_t ns = 1;
  for (int i = 0; i < d; ++i) ns *= static_cast<std::size_t>(n);
  auto wrap = [n](int v) { return ((v % n) + n) % n; };
  auto flat = [&](const std::vector<int>& x) {
    std::size_t f = 0;
    for (int i = 0; i < d; ++i) f = f * n + wrap(x[i]);
    return f;
  };
  Matrix m = Matrix::Zero(ns * fiber, ns * fiber);
  std::vector<int> x(d, 0);
  for (std::size_t s = 0; s < ns; ++s) {
    std::size_t rem = s;
    for (int i = d - 1; i >= 0; --i) {
      x[i] = static_cast<int>(rem % n);
      rem /= n;
    }
    for (const auto& h : hoppings) {
      bool zero_offset = true;
      std::vector<int> y(d);
      for (int i = 0; i < d; ++i) {
        y[i] = x[i] + h.offset[i];
        zero_offset = zero_offset && h.offset[i] == 0;
      }
      std::size_t t = flat(y);
      if (hermitize && zero_offset) {
        m.block(s * fiber, s * fiber, fiber, fiber) +=
            0.5 * (h.block + Matrix(h.block.adjoint()));
      } else {
        m.block(t * fiber, s * fiber, fiber, fiber) += h.block;
        if (hermitize)
          m.block(s * fiber, t * fiber, fiber, fiber) += h.block.adjoint();
      }
    }
  }
  return m;
}

}  // namespace specloc
