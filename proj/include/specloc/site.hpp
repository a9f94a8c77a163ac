#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "specloc/types.hpp"

namespace specloc {

inline constexpr int kMaxDim = 8;

// Lattice site: an integer d-tuple, d in 0..8. Coordinates beyond d are zero,
// so comparison and hashing can ignore the dimension.
struct Site {
  std::array<int, kMaxDim> x{};
  int d = 0;

  Site() = default;
  explicit Site(std::vector<int> coords) : d(static_cast<int>(coords.size())) {
    if (d > kMaxDim) throw DimensionError("Site: dimension exceeds 8");
    std::copy(coords.begin(), coords.end(), x.begin());
  }
  static Site zero(int dim) {
    Site s;
    s.d = dim;
    return s;
  }

  int operator[](int i) const { return x[i]; }
  int& operator[](int i) { return x[i]; }

  long long norm2() const {
    long long n = 0;
    for (int i = 0; i < d; ++i) n += static_cast<long long>(x[i]) * x[i];
    return n;
  }
  double norm() const { return std::sqrt(static_cast<double>(norm2())); }

  Site operator+(const Site& o) const {
    Site s = *this;
    for (int i = 0; i < d; ++i) s.x[i] += o.x[i];
    return s;
  }
  Site operator-(const Site& o) const {
    Site s = *this;
    for (int i = 0; i < d; ++i) s.x[i] -= o.x[i];
    return s;
  }
  bool operator==(const Site& o) const { return d == o.d && x == o.x; }
  // Lexicographic; used for the canonical (reproducible) site ordering.
  bool operator<(const Site& o) const {
    return std::lexicographical_compare(x.begin(), x.begin() + d, o.x.begin(),
                                        o.x.begin() + d);
  }

  std::uint64_t key() const {
    std::uint64_t k = 0;
    for (int i = 0; i < kMaxDim; ++i)
      k = (k << 8) | static_cast<std::uint8_t>(static_cast<std::int8_t>(x[i]));
    return k;
  }
};

// Finite hypercubic window {x : |x_i| <= n} of Z^d. Builders assemble on the
// window; truncations use the Euclidean ball, which must fit inside it.
struct Window {
  int d = 1;
  int n = 0;  // box half-width

  bool contains(const Site& s) const {
    for (int i = 0; i < s.d; ++i)
      if (std::abs(s.x[i]) > n) return false;
    return true;
  }

  std::vector<Site> sites() const {
    std::vector<Site> out;
    Site s = Site::zero(d);
    for (int i = 0; i < d; ++i) s.x[i] = -n;
    while (true) {
      out.push_back(s);
      int i = d - 1;
      while (i >= 0 && s.x[i] == n) s.x[i--] = -n;
      if (i < 0) break;
      ++s.x[i];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t site_count() const {
    std::size_t c = 1;
    for (int i = 0; i < d; ++i) c *= static_cast<std::size_t>(2 * n + 1);
    return c;
  }
};

// Closed Euclidean ball {|x| <= rho}, ties included, in lexicographic order.
inline std::vector<Site> ball_sites(int d, double rho) {
  if (d == 0) return {Site::zero(0)};
  int n = static_cast<int>(std::floor(rho + 1e-12));
  double r2 = rho * rho * (1.0 + 1e-14) + 1e-12;
  std::vector<Site> out;
  for (const Site& s : Window{d, n}.sites())
    if (static_cast<double>(s.norm2()) <= r2) out.push_back(s);
  return out;
}

}  // namespace specloc
