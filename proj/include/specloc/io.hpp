#pragma once

#include <filesystem>
#include <fstream>

#include "specloc/report.hpp"

namespace specloc {

// Column-major complex binary (interleaved re, im doubles) plus a JSON
// sidecar describing dimensions, the site list, and the fiber order.
inline void dump_matrix(const Matrix& m, const std::vector<Site>& sites,
                        const FiberLayout& layout,
                        const std::filesystem::path& stem) {
  std::ofstream bin(stem.string() + ".bin", std::ios::binary);
  if (!bin) throw SpeclocError("dump_matrix: cannot open output file");
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      double re = m(r, c).real(), im = m(r, c).imag();
      bin.write(reinterpret_cast<const char*>(&re), sizeof(double));
      bin.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  bin.close();

  json side;
  side["rows"] = m.rows();
  side["cols"] = m.cols();
  side["layout"] = "column-major";
  side["scalar"] = "complex128 interleaved re,im";
  json jsites = json::array();
  for (const Site& s : sites) {
    json c = json::array();
    for (int i = 0; i < s.d; ++i) c.push_back(s[i]);
    jsites.push_back(c);
  }
  side["sites"] = jsites;
  json order = json::array();
  for (auto& [slot, k] : layout.slots) {
    const char* name = "";
    switch (slot) {
      case FiberSlot::ParticleHole: name = "particle_hole"; break;
      case FiberSlot::Spin: name = "spin"; break;
      case FiberSlot::Sublattice: name = "sublattice"; break;
      case FiberSlot::Chiral: name = "chiral"; break;
      case FiberSlot::Band: name = "band"; break;
      case FiberSlot::Clifford: name = "clifford"; break;
    }
    order.push_back({{"slot", name}, {"dim", k}});
  }
  side["fiber_order"] = order;
  std::ofstream js(stem.string() + ".json");
  js << side.dump(2) << "\n";
}

}  // namespace specloc
