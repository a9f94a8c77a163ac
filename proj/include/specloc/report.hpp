#pragma once

#include <json.hpp>

#include "specloc/localizer.hpp"
#include "specloc/symmetry.hpp"

namespace specloc {

using json = nlohmann::json;

inline json to_json(const AuditReport& r) {
  json j;
  j["eta"] = r.eta;
  j["residuals"] = r.residuals;
  j["g"] = r.gap_g;
  j["thresholds"] = {{"definable", r.threshold_definable},
                     {"certified", r.threshold_certified}};
  j["verdicts"] = r.verdicts;
  j["caz_class"] = r.caz_class;
  j["j_index"] = r.j_index;
  return j;
}

inline json to_json(const InvariantReport& r) {
  json j;
  j["variant"] = r.variant;
  j["signature"] = r.signature;
  j["invariant"] = r.invariant;
  j["z2"] = r.z2;
  j["admissibility"] = r.admissibility;
  j["localizer_gap"] = r.localizer_gap;
  j["eta"] = r.eta;
  j["g"] = r.g;
  j["kappa"] = r.kappa;
  j["rho"] = r.rho;
  j["matrix_dim"] = r.matrix_dim;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace specloc
