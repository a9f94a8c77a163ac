#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "specloc/io.hpp"
#include "specloc/models.hpp"
#include "specloc/report.hpp"

namespace specloc {

struct ConfigError : SpeclocError {
  using SpeclocError::SpeclocError;
};

struct SweepAxis {
  std::string parameter;
  double from = 0, to = 0;
  int steps = 1;
};

struct JobConfig {
  std::string model_name;
  std::map<std::string, double> params;
  int window_n = 30;
  double disorder_w = 0;
  std::uint64_t seed = 1;
  std::optional<std::string> variant;
  std::optional<double> kappa, rho;
  bool strict_mode = false;
  std::optional<SweepAxis> sweep;
  bool oracles = true;
  std::string out_dir = ".";
};

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known)
      throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
  }
}

inline Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::OddStandard, Variant::EvenStandard,
                    Variant::OddTwistedChiral, Variant::OddReduced,
                    Variant::EvenTwistedConservation,
                    Variant::OddTwistedCommuting_i,
                    Variant::OddTwistedCommuting_ii})
    if (variant_name(v) == name) return v;
  throw ConfigError("config: unknown variant '" + name + "'");
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline JobConfig parse_config(const json& j) {
  detail::reject_unknown(
      j, {"model", "pipeline", "sweep", "oracles", "out_dir", "seed"}, "root");
  JobConfig c;
  if (!j.contains("model") || !j["model"].contains("name"))
    throw ConfigError("config: model.name is required");
  const json& m = j["model"];
  detail::reject_unknown(m, {"name", "params", "window", "disorder_w"}, "model");
  c.model_name = m["name"].get<std::string>();
  if (m.contains("params")) {
    if (!m["params"].is_object()) throw ConfigError("config: params must be an object");
    for (auto it = m["params"].begin(); it != m["params"].end(); ++it) {
      if (!it.value().is_number())
        throw ConfigError("config: parameter '" + it.key() + "' must be a number");
      c.params[it.key()] = it.value().get<double>();
    }
  }
  if (m.contains("window")) c.window_n = m["window"].get<int>();
  if (m.contains("disorder_w")) c.disorder_w = m["disorder_w"].get<double>();
  if (j.contains("pipeline")) {
    const json& p = j["pipeline"];
    detail::reject_unknown(p, {"variant", "kappa", "rho", "strict"}, "pipeline");
    if (p.contains("variant")) c.variant = p["variant"].get<std::string>();
    if (p.contains("kappa")) c.kappa = p["kappa"].get<double>();
    if (p.contains("rho")) c.rho = p["rho"].get<double>();
    if (p.contains("strict")) c.strict_mode = p["strict"].get<bool>();
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    detail::reject_unknown(s, {"parameter", "from", "to", "steps"}, "sweep");
    SweepAxis ax;
    ax.parameter = s.at("parameter").get<std::string>();
    ax.from = s.at("from").get<double>();
    ax.to = s.at("to").get<double>();
    ax.steps = s.at("steps").get<int>();
    if (ax.steps < 1) throw ConfigError("config: sweep.steps must be >= 1");
    c.sweep = ax;
  }
  if (j.contains("oracles")) c.oracles = j["oracles"].get<bool>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  return c;
}

inline JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

// Momentum-space cross-check for the model's default pipeline.
inline std::optional<long> oracle_value(const ModelInstance& m) {
  if (!m.bloch) return std::nullopt;
  switch (m.default_variant) {
    case Variant::OddStandard:
    case Variant::OddTwistedChiral:
    case Variant::OddReduced: {
      if (!m.pipeline_grading) return std::nullopt;
      Grading gr = grading_basis(*m.pipeline_grading);
      int h = gr.half;
      return winding_number([&](double k) {
        Matrix sym = m.bloch->symbol({k});
        return Matrix(
            (gr.rotation.adjoint() * sym * gr.rotation).topRightCorner(h, h));
      });
    }
    case Variant::EvenStandard:
      return chern_number(*m.bloch);
    case Variant::EvenTwistedConservation: {
      // Spin Chern number: Chern of the + conservation block.
      Grading gr = grading_basis(*m.pipeline_grading);
      int h = gr.half;
      return chern_number([&](double k1, double k2) {
        Matrix sym = m.bloch->symbol({k1, k2});
        return Matrix(
            (gr.rotation.adjoint() * sym * gr.rotation).topLeftCorner(h, h));
      });
    }
    default:
      return std::nullopt;
  }
}

struct PointResult {
  std::map<std::string, double> params;
  InvariantReport report;
  std::optional<long> oracle;
  bool oracle_match = true;
  double wall_time_ms = 0;
  std::string error;  // non-empty: the point failed (gap closing, kernel)
};

inline PointResult run_point(const JobConfig& cfg,
                             const std::map<std::string, double>& params) {
  auto t0 = std::chrono::steady_clock::now();
  ModelInstance model =
      make_model(cfg.model_name, params, cfg.window_n, cfg.disorder_w, cfg.seed);
  PointResult out;
  out.params = params;
  if (model.d == 0) {
    // Zero-dimensional pipeline: parity from the Pfaffian sign against the
    // signature formula.
    Matrix h = model.real_space.entry(Site::zero(0), Site::zero(0));
    ZeroDimResult z = zero_dim_invariant(h);
    out.report.variant = "ZeroDimPfaffian";
    out.report.signature = z.pf_sign;
    out.report.invariant = z.pf_sign;
    out.report.z2 = z.pf_sign < 0 ? 1 : 0;
    out.report.eta = z.eta;
    out.report.g = z.gap;
    out.report.admissibility = z.eta < 2 * z.gap ? "strict" : "violated";
    out.oracle = z.formula_sign;
    out.oracle_match = z.pf_sign == z.formula_sign;
  } else {
    LocalizerSpec spec;
    spec.variant = cfg.variant ? detail::parse_variant(*cfg.variant)
                               : model.default_variant;
    spec.kappa = cfg.kappa;
    spec.rho = cfg.rho;
    spec.strict_mode = cfg.strict_mode;
    GradedOperator gop = graded_for_pipeline(model);
    CliffordRep rep = build_clifford(model.d);
    out.report = invariant(spec, gop, rep);
    if (cfg.oracles) {
      out.oracle = oracle_value(model);
      if (out.oracle) out.oracle_match = (*out.oracle == out.report.invariant);
    }
  }
  out.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return out;
}

inline json to_json(const PointResult& p) {
  json j;
  j["params"] = p.params;
  j["report"] = to_json(p.report);
  if (p.oracle) {
    j["oracle"] = *p.oracle;
    j["oracle_match"] = p.oracle_match;
  }
  j["wall_time_ms"] = p.wall_time_ms;
  return j;
}

inline int thread_count(int requested) {
  if (requested > 0) return requested;
  if (requested == 0) {
    if (const char* env = std::getenv("LOCALIZER_THREADS")) {
      int n = std::atoi(env);
      if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  return 1;
}

// RFC 4180 CSV, header row, results ordered by sweep index regardless of
// worker completion order. wall_time_ms stays the last column so byte-level
// comparisons can strip it.
inline void write_csv(const std::filesystem::path& path,
                      const std::vector<PointResult>& results) {
  std::ofstream out(path);
  if (!out) throw SpeclocError("write_csv: cannot open " + path.string());
  std::vector<std::string> param_names;
  if (!results.empty())
    for (auto& [k, v] : results[0].params) param_names.push_back(k);
  for (const auto& name : param_names) out << name << ",";
  out << "eta,g,kappa,rho,admissibility,signature,invariant,z2,localizer_gap,"
         "wall_time_ms\r\n";
  for (const auto& r : results) {
    for (const auto& name : param_names)
      out << detail::fmt(r.params.at(name)) << ",";
    if (!r.error.empty()) {
      // failed points (gap closings at phase boundaries) keep their row
      out << ",,,,error,,,,," << "\r\n";
      continue;
    }
    const InvariantReport& ir = r.report;
    out << detail::fmt(ir.eta) << "," << detail::fmt(ir.g) << ","
        << detail::fmt(ir.kappa) << "," << detail::fmt(ir.rho) << ","
        << ir.admissibility << "," << ir.signature << "," << ir.invariant
        << "," << ir.z2 << "," << detail::fmt(ir.localizer_gap) << ","
        << detail::fmt(r.wall_time_ms) << "\r\n";
  }
}

// Batch driver: one InvariantReport JSON per point plus an aggregate CSV.
// Exit code 0 on success, 3 on numerical failure, and nonzero when a
// strict-mode certification fails.
inline int run_job(const JobConfig& cfg, int threads_requested = 0) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::vector<std::map<std::string, double>> points;
  if (cfg.sweep) {
    const SweepAxis& ax = *cfg.sweep;
    for (int i = 0; i < ax.steps; ++i) {
      auto p = cfg.params;
      double t = ax.steps == 1 ? 0.0 : double(i) / (ax.steps - 1);
      p[ax.parameter] = ax.from + t * (ax.to - ax.from);
      points.push_back(p);
    }
  } else {
    points.push_back(cfg.params);
  }

  std::vector<PointResult> results(points.size());
  std::atomic<std::size_t> next{0};
  int nthreads = std::min<std::size_t>(thread_count(threads_requested),
                                       points.size());
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        results[i] = run_point(cfg, points[i]);
      } catch (const std::exception& e) {
        results[i].params = points[i];
        results[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool numerical_failure = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!results[i].error.empty()) {
      numerical_failure = true;
      std::ofstream err(fs::path(cfg.out_dir) /
                        ("point_" + std::to_string(i) + ".error.json"));
      err << json{{"params", points[i]}, {"error", results[i].error}}.dump(2)
          << "\n";
      continue;
    }
    std::ofstream out(fs::path(cfg.out_dir) /
                      ("point_" + std::to_string(i) + ".json"));
    out << to_json(results[i]).dump(2) << "\n";
  }
  write_csv(fs::path(cfg.out_dir) / "sweep.csv", results);
  return numerical_failure ? 3 : 0;
}

inline int run_audit(const JobConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  ModelInstance model = make_model(cfg.model_name, cfg.params, cfg.window_n,
                                   cfg.disorder_w, cfg.seed);
  double g = model_gap(model);
  AuditReport rep = classify(model.real_space, model.declared, g);
  std::ofstream out(fs::path(cfg.out_dir) / "audit.json");
  out << to_json(rep).dump(2) << "\n";
  return 0;
}

inline int run_oracle(const JobConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  ModelInstance model = make_model(cfg.model_name, cfg.params, cfg.window_n,
                                   cfg.disorder_w, cfg.seed);
  json j;
  if (model.d == 0) {
    Matrix h = model.real_space.entry(Site::zero(0), Site::zero(0));
    ZeroDimResult z = zero_dim_invariant(h);
    j["pf_sign"] = z.pf_sign;
    j["formula_sign"] = z.formula_sign;
  } else {
    std::optional<long> v = oracle_value(model);
    if (!v) throw SpeclocError("oracle: no momentum-space oracle for this model");
    j["value"] = *v;
    j["variant"] = variant_name(model.default_variant);
  }
  std::ofstream out(fs::path(cfg.out_dir) / "oracle.json");
  out << j.dump(2) << "\n";
  return 0;
}

inline int run_dump(const JobConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  ModelInstance model = make_model(cfg.model_name, cfg.params, cfg.window_n,
                                   cfg.disorder_w, cfg.seed);
  double rho = cfg.rho.value_or(
      std::max(1.0, double(model.window.n - 2 * model.real_space.range())));
  std::vector<Site> sites = ball_sites(model.d, rho);
  Matrix m = model.real_space.compress(rho);
  dump_matrix(m, sites, model.layout, fs::path(cfg.out_dir) / "hamiltonian");
  return 0;
}

}  // namespace specloc
