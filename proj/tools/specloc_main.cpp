// Batch front end: audit / invariant / sweep / oracle / dump over a JSON job
// config. Exit codes: 0 success, 2 config violation, 3 numerical failure.

#include <CLI11.hpp>
#include <iostream>

#include "specloc/jobs.hpp"
#include "specloc/specloc.hpp"

using namespace specloc;

int main(int argc, char** argv) {
  CLI::App app{"spectral-localizer topological invariants"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool strict = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "job config (JSON)")->required();
    sub->add_option("--out-dir", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads,
                    "worker threads, 0 = all (env LOCALIZER_THREADS)");
    sub->add_flag("--strict", strict, "require strict admissibility");
  };

  CLI::App* cmd_audit = app.add_subcommand("audit", "symmetry audit report");
  CLI::App* cmd_inv = app.add_subcommand("invariant", "single-point invariant");
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  CLI::App* cmd_oracle = app.add_subcommand("oracle", "momentum-space oracle");
  CLI::App* cmd_dump = app.add_subcommand("dump", "export compressed matrix");
  for (CLI::App* c : {cmd_audit, cmd_inv, cmd_sweep, cmd_oracle, cmd_dump})
    add_common(c);

  CLI11_PARSE(app, argc, argv);

  try {
    JobConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (strict) cfg.strict_mode = true;
    if (cmd_audit->parsed()) return run_audit(cfg);
    if (cmd_oracle->parsed()) return run_oracle(cfg);
    if (cmd_dump->parsed()) return run_dump(cfg);
    if (cmd_sweep->parsed() && !cfg.sweep)
      throw ConfigError("config: sweep section required for the sweep command");
    if (cmd_inv->parsed()) cfg.sweep.reset();
    return run_job(cfg, threads);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
