#pragma once

// Runs one experiment and writes <out>/<table>.{csv,jsonl} plus manifest.json.

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "revanneal/harness/config.hpp"
#include "revanneal/harness/emit.hpp"
#include "revanneal/harness/experiments.hpp"

#ifndef REVANNEAL_VERSION
#define REVANNEAL_VERSION "unknown"
#endif

namespace revanneal::harness {

struct RunRequest {
  std::string experiment;
  std::string config_path;  // empty: defaults only
  std::vector<std::string> overrides;
  std::filesystem::path out_dir;
  RunContext context;
};

/// Resolves the configuration; throws ConfigError on any bad key or value.
inline Config resolve_config(const RunRequest& req) {
  const Experiment& exp = find_experiment(req.experiment);
  Config cfg(exp.name, exp.schema);
  if (!req.config_path.empty()) cfg.merge_file(req.config_path);
  for (const auto& o : req.overrides) cfg.apply_override(o);
  return cfg;
}

inline json run(const RunRequest& req) {
  const Config cfg = resolve_config(req);
  const Format format = parse_format(cfg.string("format"));
  if (req.context.workers < 1) throw ConfigError("--workers must be >= 1");
  const Experiment& exp = find_experiment(req.experiment);

  const auto t0 = std::chrono::steady_clock::now();
  const Bundle bundle = exp.run(cfg, req.context);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(req.out_dir);
  json tables = json::array();
  for (const auto& t : bundle.tables) {
    const std::string file = file_name(t, format);
    write_text(req.out_dir / file, render(t, format));
    tables.push_back({{"name", t.name}, {"file", file}, {"columns", t.columns}, {"rows", t.rows.size()}});
  }
  json manifest = {{"tool", "revanneal"},
                   {"version", REVANNEAL_VERSION},
                   {"experiment", exp.name},
                   {"config", cfg.resolved()},
                   {"seed", req.context.seed},
                   {"workers", req.context.workers},
                   {"wall_time_seconds", wall},
                   {"tables", tables},
                   {"diagnostics", bundle.diagnostics}};
  write_text(req.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace revanneal::harness
