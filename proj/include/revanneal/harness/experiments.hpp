#pragma once

// One function per experiment: config in, named tables plus per-run
// diagnostics out. Work items are evaluated with parallel_map and merged by
// index, so results do not depend on the worker count.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "revanneal/dynamics.hpp"
#include "revanneal/harness/config.hpp"
#include "revanneal/harness/emit.hpp"
#include "revanneal/ira.hpp"
#include "revanneal/parallel.hpp"
#include "revanneal/schedule.hpp"
#include "revanneal/sector.hpp"
#include "revanneal/semiclassical.hpp"
#include "revanneal/spectrum.hpp"
#include "revanneal/statics.hpp"

namespace revanneal::harness {

struct RunContext {
  std::size_t workers = 1;
  std::uint64_t seed = 0;
};

struct Bundle {
  std::vector<Table> tables;
  json diagnostics = json::array();
};

struct Experiment {
  std::string name;
  Schema schema;
  std::function<Bundle(const Config&, const RunContext&)> run;
};

namespace detail {

inline std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline long long ll(std::size_t v) { return static_cast<long long>(v); }

inline Schema with_common(Schema keys) {
  keys.insert(keys.begin(), KeySpec{"format", "csv"});
  return keys;
}

inline int positive_int(const Config& cfg, const std::string& key) {
  const long long v = cfg.integer(key);
  if (v < 1) throw ConfigError("config key '" + key + "' must be >= 1");
  return static_cast<int>(v);
}

inline EvolveOptions evolve_options(const Config& cfg) {
  EvolveOptions opt;
  opt.tol = cfg.number("tol");
  if (!(opt.tol > 0.0)) throw ConfigError("config key 'tol' must be positive");
  const std::string prop = cfg.string("propagator");
  if (prop == "magnus4") {
    opt.propagator = Propagator::magnus4;
  } else if (prop == "midpoint") {
    opt.propagator = Propagator::midpoint;
  } else {
    throw ConfigError("config key 'propagator' must be magnus4 or midpoint");
  }
  return opt;
}

/// Block partition from c, or from n_up when that key is set.
inline ModelParams model_params(const Config& cfg, int n_spins, double gamma) {
  const int p = static_cast<int>(cfg.integer("p"));
  if (cfg.is_set("n_up")) {
    ModelParams params{p, n_spins, static_cast<int>(cfg.integer("n_up")), gamma};
    params.validate();
    return params;
  }
  return ModelParams::from_fraction(p, n_spins, cfg.number("c"), gamma);
}

inline AnnealProtocol protocol_from(const Config& cfg) {
  AnnealProtocol pr;
  const std::string kind = cfg.string("protocol");
  if (kind == "qa") {
    pr.kind = AnnealProtocol::Kind::qa;
  } else if (kind == "ara") {
    pr.kind = AnnealProtocol::Kind::ara;
  } else {
    throw ConfigError("config key 'protocol' must be ara or qa");
  }
  pr.p = static_cast<int>(cfg.integer("p"));
  pr.gamma = cfg.number("gamma");
  pr.c = cfg.number("c");
  pr.floor_block = cfg.boolean("floor_block");
  return pr;
}

inline json run_diagnostics(const std::string& item, const EvolutionResult& r) {
  return {{"item", item}, {"norm_drift", r.norm_drift}, {"step_count", r.step_count},
          {"rejected_steps", r.rejected_steps}};
}

inline std::vector<double> tau_grid(const Config& cfg) {
  const std::vector<double> g =
      log_grid(cfg.number("tau_min"), cfg.number("tau_max"), static_cast<std::size_t>(positive_int(cfg, "tau_points")));
  check_tau_grid(g);
  return g;
}

inline const Schema& evolve_keys() {
  static const Schema keys = {{"tol", 1e-9}, {"propagator", "magnus4"}};
  return keys;
}

inline Schema join(Schema a, const Schema& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline void add_fit_rows(Table& t, const std::vector<Cell>& prefix, const ScalingFits& fits) {
  auto row = [&](const std::string& model, const LinearFit& f, bool preferred) {
    std::vector<Cell> r = prefix;
    r.insert(r.end(), {model, f.slope, f.intercept, f.rms_residual, preferred});
    t.add(std::move(r));
  };
  row("power", fits.power, fits.prefers_power());
  row("exponential", fits.exponential, !fits.prefers_power());
}

}  // namespace detail

// ---------------------------------------------------------------- statics

inline Bundle run_phase_diagram(const Config& cfg, const RunContext& ctx) {
  const int p = static_cast<int>(cfg.integer("p"));
  const double gamma = cfg.number("gamma");
  const double step = cfg.number("grid_step");
  const double threshold = cfg.number("jump_threshold");
  if (!(step > 0.0 && step <= 0.01)) throw ConfigError("config key 'grid_step' must lie in (0, 0.01]");
  const std::vector<double> cs = cfg.numbers("c_list");
  const auto columns = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;

  Bundle b;
  Table diag{"diagonal_path", {"c", "gamma", "max_jump", "s_left"}, {}};
  for (const double c : cs) {
    if (!(c >= 0.5 && c <= 1.0)) throw ConfigError("config key 'c_list' entries must lie in [0.5, 1]");
    const MeanFieldModel model{gamma, c, p};
    const auto per_column = parallel_map(columns, ctx.workers, [&](std::size_t j) {
      const double lambda = std::min(1.0, static_cast<double>(j) * step);
      return transitions_in_column(lambda, model, step, threshold);
    });
    Table line{"transition_line_c" + detail::tag(c), {"c", "gamma", "lambda", "s", "jump"}, {}};
    for (const auto& pts : per_column) {
      for (const auto& pt : pts) line.add({c, gamma, pt.lambda, pt.s, pt.jump});
    }
    b.tables.push_back(std::move(line));
    const PathJump j = max_adjacent_jump(model, cfg.number("path_step"), [](double s) { return s; });
    diag.add({c, gamma, j.max_jump, j.s_left});
  }
  b.tables.push_back(std::move(diag));
  return b;
}

// --------------------------------------------------------------- spectrum

inline Bundle run_gap_scaling(const Config& cfg, const RunContext& ctx) {
  const int p = static_cast<int>(cfg.integer("p"));
  const double gamma = cfg.number("gamma");
  const std::string path_name = cfg.string("path");
  AnnealPath path = AnnealPath::diagonal();
  if (path_name == "qa") {
    path = AnnealPath::qa();
  } else if (path_name != "ara") {
    throw ConfigError("config key 'path' must be ara or qa");
  }
  const std::vector<double> cs = path.is_qa() ? std::vector<double>{1.0} : cfg.numbers("c_list");
  const std::vector<int> ns = cfg.integers("n_list");
  GapScanOptions opt;
  opt.s_resolution = cfg.number("s_resolution");

  struct Item {
    double c;
    int n;
  };
  std::vector<Item> items;
  for (double c : cs) {
    for (int n : ns) items.push_back({c, n});
  }
  for (const auto& it : items) ModelParams::from_fraction(p, it.n, it.c, gamma);
  const auto scans = parallel_map(items.size(), ctx.workers, [&](std::size_t i) {
    return gap_along_path(ModelParams::from_fraction(p, items[i].n, items[i].c, gamma), path, opt);
  });

  Bundle b;
  Table t{"gap_scaling", {"N", "c", "gamma", "path", "s_at_min", "min_gap", "resolved"}, {}};
  Table fits{"gap_fits", {"c", "gamma", "path", "model", "slope", "intercept", "rms_residual", "preferred"}, {}};
  for (double c : cs) {
    std::vector<double> sizes;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].c != c) continue;
      const GapScan& g = scans[i];
      t.add({static_cast<long long>(items[i].n), c, gamma, path.name, g.s_at_min, g.min_gap, g.resolved()});
      if (g.resolved()) {
        sizes.push_back(items[i].n);
        gaps.push_back(g.min_gap);
      }
    }
    if (sizes.size() >= 3) detail::add_fit_rows(fits, {c, gamma, path.name}, fit_scaling(sizes, gaps));
  }
  b.tables.push_back(std::move(t));
  b.tables.push_back(std::move(fits));
  return b;
}

// --------------------------------------------------------------- dynamics

inline Schedule schedule_from(const Config& cfg, double tau) {
  const std::string kind = cfg.string("schedule");
  if (cfg.is_set("lambda_override")) {
    const double lam = cfg.number("lambda_override");
    if (kind != "ara_linear" && kind != "ara_custom") {
      throw ConfigError("config key 'lambda_override' applies to ara schedules only");
    }
    return Schedule::ara_custom(tau, {{0.0, 0.0, lam}, {1.0, 1.0, lam}});
  }
  if (kind == "qa") return Schedule::qa(tau);
  if (kind == "ara_linear") return Schedule::ara_linear(tau);
  if (kind == "ira_quadratic") return Schedule::ira_quadratic(tau, cfg.number("s_min"));
  if (kind == "ara_custom") {
    const std::vector<double> flat = cfg.numbers("control_points");
    if (flat.size() % 3 != 0 || flat.size() < 6) {
      throw ConfigError("config key 'control_points' must hold (u, s, lambda) triples, at least two");
    }
    std::vector<ControlPoint> pts;
    for (std::size_t i = 0; i < flat.size(); i += 3) pts.push_back({flat[i], flat[i + 1], flat[i + 2]});
    return Schedule::ara_custom(tau, std::move(pts));
  }
  throw ConfigError("config key 'schedule' must be qa, ara_linear, ara_custom or ira_quadratic");
}

inline Bundle run_evolve(const Config& cfg, const RunContext&) {
  const int n = detail::positive_int(cfg, "n");
  const double gamma = cfg.number("gamma");
  const double tau = cfg.number("tau");
  const Schedule schedule = schedule_from(cfg, tau);
  const bool qa = schedule.kind() == ScheduleKind::qa;
  const ModelParams params = qa ? ModelParams{static_cast<int>(cfg.integer("p")), n, n, gamma}
                                : detail::model_params(cfg, n, gamma);
  params.validate();
  const SectorBasis basis = build_basis(params);
  const HamiltonianTerms terms = build_terms(basis, params.p);
  EvolveOptions opt = detail::evolve_options(cfg);
  opt.samples = static_cast<std::size_t>(detail::positive_int(cfg, "samples"));
  opt.ground_overlap = cfg.boolean("ground_overlap");
  const StateVector psi0 = qa ? transverse_ground_state(basis) : basis_state(basis, basis.initial_index());
  const EvolutionResult r = evolve(terms, gamma, schedule, psi0, opt);

  Bundle b;
  Table traj{"trajectory", {"t", "s", "lambda", "magnetization", "ground_overlap"}, {}};
  for (const auto& smp : r.samples) traj.add({smp.t, smp.s, smp.lambda, smp.magnetization, smp.ground_overlap});
  Table sum{"summary",
            {"N", "N1", "gamma", "tau", "schedule", "p_e", "final_magnetization", "norm_drift", "step_count"},
            {}};
  sum.add({static_cast<long long>(n), static_cast<long long>(params.n_up), gamma, tau, to_string(schedule.kind()),
           error_probability(r.final_state, basis, params.p), magnetization(basis, r.final_state), r.norm_drift,
           detail::ll(r.step_count)});
  b.tables.push_back(std::move(traj));
  b.tables.push_back(std::move(sum));
  b.diagnostics.push_back(detail::run_diagnostics("evolve", r));
  return b;
}

inline Bundle run_error_scaling(const Config& cfg, const RunContext& ctx) {
  const AnnealProtocol pr = detail::protocol_from(cfg);
  const std::vector<int> ns = cfg.integers("n_list");
  const std::vector<double> taus = cfg.numbers("tau_list");
  const EvolveOptions opt = detail::evolve_options(cfg);
  struct Item {
    int n;
    double tau;
  };
  std::vector<Item> items;
  for (int n : ns) {
    pr.params(n);
    for (double tau : taus) items.push_back({n, tau});
  }
  const auto runs = parallel_map(items.size(), ctx.workers, [&](std::size_t i) {
    return run_protocol(pr, pr.params(items[i].n), items[i].tau, opt);
  });
  Bundle b;
  Table t{"error_scaling", {"protocol", "N", "N1", "gamma", "tau", "p_e", "norm_drift", "step_count"}, {}};
  for (std::size_t i = 0; i < items.size(); ++i) {
    const ModelParams params = pr.params(items[i].n);
    t.add({pr.name(), static_cast<long long>(items[i].n), static_cast<long long>(params.n_up), pr.gamma,
           items[i].tau, runs[i].p_e, runs[i].evolution.norm_drift, detail::ll(runs[i].evolution.step_count)});
    b.diagnostics.push_back(detail::run_diagnostics(
        "N=" + std::to_string(items[i].n) + ",tau=" + detail::tag(items[i].tau), runs[i].evolution));
  }
  b.tables.push_back(std::move(t));
  return b;
}

inline Bundle run_tts(const Config& cfg, const RunContext& ctx) {
  const AnnealProtocol pr = detail::protocol_from(cfg);
  const int n = detail::positive_int(cfg, "n");
  const ModelParams params = pr.params(n);
  const std::vector<double> grid = detail::tau_grid(cfg);
  const double p_d = cfg.number("p_d");
  const EvolveOptions opt = detail::evolve_options(cfg);
  const auto pe_grid = parallel_map(grid.size(), ctx.workers,
                                    [&](std::size_t i) { return run_protocol(pr, params, grid[i], opt).p_e; });
  std::map<double, double> cache;
  for (std::size_t i = 0; i < grid.size(); ++i) cache[grid[i]] = pe_grid[i];
  auto pe = [&](double tau) {
    auto it = cache.find(tau);
    if (it != cache.end()) return it->second;
    const double v = run_protocol(pr, params, tau, opt).p_e;
    cache[tau] = v;
    return v;
  };
  const TtsScalingRow row = optimal_tts(pe, n, grid, p_d);
  Bundle b;
  Table curve{"tts", {"tau", "p_e", "tts"}, {}};
  for (const auto& pt : row.curve) curve.add({pt.tau, pt.p_e, pt.tts});
  Table best{"tts_optimum", {"N", "N1", "tau_opt", "tts_opt", "boundary_flag"}, {}};
  best.add({static_cast<long long>(n), static_cast<long long>(params.n_up), row.tau_opt, row.tts_opt, row.boundary});
  b.tables.push_back(std::move(curve));
  b.tables.push_back(std::move(best));
  return b;
}

inline Bundle run_tts_scaling(const Config& cfg, const RunContext& ctx) {
  const AnnealProtocol pr = detail::protocol_from(cfg);
  const std::vector<int> ns = cfg.integers("n_list");
  for (int n : ns) pr.params(n);
  const TtsScaling sc =
      optimal_tts_scaling(pr, ns, detail::tau_grid(cfg), cfg.number("p_d"), detail::evolve_options(cfg), ctx.workers);
  Bundle b;
  Table t{"tts_scaling", {"N", "tau_opt", "tts_opt", "boundary_flag"}, {}};
  Table curves{"tts_curves", {"N", "tau", "p_e", "tts"}, {}};
  for (const auto& row : sc.rows) {
    t.add({static_cast<long long>(row.n_spins), row.tau_opt, row.tts_opt, row.boundary});
    for (const auto& pt : row.curve) curves.add({static_cast<long long>(row.n_spins), pt.tau, pt.p_e, pt.tts});
  }
  Table fits{"tts_fits", {"protocol", "model", "slope", "intercept", "rms_residual", "preferred"}, {}};
  detail::add_fit_rows(fits, {pr.name()}, sc.fits);
  b.tables.push_back(std::move(t));
  b.tables.push_back(std::move(curves));
  b.tables.push_back(std::move(fits));
  return b;
}

// ----------------------------------------------------------- semiclassical

inline double quantum_final_magnetization(const ModelParams& params, double tau, const EvolveOptions& opt,
                                          EvolutionResult* out = nullptr) {
  AnnealProtocol pr;
  pr.kind = AnnealProtocol::Kind::ara;
  pr.gamma = params.gamma;
  ProtocolRun r = run_protocol(pr, params, tau, opt);
  const double m = magnetization(build_basis(params), r.evolution.final_state);
  if (out) *out = std::move(r.evolution);
  return m;
}

inline Bundle run_svd(const Config& cfg, const RunContext&) {
  const int n = detail::positive_int(cfg, "n");
  const ModelParams params = detail::model_params(cfg, n, cfg.number("gamma"));
  const double tau = cfg.number("tau");
  SvdOptions so;
  so.samples = static_cast<std::size_t>(detail::positive_int(cfg, "samples"));
  so.tol = cfg.number("svd_tol");
  const SvdResult r = svd_evolve(Schedule::ara_linear(tau), params, {}, so);
  Bundle b;
  Table t{"svd_trajectory", {"t", "s", "lambda", "magnetization", "energy"}, {}};
  for (const auto& smp : r.samples) t.add({smp.t, smp.s, smp.lambda, smp.magnetization, smp.energy});
  b.tables.push_back(std::move(t));
  b.diagnostics.push_back({{"item", "svd"}, {"max_norm_error", r.max_norm_error}});
  if (cfg.boolean("with_quantum")) {
    EvolveOptions opt = detail::evolve_options(cfg);
    opt.samples = so.samples - 1;
    const SectorBasis basis = build_basis(params);
    const EvolutionResult q = evolve(build_terms(basis, params.p), params.gamma, Schedule::ara_linear(tau),
                                     basis_state(basis, basis.initial_index()), opt);
    Table qt{"quantum_trajectory", {"t", "s", "lambda", "magnetization"}, {}};
    for (const auto& smp : q.samples) qt.add({smp.t, smp.s, smp.lambda, smp.magnetization});
    b.tables.push_back(std::move(qt));
    b.diagnostics.push_back(detail::run_diagnostics("quantum", q));
  }
  return b;
}

inline Bundle run_svd_scan(const Config& cfg, const RunContext& ctx) {
  const int n = detail::positive_int(cfg, "n");
  const double tau = cfg.number("tau");
  const double g0 = cfg.number("gamma_min");
  const double g1 = cfg.number("gamma_max");
  const double dg = cfg.number("gamma_step");
  if (!(dg > 0.0) || g1 < g0) throw ConfigError("gamma grid must have gamma_step > 0 and gamma_max >= gamma_min");
  const auto count = static_cast<std::size_t>(std::floor((g1 - g0) / dg + 1e-9)) + 1;
  std::vector<double> gammas(count);
  for (std::size_t i = 0; i < count; ++i) gammas[i] = g0 + dg * static_cast<double>(i);
  detail::model_params(cfg, n, g0);
  SvdOptions so;
  so.samples = 2;
  so.tol = cfg.number("svd_tol");
  const EvolveOptions opt = detail::evolve_options(cfg);
  struct Row {
    double svd;
    double quantum;
    EvolutionResult evo;
  };
  const auto rows = parallel_map(count, ctx.workers, [&](std::size_t i) {
    const ModelParams params = detail::model_params(cfg, n, gammas[i]);
    Row r;
    r.svd = svd_evolve(Schedule::ara_linear(tau), params, {}, so).final_magnetization;
    r.quantum = quantum_final_magnetization(params, tau, opt, &r.evo);
    return r;
  });
  Bundle b;
  Table t{"svd_scan", {"gamma", "m_final_svd", "m_final_quantum"}, {}};
  for (std::size_t i = 0; i < count; ++i) {
    t.add({gammas[i], rows[i].svd, rows[i].quantum});
    b.diagnostics.push_back(detail::run_diagnostics("gamma=" + detail::tag(gammas[i]), rows[i].evo));
  }
  b.tables.push_back(std::move(t));
  return b;
}

inline Bundle run_potential(const Config& cfg, const RunContext&) {
  const int n = detail::positive_int(cfg, "n");
  const ModelParams params = detail::model_params(cfg, n, cfg.number("gamma"));
  const double s = cfg.number("s");
  const double lambda = cfg.is_set("lambda") ? cfg.number("lambda") : s;
  if (s < 0.0 || s > 1.0 || lambda < 0.0 || lambda > 1.0) throw ConfigError("s and lambda must lie in [0, 1]");
  const PotentialLandscape land =
      potential_landscape(s, lambda, params, static_cast<std::size_t>(detail::positive_int(cfg, "resolution")));
  const BlockWeights w = block_weights(params);
  Bundle b;
  Table t{"potential", {"sin_theta1", "sin_theta2", "v_sc"}, {}};
  for (std::size_t i = 0; i < land.resolution; ++i) {
    for (std::size_t j = 0; j < land.resolution; ++j) {
      t.add({land.axis[i], land.axis[j], land.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
  Table m{"potential_minima", {"s", "lambda", "sin_theta1", "sin_theta2", "magnetization", "v_sc"}, {}};
  for (const auto& mn : land.minima) m.add({s, lambda, mn.x1, mn.x2, w.n1 * mn.x1 + w.n2 * mn.x2, mn.value});
  b.tables.push_back(std::move(t));
  b.tables.push_back(std::move(m));
  return b;
}

inline Bundle run_svmc(const Config& cfg, const RunContext& ctx) {
  const int n = detail::positive_int(cfg, "n");
  const ModelParams params = detail::model_params(cfg, n, cfg.number("gamma"));
  SvmcConfig sc;
  sc.beta = cfg.number("beta");
  sc.sweeps = detail::positive_int(cfg, "sweeps");
  sc.runs = detail::positive_int(cfg, "runs");
  sc.seed = ctx.seed;
  const std::string proposal = cfg.string("proposal");
  if (proposal == "uniform") {
    sc.proposal = SvmcProposal::uniform;
  } else if (proposal == "perturbation") {
    sc.proposal = SvmcProposal::perturbation;
  } else {
    throw ConfigError("config key 'proposal' must be uniform or perturbation");
  }
  sc.width = cfg.number("width");
  const auto rows = svmc_run(sc, params, ctx.workers);
  Bundle b;
  Table t{"svmc", {"sweep", "s", "mean_m", "std_m", "beta"}, {}};
  for (const auto& r : rows) t.add({static_cast<long long>(r.sweep), r.s, r.mean_m, r.std_m, sc.beta});
  b.tables.push_back(std::move(t));
  return b;
}

// -------------------------------------------------------------------- ira

inline CycleSpec cycle_spec(const Config& cfg) {
  CycleSpec spec{cfg.number("tau"), cfg.number("s_min"), 1};
  spec.validate();
  return spec;
}

inline Bundle run_ira_cycle(const Config& cfg, const RunContext& ctx) {
  const int n = detail::positive_int(cfg, "n");
  const int p = static_cast<int>(cfg.integer("p"));
  const double gamma = cfg.number("gamma");
  const CycleSpec spec = cycle_spec(cfg);
  const std::vector<double> cs = cfg.numbers("c_list");
  for (double c : cs) cycle_params(p, n, c, gamma);
  const EvolveOptions opt = detail::evolve_options(cfg);
  const auto dists = parallel_map(cs.size(), ctx.workers, [&](std::size_t i) {
    const ModelParams params = cycle_params(p, n, cs[i], gamma);
    return single_cycle(cycle_basis(params).initial_index(), spec, params, opt);
  });
  Bundle b;
  Table t{"ira_distribution", {"c", "magnetization", "probability"}, {}};
  Table s{"ira_summary", {"c", "s_min", "tau", "initial_magnetization", "mean_magnetization"}, {}};
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const SectorBasis basis = cycle_basis(cycle_params(p, n, cs[i], gamma));
    for (const auto& [m, pr] : magnetization_distribution(basis, dists[i])) t.add({cs[i], m, pr});
    s.add({cs[i], spec.s_min, spec.tau, basis.magnetization(basis.initial_index()),
           mean_magnetization(basis, dists[i])});
  }
  b.tables.push_back(std::move(t));
  b.tables.push_back(std::move(s));
  b.diagnostics.push_back({{"item", "qa_critical_s"}, {"value", qa_critical_point(gamma, p)}});
  return b;
}

inline Bundle run_ira_markov(const Config& cfg, const RunContext& ctx) {
  const int n = detail::positive_int(cfg, "n");
  const ModelParams params = cycle_params(static_cast<int>(cfg.integer("p")), n, cfg.number("c"), cfg.number("gamma"));
  const CycleSpec spec = cycle_spec(cfg);
  const long long cycles = cfg.integer("cycles");
  if (cycles < 0) throw ConfigError("config key 'cycles' must be >= 0");
  const TransitionMatrix tm = transition_matrix(spec, params, ctx.workers, detail::evolve_options(cfg));
  const auto d = static_cast<Eigen::Index>(tm.dimension());

  Bundle b;
  Table levels{"energy_levels", {"level", "energy", "states", "bitstrings"}, {}};
  for (std::size_t g = 0; g < tm.groups.size(); ++g) {
    double count = 0.0;
    for (std::size_t i : tm.groups[g]) count += bitstring_count(tm.basis, i);
    levels.add({detail::ll(g), tm.group_energies[g], detail::ll(tm.groups[g].size()), count});
  }
  Table states{"sector_states", {"index", "up1", "up2", "magnetization", "level"}, {}};
  std::vector<long long> level_of(tm.dimension());
  for (std::size_t g = 0; g < tm.groups.size(); ++g) {
    for (std::size_t i : tm.groups[g]) level_of[i] = static_cast<long long>(g);
  }
  for (std::size_t i = 0; i < tm.dimension(); ++i) {
    states.add({detail::ll(i), static_cast<long long>(tm.basis.up1(i)), static_cast<long long>(tm.basis.up2(i)),
                tm.basis.magnetization(i), level_of[i]});
  }
  Table mat{"transition_matrix", {"r", "j", "i", "probability"}, {}};
  Table agg{"transition_levels", {"r", "level_j", "level_i", "probability"}, {}};
  Eigen::MatrixXd pr = Eigen::MatrixXd::Identity(d, d);
  Table ground{"ground_probability", {"initial_index", "initial_level", "r", "ground_probability"}, {}};
  for (long long r = 1; r <= std::max<long long>(cycles, 1); ++r) {
    pr = tm.entries * pr;
    if (r != 1 && r != cycles) continue;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) mat.add({r, static_cast<long long>(j), static_cast<long long>(i), pr(j, i)});
    }
    const Eigen::MatrixXd a = energy_aggregate(tm, pr);
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      for (Eigen::Index j = 0; j < a.rows(); ++j) {
        agg.add({r, static_cast<long long>(j), static_cast<long long>(i), a(j, i)});
      }
    }
  }
  for (std::size_t i = 0; i < tm.dimension(); ++i) {
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(d);
    pi[static_cast<Eigen::Index>(i)] = 1.0;
    for (long long r = 0; r <= cycles; ++r) {
      ground.add({detail::ll(i), level_of[i], r, ground_probability(tm, pi)});
      pi = tm.entries * pi;
    }
  }
  b.tables.push_back(std::move(levels));
  b.tables.push_back(std::move(states));
  b.tables.push_back(std::move(mat));
  b.tables.push_back(std::move(agg));
  b.tables.push_back(std::move(ground));
  b.diagnostics.push_back(
      {{"item", "column_sum_error"}, {"value", (tm.entries.colwise().sum().array() - 1.0).abs().maxCoeff()}});
  return b;
}

inline Bundle run_ira_spectrum(const Config& cfg, const RunContext&) {
  const int n = detail::positive_int(cfg, "n");
  const ModelParams params = cycle_params(static_cast<int>(cfg.integer("p")), n, cfg.number("c"), cfg.number("gamma"));
  const SectorBasis basis = cycle_basis(params);
  const std::size_t initial =
      cfg.is_set("initial_index") ? static_cast<std::size_t>(cfg.integer("initial_index")) : basis.initial_index();
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(detail::positive_int(cfg, "levels")), basis.dimension());
  const auto trace = cycle_spectral_trace(initial, cycle_spec(cfg), params, k,
                                          static_cast<std::size_t>(detail::positive_int(cfg, "samples")),
                                          detail::evolve_options(cfg));
  Bundle b;
  Table t{"ira_spectrum", {"t", "s", "level", "energy", "occupation"}, {}};
  for (const auto& smp : trace) {
    for (std::size_t j = 0; j < smp.energies.size(); ++j) {
      t.add({smp.t, smp.s, detail::ll(j), smp.energies[j], smp.occupations[j]});
    }
  }
  b.tables.push_back(std::move(t));
  return b;
}

// ---------------------------------------------------------------- registry

inline const std::vector<Experiment>& experiments() {
  using detail::evolve_keys;
  using detail::join;
  using detail::with_common;
  static const std::vector<Experiment> all = {
      {"phase-diagram",
       with_common({{"p", 3}, {"gamma", 1.0}, {"c_list", json::array({0.7, 0.8, 0.9})}, {"grid_step", 0.005},
                    {"jump_threshold", 0.05}, {"path_step", 0.005}}),
       run_phase_diagram},
      {"gap-scaling",
       with_common({{"p", 3}, {"gamma", 1.0}, {"c_list", json::array({0.7, 0.8, 0.9})},
                    {"n_list", json::array({20, 40, 60, 80})}, {"path", "ara"}, {"s_resolution", 0.01}}),
       run_gap_scaling},
      {"evolve",
       with_common(join({{"p", 3}, {"n", 50}, {"c", 0.8}, {"n_up", nullptr}, {"gamma", 2.0}, {"tau", 40.0},
                         {"schedule", "ara_linear"}, {"s_min", 0.5}, {"lambda_override", nullptr},
                         {"control_points", json::array()}, {"samples", 200}, {"ground_overlap", false}},
                        evolve_keys())),
       run_evolve},
      {"error-scaling",
       with_common(join({{"p", 3}, {"protocol", "ara"}, {"gamma", 2.0}, {"c", 0.8}, {"floor_block", false},
                         {"n_list", json::array({10, 20, 30, 40, 45})}, {"tau_list", json::array({100.0})}},
                        evolve_keys())),
       run_error_scaling},
      {"tts",
       with_common(join({{"p", 3}, {"protocol", "ara"}, {"n", 45}, {"gamma", 2.0}, {"c", 0.9}, {"floor_block", true},
                         {"tau_min", 1.0}, {"tau_max", 1000.0}, {"tau_points", 16}, {"p_d", 0.99}},
                        evolve_keys())),
       run_tts},
      {"tts-scaling",
       with_common(join({{"p", 3}, {"protocol", "ara"}, {"gamma", 2.0}, {"c", 0.8}, {"floor_block", false},
                         {"n_list", json::array({20, 40, 60, 80, 100})}, {"tau_min", 1.0}, {"tau_max", 1000.0},
                         {"tau_points", 16}, {"p_d", 0.99}},
                        evolve_keys())),
       run_tts_scaling},
      {"svd",
       with_common(join({{"p", 3}, {"n", 50}, {"c", 0.8}, {"n_up", nullptr}, {"gamma", 2.0}, {"tau", 40.0},
                         {"samples", 401}, {"svd_tol", 1e-12}, {"with_quantum", true}},
                        evolve_keys())),
       run_svd},
      {"svd-scan",
       with_common(join({{"p", 3}, {"n", 50}, {"c", 0.8}, {"n_up", nullptr}, {"tau", 40.0}, {"gamma_min", 1.0},
                         {"gamma_max", 5.0}, {"gamma_step", 0.1}, {"svd_tol", 1e-12}},
                        evolve_keys())),
       run_svd_scan},
      {"potential",
       with_common({{"p", 3}, {"n", 50}, {"c", 0.8}, {"n_up", nullptr}, {"gamma", 2.0}, {"s", 0.3},
                    {"lambda", nullptr}, {"resolution", 201}}),
       run_potential},
      {"svmc",
       with_common({{"p", 3}, {"n", 50}, {"c", 0.8}, {"n_up", nullptr}, {"gamma", 4.0}, {"beta", 5.0},
                    {"sweeps", 500}, {"runs", 100}, {"proposal", "uniform"}, {"width", 0.3}}),
       run_svmc},
      {"ira-cycle",
       with_common(join({{"p", 3}, {"n", 50}, {"gamma", 1.0},
                         {"c_list", json::array({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0})}, {"tau", 10.0},
                         {"s_min", 0.5}},
                        evolve_keys())),
       run_ira_cycle},
      {"ira-markov",
       with_common(join({{"p", 3}, {"n", 10}, {"c", 0.8}, {"gamma", 1.0}, {"tau", 30.0}, {"s_min", 0.3},
                         {"cycles", 5}},
                        evolve_keys())),
       run_ira_markov},
      {"ira-spectrum",
       with_common(join({{"p", 3}, {"n", 10}, {"c", 1.0}, {"gamma", 1.0}, {"tau", 10.0}, {"s_min", 0.3},
                         {"levels", 10}, {"samples", 200}, {"initial_index", nullptr}},
                        evolve_keys())),
       run_ira_spectrum},
  };
  return all;
}

inline const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : experiments()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : experiments()) known += (known.empty() ? "" : ", ") + e.name;
  throw ConfigError("unknown experiment '" + name + "' (known: " + known + ")");
}

}  // namespace revanneal::harness
