#include "dsproj/experiment.hpp"

#include <fmt/format.h>

#include "dsproj/error.hpp"
#include "dsproj/geometry.hpp"

namespace dsproj {

namespace {

std::string fmt_vec(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += fmt::format("{}{:.17g}", i ? "," : "", v[i]);
  return out;
}

RunManifest base_manifest(const RunConfig& cfg, const std::string& command) {
  RunManifest m;
  m.command = command;
  m.config_name = cfg.name;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.mode = cfg.mode;
  return m;
}

}  // namespace

DsaRunOutput run_configured(const RunConfig& cfg, Exec exec) {
  const ResolvedRun run = resolve(cfg);
  if (!run.slow) throw ValidationError("schedule.slow", "the run needs a slow schedule");
  if (!run.fast) throw ValidationError("schedule.fast", "the run needs a fast schedule");

  DsaRunOutput out;
  out.manifest = base_manifest(cfg, "run");
  DsaOptions opts;
  opts.mode = run.dsa_mode;
  opts.horizon = cfg.horizon;
  opts.log_every = cfg.log_every;
  opts.seed = cfg.seed;
  opts.exec = exec;
  if (cfg.reference) {
    out.reference = reference_solution(run.family, run.q, run.oracle, *run.slow, *run.fast, run.y0, run.dsa_mode,
                                       cfg.seed, cfg.reference_min_horizon, cfg.reference_max_horizon,
                                       cfg.reference_threshold, exec);
    opts.reference = out.reference->y1;
  }
  out.result = run_dsa(run.family, run.q, run.oracle, *run.slow, *run.fast, run.y0, opts);

  auto& d = out.manifest.details;
  d.emplace_back("nodes", std::to_string(run.q.nodes()));
  d.emplace_back("dimension", std::to_string(run.family.dim()));
  d.emplace_back("spectral_gap", fmt::format("{:.17g}", run.q.spectral_gap()));
  d.emplace_back("fast_ratio_index", std::to_string(out.result.certificate.fast_ratio_index));
  if (out.reference) {
    d.emplace_back("reference_iterations", std::to_string(out.reference->iterations));
    d.emplace_back("reference_threshold_met", out.reference->threshold_met ? "true" : "false");
    d.emplace_back("reference_y1", fmt_vec(out.reference->y1));
  }
  const DsaState& s = out.result.final_state;
  d.emplace_back("final_y1", fmt_vec(s.y.block(0)));
  d.emplace_back("final_sum_y1", fmt::format("{:.17g}", s.y.block(0).sum()));
  d.emplace_back("final_average_y", fmt_vec(s.y.average()));
  try {
    d.emplace_back("projected_average_y", fmt_vec(exact_intersection_projection(run.family, s.y.average())));
  } catch (const ConvergenceError&) {
    d.emplace_back("projected_average_y", "oracle failed");
  }
  d.emplace_back("unstable", s.stability.unstable() ? "true" : "false");
  return out;
}

ProjectionRunOutput project_configured(const RunConfig& cfg, Exec exec) {
  const ResolvedRun run = resolve(cfg);
  if (!run.fast) throw ValidationError("schedule.fast", "projection needs a fast schedule");
  StopRule stop{cfg.projection_tol, cfg.projection_max_iter, cfg.projection_log_every};
  ProjectionRunOutput out;
  out.manifest = base_manifest(cfg, "project");
  try {
    out.result = run_projection(run.projection_mode, run.family, run.q, *run.fast, run.y0, stop, exec);
  } catch (const ProjectionNotConverged& e) {
    out.result = e.result();
  }
  auto& d = out.manifest.details;
  d.emplace_back("y0", fmt_vec(run.y0));
  d.emplace_back("answer", fmt_vec(out.result.answer));
  d.emplace_back("oracle", out.result.oracle ? fmt_vec(*out.result.oracle) : "oracle failed");
  d.emplace_back("iterations", std::to_string(out.result.iterations));
  d.emplace_back("residual", fmt::format("{:.17g}", out.result.residual));
  d.emplace_back("converged", out.result.converged ? "true" : "false");
  return out;
}

RunConfig utility_config(int n, std::uint64_t seed, std::int64_t horizon, const std::string& mode,
                         std::int64_t log_every) {
  RunConfig cfg = parse_config(bundled_configs().at("paper10_utility"), "bundled:paper10_utility");
  cfg.problem.n = n;
  cfg.seed = seed;
  cfg.horizon = horizon;
  cfg.mode = mode;
  cfg.log_every = log_every;
  if (n != 9) {
    // The 10-node graph only fits n = 9; other sizes use the instance default.
    cfg.graph_given = false;
    cfg.graph = GraphSpec{};
  }
  cfg.name = fmt::format("utility_n{}", n);
  cfg.output = cfg.name;
  resolve(cfg);
  return cfg;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  if (dynamic_cast<const IoError*>(&e)) return 3;
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  return 1;
}

std::vector<SweepOutcome> sweep_seeds(const RunConfig& cfg, std::uint64_t first, std::uint64_t last,
                                      const std::filesystem::path& root, const std::string& command) {
  if (last < first) throw ValidationError("seeds", "the seed range must satisfy first <= last");
  const auto count = static_cast<std::int64_t>(last - first + 1);
  std::vector<SweepOutcome> outcomes(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    SweepOutcome& o = outcomes[static_cast<std::size_t>(i)];
    o.seed = first + static_cast<std::uint64_t>(i);
    o.dir = root / fmt::format("seed_{}", o.seed);
    try {
      RunConfig c = cfg;
      c.seed = o.seed;
      DsaRunOutput out = run_configured(c, Exec::serial);
      out.manifest.command = command;
      emit_outputs(out.result.history, o.dir, out.manifest);
    } catch (const std::exception& e) {
      o.exit_code = exit_code_for(e);
      o.message = e.what();
    }
  }
  return outcomes;
}

}  // namespace dsproj
