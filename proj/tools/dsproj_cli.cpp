// dsproj: command-line front end for distributed projection and two-timescale runs.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dsproj/config.hpp"
#include "dsproj/error.hpp"
#include "dsproj/experiment.hpp"
#include "dsproj/output.hpp"

namespace fs = std::filesystem;
using namespace dsproj;

namespace {

struct RunFlags {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> log_every;
  std::optional<std::string> output;
  std::optional<std::string> seeds;
  bool serial = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--mode", f.mode, "gd or bdh (run.mode)")->check(CLI::IsMember({"gd", "bdh"}));
  app->add_option("--seed", f.seed, "master seed (run.seed)");
  app->add_option("--horizon", f.horizon, "number of iterations (run.horizon)");
  app->add_option("--log-every", f.log_every, "trace logging period (run.log_every)");
  app->add_option("--output", f.output, "output directory (run.output); DSPROJ_OUTPUT_ROOT is used when absent");
  app->add_option("--seeds", f.seeds, "seed range a..b, runs concurrently into <output>/seed_<s>");
  app->add_flag("--serial", f.serial, "use the serial reference kernels");
}

void apply(RunConfig& cfg, const RunFlags& f) {
  if (f.mode) cfg.mode = *f.mode;
  if (f.seed) cfg.seed = *f.seed;
  if (f.horizon) cfg.horizon = *f.horizon;
  if (f.log_every) cfg.log_every = *f.log_every;
  resolve(cfg);
}

fs::path output_dir(const RunConfig& cfg, const RunFlags& f) {
  if (f.output) return *f.output;
  const char* root = std::getenv("DSPROJ_OUTPUT_ROOT");
  const fs::path base = root && *root ? fs::path(root) : fs::path(".");
  return base / (cfg.output.empty() ? cfg.name : cfg.output);
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const auto v = std::stoull(s);
      return {v, v};
    }
    return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ValidationError("seeds", fmt::format("expected a range a..b, got '{}'", s));
  }
}

void print_summary(const DsaRunOutput& out, const fs::path& dir) {
  const TraceRecord& last = out.result.history.back();
  fmt::print("k={} optimality_error={:.6g} feasibility_error={:.6g} disagreement={:.6g} stability_flag={}\n", last.k,
             last.optimality_error, last.feasibility_error, last.disagreement, last.stability_flag ? 1 : 0);
  fmt::print("wrote {}\n", dir.string());
}

int do_run(RunConfig cfg, const RunFlags& f, const std::string& command) {
  apply(cfg, f);
  const fs::path dir = output_dir(cfg, f);
  if (f.seeds) {
    const auto [first, last] = parse_seed_range(*f.seeds);
    int code = 0;
    for (const auto& o : sweep_seeds(cfg, first, last, dir, command)) {
      if (o.exit_code == 0) {
        fmt::print("seed {}: ok ({})\n", o.seed, o.dir.string());
      } else {
        fmt::print(stderr, "seed {}: error: {}\n", o.seed, o.message);
        code = std::max(code, o.exit_code);
      }
    }
    return code;
  }
  DsaRunOutput out = run_configured(cfg, f.serial ? Exec::serial : Exec::parallel);
  out.manifest.command = command;
  emit_outputs(out.result.history, dir, out.manifest);
  print_summary(out, dir);
  return 0;
}

int do_project(RunConfig cfg, const RunFlags& f, std::optional<double> tol, std::optional<std::int64_t> max_iter) {
  if (f.mode) cfg.mode = *f.mode;
  if (tol) cfg.projection_tol = *tol;
  if (max_iter) cfg.projection_max_iter = *max_iter;
  if (f.log_every) cfg.projection_log_every = *f.log_every;
  resolve(cfg);
  const fs::path dir = output_dir(cfg, f);
  const ProjectionRunOutput out = project_configured(cfg, f.serial ? Exec::serial : Exec::parallel);
  emit_projection_outputs(out.result, dir, out.manifest);
  std::string answer;
  for (Eigen::Index i = 0; i < out.result.answer.size(); ++i) answer += fmt::format("{}{:.10g}", i ? ", " : "", out.result.answer[i]);
  fmt::print("answer=({}) iterations={} residual={:.3g} converged={}\n", answer, out.result.iterations,
             out.result.residual, out.result.converged);
  if (out.result.oracle) fmt::print("distance to oracle={:.3g}\n", (out.result.answer - *out.result.oracle).norm());
  fmt::print("wrote {}\n", dir.string());
  if (!out.result.converged) {
    fmt::print(stderr, "warning: stopping tolerance not reached within {} iterations\n", cfg.projection_max_iter);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed projection and two-timescale stochastic approximation"};
  app.set_version_flag("--version", DSPROJ_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  RunFlags run_flags;
  auto* validate = app.add_subcommand("validate", "load and validate a config without running it");
  validate->add_option("config", config_path, "config file or bundled config name")->required();

  auto* run = app.add_subcommand("run", "run DSA-GD or DSA-BDH from a config");
  run->add_option("config", config_path, "config file or bundled config name")->required();
  add_run_flags(run, run_flags);

  std::optional<double> tol;
  std::optional<std::int64_t> max_iter;
  auto* project = app.add_subcommand("project", "distributed projection of the config's y0");
  project->add_option("config", config_path, "config file or bundled config name")->required();
  project->add_option("--mode", run_flags.mode, "gd or bdh (run.mode)")->check(CLI::IsMember({"gd", "bdh"}));
  project->add_option("--tol", tol, "stopping tolerance (projection.tol)");
  project->add_option("--max-iter", max_iter, "iteration cap (projection.max_iter)");
  project->add_option("--log-every", run_flags.log_every, "logging period (projection.log_every)");
  project->add_option("--output", run_flags.output, "output directory; DSPROJ_OUTPUT_ROOT is used when absent");
  project->add_flag("--serial", run_flags.serial, "use the serial reference kernels");

  auto* experiment = app.add_subcommand("experiment", "bundled experiments");
  experiment->require_subcommand(1);
  auto* utility = experiment->add_subcommand("utility", "stochastic utility problem on a gossip network");
  int n = 9;
  utility->add_option("--n", n, "dimension; N = n + 1 nodes (problem.n)");
  add_run_flags(utility, run_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      const RunConfig cfg = load_config(config_path);
      const ResolvedRun r = resolve(cfg);
      fmt::print("{}: ok ({} nodes, dimension {}, gamma {:.6f}, config hash {})\n", config_path, r.q.nodes(),
                 r.family.dim(), r.q.spectral_gap(), config_hash(cfg));
      return 0;
    }
    if (*run) return do_run(load_config(config_path), run_flags, "run");
    if (*project) return do_project(load_config(config_path), run_flags, tol, max_iter);
    if (*utility) {
      RunConfig cfg = utility_config(n, run_flags.seed.value_or(42), run_flags.horizon.value_or(10000),
                                     run_flags.mode.value_or("gd"), run_flags.log_every.value_or(10));
      return do_run(std::move(cfg), run_flags, "experiment utility");
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code_for(e);
  }
  return 0;
}
