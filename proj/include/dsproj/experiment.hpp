#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsproj/config.hpp"
#include "dsproj/distproj.hpp"
#include "dsproj/dsa.hpp"
#include "dsproj/kernels.hpp"
#include "dsproj/output.hpp"

namespace dsproj {

struct DsaRunOutput {
  DsaResult result;
  std::optional<ReferenceSolution> reference;
  RunManifest manifest;
};

/// Runs the configured DSA engine, preceded by the long reference run when
/// enabled. Requires both schedules. Throws ValidationError or RunDiverged.
DsaRunOutput run_configured(const RunConfig& cfg, Exec exec = Exec::parallel);

struct ProjectionRunOutput {
  ProjectionResult result;
  RunManifest manifest;
};

/// Runs the configured distributed projection of y0 with the fast schedule.
/// A run that exhausts max_iter is returned with converged = false.
ProjectionRunOutput project_configured(const RunConfig& cfg, Exec exec = Exec::parallel);

/// The bundled utility setup with n, seed, horizon, mode and log_every replaced.
RunConfig utility_config(int n, std::uint64_t seed, std::int64_t horizon, const std::string& mode,
                         std::int64_t log_every);

struct SweepOutcome {
  std::uint64_t seed = 0;
  int exit_code = 0;
  std::string message;
  std::filesystem::path dir;
};

/// Runs `cfg` once per seed in [first, last], concurrently, writing each run
/// to root/seed_<s>. Failures are reported per seed rather than thrown.
std::vector<SweepOutcome> sweep_seeds(const RunConfig& cfg, std::uint64_t first, std::uint64_t last,
                                      const std::filesystem::path& root, const std::string& command);

/// Maps an exception from a run to the process exit code: 2 config, 3 I/O,
/// 4 divergence, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace dsproj
