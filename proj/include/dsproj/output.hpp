#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dsproj/distproj.hpp"
#include "dsproj/metrics.hpp"

namespace dsproj {

/// Column names of trace.csv, in order. Pair columns are empty when N < 4.
const std::vector<std::string>& trace_columns();

void write_trace_csv(const std::vector<TraceRecord>& history, std::ostream& out);

/// Columns: k, err_1..err_N, disagreement, residual.
void write_projection_csv(const std::vector<ProjectionRecord>& history, std::ostream& out);

/// What the manifest records about a run. No timestamps, so reruns are byte-identical.
struct RunManifest {
  std::string command;
  std::string config_name;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string mode;
  std::vector<std::pair<std::string, std::string>> details;
};

/// Writes trace.csv, three gnuplot scripts and manifest.json into `dir`
/// (created if needed). Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit_outputs(const std::vector<TraceRecord>& history,
                                                const std::filesystem::path& dir, const RunManifest& manifest);

/// Writes projection.csv, a gnuplot script and manifest.json. Throws IoError.
std::vector<std::filesystem::path> emit_projection_outputs(const ProjectionResult& result,
                                                           const std::filesystem::path& dir,
                                                           const RunManifest& manifest);

}  // namespace dsproj
