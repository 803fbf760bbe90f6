#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsproj/distproj.hpp"
#include "dsproj/dsa.hpp"
#include "dsproj/network.hpp"
#include "dsproj/schedule.hpp"
#include "dsproj/types.hpp"
#include "dsproj/utility_problem.hpp"

namespace dsproj {

struct ScheduleSpec {
  double c = 1.0;
  double k0 = 0.0;
  double p = 1.0;
};

struct SetSpec {
  std::string kind;  // halfspace | box | ball
  Vec normal;
  double offset = 0.0;
  Vec lower;
  Vec upper;
  Vec center;
  double radius = 0.0;
};

struct GraphSpec {
  std::string topology = "ring";  // ring | path | complete | paper10 | edges
  int nodes = 0;
  std::vector<Edge> edges;
};

struct ProblemSpec {
  std::string kind = "zero";  // utility | quadratic | zero
  int n = 0;                  // utility dimension
  std::vector<Vec> centers;   // quadratic: one per node, or one shared
  double curvature = 1.0;
  double sigma = 0.0;  // additive Gaussian noise for quadratic/zero
};

/// A run configuration. Files are INI documents: [section] headers and
/// key = value lines; vectors are comma-separated, lists of vectors are
/// separated by ';'. See configs/ for examples.
struct RunConfig {
  std::string name = "run";
  std::string mode = "gd";
  std::uint64_t seed = 42;
  std::int64_t horizon = 10000;
  std::int64_t log_every = 10;
  std::string output;

  GraphSpec graph;
  bool graph_given = false;
  ProblemSpec problem;
  int dimension = 0;
  std::vector<SetSpec> sets;
  std::optional<Vec> witness;
  std::optional<ScheduleSpec> slow;
  std::optional<ScheduleSpec> fast;
  std::optional<Vec> y0;

  double projection_tol = 1e-6;
  std::int64_t projection_max_iter = 100000;
  std::int64_t projection_log_every = 100;

  bool reference = true;
  std::int64_t reference_min_horizon = 10000;
  std::int64_t reference_max_horizon = 100000;
  double reference_threshold = 1e-8;
};

/// Everything a run needs, built and validated from a RunConfig.
struct ResolvedRun {
  Graph graph;
  GossipMatrix q;
  SetFamily family;
  std::optional<PowerLawSchedule> slow;
  std::optional<PowerLawSchedule> fast;
  std::optional<PairCertificate> certificate;
  SamplingOracle oracle;
  std::optional<UtilityInstance> utility;
  Vec y0;
  DsaMode dsa_mode;
  ProjectionMode projection_mode;
};

/// Parses INI text. Throws ValidationError naming the offending key.
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// Reads `path`, or a bundled configuration when `path` names one
/// (e.g. "paper10_utility"), and validates it fully.
RunConfig load_config(const std::string& path);

/// Builds graph, weights, family, schedules and oracle; every failure is a ValidationError.
ResolvedRun resolve(const RunConfig& cfg);

/// Canonical text form; equal configs give identical text.
std::string canonical(const RunConfig& cfg);
/// FNV-1a 64 of canonical(cfg), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

const std::map<std::string, std::string>& bundled_configs();

}  // namespace dsproj
