#include "dsproj/output.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dsproj/error.hpp"

#ifndef DSPROJ_VERSION
#define DSPROJ_VERSION "unknown"
#endif

namespace dsproj {

namespace {

namespace fs = std::filesystem;

std::string num(double v) { return fmt::format("{:.17g}", v); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
}

fs::path write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << content;
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
  return path;
}

// Log-y plot of one or more trace columns against k.
std::string plot_script(const std::string& data, const std::string& title, const std::string& ylabel,
                        const std::string& png, const std::vector<std::pair<int, std::string>>& series) {
  std::string s;
  s += "set datafile separator \",\"\n";
  s += "set key autotitle columnhead\n";
  s += "set logscale y\n";
  s += "set format y \"%.0e\"\n";
  s += fmt::format("set title \"{}\"\n", title);
  s += "set xlabel \"iteration k\"\n";
  s += fmt::format("set ylabel \"{}\"\n", ylabel);
  s += "set terminal pngcairo size 800,500\n";
  s += fmt::format("set output \"{}\"\n", png);
  s += "plot";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& [col, label] = series[i];
    // Nonpositive values (zeros, the -1 oracle sentinel) are skipped on a log axis.
    s += fmt::format("{} \"{}\" using 1:(${} > 0 ? ${} : 1/0) with lines title \"{}\"", i ? ", \\\n    " : " ", data,
                     col, col, label);
  }
  s += "\n";
  return s;
}

std::string manifest_json(const RunManifest& m, const std::vector<std::string>& files) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config_name;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["mode"] = m.mode;
  j["version"] = DSPROJ_VERSION;
  j["files"] = files;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.details) details[k] = v;
  j["details"] = details;
  return j.dump(2) + "\n";
}

}  // namespace

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{
      "k",          "optimality_error", "feasibility_error", "disagreement", "max_norm_y", "stability_flag",
      "d12",        "d13",              "d14",               "d23",          "d24",        "d34",
      "probe_sum",  "average_identity_residual", "x_average_norm", "projection_tracking_error"};
  return cols;
}

void write_trace_csv(const std::vector<TraceRecord>& history, std::ostream& out) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : history) {
    std::string line = fmt::format("{},{},{},{},{},{}", r.k, num(r.optimality_error), num(r.feasibility_error),
                                   num(r.disagreement), num(r.max_norm_y), r.stability_flag ? 1 : 0);
    for (int p = 0; p < 6; ++p) {
      line += ',';
      if (r.pair_disagreement) line += num((*r.pair_disagreement)[static_cast<std::size_t>(p)]);
    }
    line += fmt::format(",{},{},{},{}\n", num(r.probe_sum), num(r.average_identity_residual), num(r.x_average_norm),
                        num(r.projection_tracking_error));
    out << line;
  }
}

void write_projection_csv(const std::vector<ProjectionRecord>& history, std::ostream& out) {
  const std::size_t nodes = history.empty() ? 0 : history.front().node_error.size();
  out << "k";
  for (std::size_t i = 1; i <= nodes; ++i) out << ",err_" << i;
  out << ",disagreement,residual\n";
  for (const auto& r : history) {
    std::string line = std::to_string(r.k);
    for (double e : r.node_error) line += "," + num(e);
    line += fmt::format(",{},{}\n", num(r.disagreement), num(r.residual));
    out << line;
  }
}

std::vector<fs::path> emit_outputs(const std::vector<TraceRecord>& history, const fs::path& dir,
                                   const RunManifest& manifest) {
  if (history.empty()) throw InputError("emit_outputs needs a nonempty history");
  ensure_dir(dir);
  std::vector<fs::path> written;
  std::ostringstream csv;
  write_trace_csv(history, csv);
  written.push_back(write_file(dir / "trace.csv", csv.str()));

  written.push_back(write_file(
      dir / "optimality.gp",
      plot_script("trace.csv", "Optimality error vs. iteration count", "|y^1_k - y^{1,*}|", "optimality.png",
                  {{2, "optimality_error"}})));
  written.push_back(write_file(
      dir / "feasibility.gp",
      plot_script("trace.csv", "Feasibility error vs. iteration count", "|y^1_k - P_X(y^1_k)|", "feasibility.png",
                  {{3, "feasibility_error"}})));
  written.push_back(write_file(
      dir / "disagreement.gp",
      plot_script("trace.csv", "Disagreement vs. iteration count", "|y^i_k - y^j_k|", "disagreement.png",
                  {{4, "max over pairs"}, {7, "d12"}, {8, "d13"}, {9, "d14"}, {10, "d23"}, {11, "d24"}, {12, "d34"}})));

  std::vector<std::string> names;
  for (const auto& p : written) names.push_back(p.filename().string());
  names.push_back("manifest.json");
  written.push_back(write_file(dir / "manifest.json", manifest_json(manifest, names)));
  return written;
}

std::vector<fs::path> emit_projection_outputs(const ProjectionResult& result, const fs::path& dir,
                                              const RunManifest& manifest) {
  if (result.history.empty()) throw InputError("emit_projection_outputs needs a nonempty history");
  ensure_dir(dir);
  std::vector<fs::path> written;
  std::ostringstream csv;
  write_projection_csv(result.history, csv);
  written.push_back(write_file(dir / "projection.csv", csv.str()));

  const std::size_t nodes = result.history.front().node_error.size();
  std::vector<std::pair<int, std::string>> series;
  for (std::size_t i = 0; i < nodes; ++i) series.emplace_back(static_cast<int>(i) + 2, fmt::format("node {}", i + 1));
  series.emplace_back(static_cast<int>(nodes) + 2, "disagreement");
  written.push_back(write_file(dir / "projection.gp", plot_script("projection.csv", "Distance to the projection",
                                                                  "|candidate_i - P_X(y)|", "projection.png", series)));
  std::vector<std::string> names;
  for (const auto& p : written) names.push_back(p.filename().string());
  names.push_back("manifest.json");
  written.push_back(write_file(dir / "manifest.json", manifest_json(manifest, names)));
  return written;
}

}  // namespace dsproj
