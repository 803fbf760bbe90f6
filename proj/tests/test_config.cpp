#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dsproj/config.hpp"
#include "dsproj/error.hpp"
#include "dsproj/experiment.hpp"
#include "dsproj/output.hpp"

using namespace dsproj;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / fmt::format("dsproj_test_{}_{}", name, ::getpid());
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const int status = std::system(fmt::format("\"{}\" {} > /dev/null 2>&1", DSPROJ_CLI, args).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string with_line(std::string text, const std::string& after, const std::string& line) {
  const auto pos = text.find(after);
  REQUIRE(pos != std::string::npos);
  text.insert(pos + after.size(), "\n" + line);
  return text;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

const std::string& utility_text() { return bundled_configs().at("paper10_utility"); }

}  // namespace

TEST_CASE("the bundled utility config is the 10-node setup") {
  const RunConfig cfg = load_config("paper10_utility");
  REQUIRE(cfg.slow);
  REQUIRE(cfg.fast);
  CHECK(cfg.fast->c == 1.0);
  CHECK(cfg.fast->k0 == 0.0);
  CHECK(cfg.fast->p == 0.7);
  CHECK(cfg.slow->c == 1.0);
  CHECK(cfg.slow->k0 == 0.0);
  CHECK(cfg.slow->p == 0.95);
  CHECK(cfg.graph.topology == "paper10");
  const ResolvedRun r = resolve(cfg);
  CHECK(r.q.nodes() == 10);
  CHECK(r.family.dim() == 9);
  CHECK(r.certificate.has_value());
}

TEST_CASE("every bundled config matches its file under configs/") {
  for (const auto& [name, text] : bundled_configs()) {
    const fs::path file = fs::path(DSPROJ_SOURCE_DIR) / "configs" / (name + ".ini");
    CHECK_MESSAGE(slurp(file) == text, name);
    CHECK_NOTHROW(load_config(file.string()));
  }
}

TEST_CASE("validation errors name the offending key") {
  auto expect_key = [](const std::string& text, const std::string& key, const std::string& what = "") {
    try {
      resolve(parse_config(text));
      FAIL("expected a validation error for " << key);
    } catch (const ValidationError& e) {
      CHECK(e.key() == key);
      if (!what.empty()) CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
  };
  expect_key(replace(utility_text(), "p = 0.95", "p = 0.4"), "schedule.slow.p", "square-summability violated");
  expect_key(replace(utility_text(), "p = 0.7", "p = 1.5"), "schedule.fast.p", "divergent-sum violated");
  expect_key(replace(replace(utility_text(), "p = 0.95", "p = 0.6"), "p = 0.7", "p = 0.9"), "schedule.slow.p",
             "a_k = o(b_k) violated");
  expect_key(replace(utility_text(), "mode = gd", "mode = sgd"), "run.mode");
  expect_key(replace(utility_text(), "horizon = 10000", "horizon = lots"), "run.horizon");
  expect_key(with_line(utility_text(), "[run]", "colour = blue"), "run.colour", "unknown key");
  expect_key(replace(utility_text(), "topology = paper10", "topology = ring\nnodes = 7"), "graph.nodes");
  expect_key(replace(utility_text(), "c = 1\nk0 = 0\np = 0.95", "c = -1\nk0 = 0\np = 0.95"), "schedule.slow.c");

  const std::string unbounded = replace(bundled_configs().at("quadrant_projection"), "witness = -1, -1\n", "");
  expect_key(unbounded, "family.witness", "nonempty interior");
  expect_key(bundled_configs().at("quadrant_projection") + "\n[set.3]\nkind = ball\ncenter = 0,0\nradius = 1\n",
             "set.3");
  expect_key(bundled_configs().at("quadrant_projection") + "\n[extras]\nx = 1\n", "extras");
}

TEST_CASE("parse errors are reported as validation errors") {
  CHECK_THROWS_AS(parse_config("[run\nmode = gd\n"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ValidationError);
}

TEST_CASE("config hash changes exactly when content changes") {
  const RunConfig a = parse_config(utility_text());
  const RunConfig b = parse_config("; different comment\n" + utility_text());
  CHECK(config_hash(a) == config_hash(b));
  RunConfig c = a;
  c.seed = 43;
  CHECK(config_hash(a) != config_hash(c));
  RunConfig d = a;
  d.slow->p = 0.96;
  CHECK(config_hash(a) != config_hash(d));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("a one-record history gives a header and one row") {
  const fs::path dir = scratch("one");
  TraceRecord r;
  r.k = 1;
  RunManifest m;
  m.config_hash = "0";
  const auto files = emit_outputs({r}, dir, m);
  CHECK(files.size() == 5);
  const std::string csv = slurp(dir / "trace.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind("k,optimality_error,feasibility_error,disagreement,max_norm_y,stability_flag,", 0) == 0);
  for (const char* gp : {"optimality.gp", "feasibility.gp", "disagreement.gp"}) {
    const std::string script = slurp(dir / gp);
    CHECK(script.find("set logscale y") != std::string::npos);
    CHECK(script.find("trace.csv") != std::string::npos);
  }
  CHECK_THROWS_AS(emit_outputs({}, dir, m), InputError);
  fs::remove_all(dir);
}

TEST_CASE("unwritable output directories raise IoError") {
  const fs::path dir = scratch("io");
  std::ofstream(dir / "file") << "x";
  TraceRecord r;
  CHECK_THROWS_AS(emit_outputs({r}, dir / "file" / "sub", RunManifest{}), IoError);
  fs::remove_all(dir);
}

TEST_CASE("the CLI reports exit codes and writes reproducible outputs") {
  const fs::path dir = scratch("cli");
  const std::string cfg = (fs::path(DSPROJ_SOURCE_DIR) / "configs" / "quadratic_box.ini").string();
  CHECK(cli("validate " + cfg) == 0);
  CHECK(cli("validate paper10_utility") == 0);

  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << replace(utility_text(), "p = 0.95", "p = 0.4");
  CHECK(cli("validate " + bad.string()) == 2);
  CHECK(cli("run " + bad.string()) == 2);
  CHECK(cli("run " + cfg + " --bogus") == 2);

  std::ofstream(dir / "blocker") << "x";
  CHECK(cli(fmt::format("run {} --horizon 50 --output {}", cfg, (dir / "blocker" / "out").string())) == 3);

  CHECK(cli(fmt::format("run {} --horizon 500 --output {}", cfg, (dir / "a").string())) == 0);
  CHECK(cli(fmt::format("run {} --horizon 500 --output {}", cfg, (dir / "b").string())) == 0);
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
  CHECK(cli(fmt::format("run {} --horizon 500 --seed 8 --output {}", cfg, (dir / "c").string())) == 0);
  CHECK(slurp(dir / "a" / "manifest.json") != slurp(dir / "c" / "manifest.json"));

  // output root from the environment when --output is absent
  ::setenv("DSPROJ_OUTPUT_ROOT", (dir / "root").c_str(), 1);
  CHECK(cli(fmt::format("run {} --horizon 20", cfg)) == 0);
  CHECK(fs::exists(dir / "root" / "quadratic_box" / "trace.csv"));
  ::unsetenv("DSPROJ_OUTPUT_ROOT");

  CHECK(cli(fmt::format("run {} --horizon 100 --seeds 1..3 --output {}", cfg, (dir / "sweep").string())) == 0);
  for (int s = 1; s <= 3; ++s) CHECK(fs::exists(dir / "sweep" / fmt::format("seed_{}", s) / "trace.csv"));

  CHECK(cli(fmt::format("project quadrant_projection --output {}", (dir / "p").string())) == 0);
  const std::string pcsv = slurp(dir / "p" / "projection.csv");
  CHECK(pcsv.rfind("k,err_1,err_2,disagreement,residual\n", 0) == 0);

  CHECK(cli(fmt::format("experiment utility --n 4 --horizon 200 --log-every 50 --mode bdh --output {}",
                        (dir / "u").string())) == 0);
  const std::string ucsv = slurp(dir / "u" / "trace.csv");
  CHECK(std::count(ucsv.begin(), ucsv.end(), '\n') == 6);

  // a divergent run: an enormous slow step scale overflows
  const fs::path huge = dir / "huge.ini";
  std::ofstream(huge) << replace(bundled_configs().at("quadratic_box"), "[schedule.slow]\np = 0.95",
                                 "[schedule.slow]\nc = 1e300\np = 0.95");
  CHECK(cli(fmt::format("run {} --horizon 100 --output {}", huge.string(), (dir / "h").string())) == 4);
  fs::remove_all(dir);
}
