#include "dsproj/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "dsproj/error.hpp"

namespace dsproj {

namespace {

namespace pt = boost::property_tree;

using Section = std::map<std::string, std::string>;
using Document = std::map<std::string, Section>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ValidationError(key, fmt::format("expected a number, got '{}'", text));
  }
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ValidationError(key, fmt::format("expected an integer, got '{}'", text));
  }
  return v;
}

Vec parse_vec(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(key, parts[i]);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ValidationError(key, fmt::format("expected a boolean, got '{}'", text));
}

// Reader over one section that remembers which keys were consumed.
class Keys {
 public:
  Keys(const Document& doc, std::string section) : section_(std::move(section)) {
    if (auto it = doc.find(section_); it != doc.end()) values_ = &it->second;
  }
  bool present() const { return values_ != nullptr; }
  std::string key(const std::string& k) const { return section_ + "." + k; }

  std::optional<std::string> get(const std::string& k) {
    if (!values_) return std::nullopt;
    auto it = values_->find(k);
    if (it == values_->end()) return std::nullopt;
    used_.insert(k);
    return it->second;
  }
  std::string require(const std::string& k) {
    auto v = get(k);
    if (!v) throw ValidationError(key(k), "missing required key");
    return *v;
  }
  void finish() const {
    if (!values_) return;
    for (const auto& [k, v] : *values_) {
      if (!used_.count(k)) throw ValidationError(key(k), "unknown key");
    }
  }

 private:
  std::string section_;
  const Section* values_ = nullptr;
  std::set<std::string> used_;
};

Document read_document(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("{}:{}", origin, e.line()), e.message());
  }
  Document doc;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError(section, "keys must appear inside a [section]");
    Section& s = doc[section];
    for (const auto& [k, v] : body) s[k] = v.get_value<std::string>();
  }
  return doc;
}

ScheduleSpec read_schedule(Keys& keys) {
  ScheduleSpec s;
  if (auto v = keys.get("c")) s.c = parse_double(keys.key("c"), *v);
  if (auto v = keys.get("k0")) s.k0 = parse_double(keys.key("k0"), *v);
  s.p = parse_double(keys.key("p"), keys.require("p"));
  keys.finish();
  return s;
}

std::string fmt_vec(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += fmt::format("{}{:.17g}", i ? "," : "", v[i]);
  return out;
}

PowerLawSchedule make_schedule(const ScheduleSpec& s, StepRole role, const std::string& key) {
  try {
    PowerLawSchedule sched(s.c, s.k0, s.p, role);
    validate_schedule(sched, key);
    return sched;
  } catch (const ValidationError& e) {
    const std::string k = e.key().rfind("schedule.", 0) == 0 && e.key().find('.', 9) == std::string::npos
                              ? key + e.key().substr(8)
                              : e.key();
    throw ValidationError(k, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  const Document doc = read_document(text, origin);
  static const std::set<std::string> fixed{"run", "graph", "problem", "family", "schedule.slow", "schedule.fast",
                                           "initial", "projection", "reference"};
  std::set<std::string> set_sections;
  for (const auto& [name, body] : doc) {
    if (fixed.count(name)) continue;
    if (name.rfind("set.", 0) == 0) {
      set_sections.insert(name);
      continue;
    }
    throw ValidationError(name, "unknown section");
  }

  RunConfig cfg;
  {
    Keys run(doc, "run");
    if (auto v = run.get("name")) cfg.name = trim(*v);
    if (auto v = run.get("mode")) cfg.mode = trim(*v);
    if (auto v = run.get("seed")) cfg.seed = static_cast<std::uint64_t>(parse_int(run.key("seed"), *v));
    if (auto v = run.get("horizon")) cfg.horizon = parse_int(run.key("horizon"), *v);
    if (auto v = run.get("log_every")) cfg.log_every = parse_int(run.key("log_every"), *v);
    if (auto v = run.get("output")) cfg.output = trim(*v);
    run.finish();
  }
  {
    Keys g(doc, "graph");
    cfg.graph_given = g.present();
    if (auto v = g.get("topology")) cfg.graph.topology = trim(*v);
    if (auto v = g.get("nodes")) cfg.graph.nodes = static_cast<int>(parse_int(g.key("nodes"), *v));
    if (auto v = g.get("edges")) {
      cfg.graph.topology = "edges";
      for (const auto& e : split(*v, ',')) {
        const auto ends = split(e, '-');
        if (ends.size() != 2) throw ValidationError(g.key("edges"), fmt::format("edge '{}' is not of the form i-j", e));
        cfg.graph.edges.emplace_back(static_cast<int>(parse_int(g.key("edges"), ends[0])),
                                     static_cast<int>(parse_int(g.key("edges"), ends[1])));
      }
    }
    g.finish();
  }
  {
    Keys p(doc, "problem");
    if (auto v = p.get("kind")) cfg.problem.kind = trim(*v);
    if (auto v = p.get("n")) cfg.problem.n = static_cast<int>(parse_int(p.key("n"), *v));
    if (auto v = p.get("centers")) {
      for (const auto& c : split(*v, ';')) cfg.problem.centers.push_back(parse_vec(p.key("centers"), c));
    }
    if (auto v = p.get("curvature")) cfg.problem.curvature = parse_double(p.key("curvature"), *v);
    if (auto v = p.get("sigma")) cfg.problem.sigma = parse_double(p.key("sigma"), *v);
    p.finish();
  }
  {
    Keys f(doc, "family");
    if (auto v = f.get("dimension")) cfg.dimension = static_cast<int>(parse_int(f.key("dimension"), *v));
    if (auto v = f.get("witness")) cfg.witness = parse_vec(f.key("witness"), *v);
    f.finish();
  }
  // set.<index> sections, ordered by numeric index.
  std::vector<std::pair<std::int64_t, std::string>> ordered;
  for (const auto& name : set_sections) ordered.emplace_back(parse_int(name, name.substr(4)), name);
  std::sort(ordered.begin(), ordered.end());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i].first != static_cast<std::int64_t>(i)) {
      throw ValidationError(ordered[i].second, "set sections must be numbered 0, 1, 2, ... without gaps");
    }
    Keys s(doc, ordered[i].second);
    SetSpec spec;
    spec.kind = trim(s.require("kind"));
    if (spec.kind == "halfspace") {
      spec.normal = parse_vec(s.key("normal"), s.require("normal"));
      spec.offset = parse_double(s.key("offset"), s.require("offset"));
    } else if (spec.kind == "box") {
      spec.lower = parse_vec(s.key("lower"), s.require("lower"));
      spec.upper = parse_vec(s.key("upper"), s.require("upper"));
    } else if (spec.kind == "ball") {
      spec.center = parse_vec(s.key("center"), s.require("center"));
      spec.radius = parse_double(s.key("radius"), s.require("radius"));
    } else {
      throw ValidationError(s.key("kind"), fmt::format("unknown set kind '{}'", spec.kind));
    }
    s.finish();
    cfg.sets.push_back(std::move(spec));
  }
  if (Keys s(doc, "schedule.slow"); s.present()) cfg.slow = read_schedule(s);
  if (Keys s(doc, "schedule.fast"); s.present()) cfg.fast = read_schedule(s);
  {
    Keys in(doc, "initial");
    if (auto v = in.get("y0")) cfg.y0 = parse_vec(in.key("y0"), *v);
    in.finish();
  }
  {
    Keys pr(doc, "projection");
    if (auto v = pr.get("tol")) cfg.projection_tol = parse_double(pr.key("tol"), *v);
    if (auto v = pr.get("max_iter")) cfg.projection_max_iter = parse_int(pr.key("max_iter"), *v);
    if (auto v = pr.get("log_every")) cfg.projection_log_every = parse_int(pr.key("log_every"), *v);
    pr.finish();
  }
  {
    Keys r(doc, "reference");
    if (auto v = r.get("enabled")) cfg.reference = parse_bool(r.key("enabled"), *v);
    if (auto v = r.get("min_horizon")) cfg.reference_min_horizon = parse_int(r.key("min_horizon"), *v);
    if (auto v = r.get("max_horizon")) cfg.reference_max_horizon = parse_int(r.key("max_horizon"), *v);
    if (auto v = r.get("threshold")) cfg.reference_threshold = parse_double(r.key("threshold"), *v);
    r.finish();
  }
  return cfg;
}

ResolvedRun resolve(const RunConfig& cfg) {
  if (cfg.mode != "gd" && cfg.mode != "bdh") throw ValidationError("run.mode", "mode must be 'gd' or 'bdh'");
  if (cfg.horizon < 0) throw ValidationError("run.horizon", "must be >= 0");
  if (cfg.log_every < 1) throw ValidationError("run.log_every", "must be >= 1");
  if (!(cfg.projection_tol > 0.0)) throw ValidationError("projection.tol", "must be positive");
  if (cfg.projection_max_iter < 1) throw ValidationError("projection.max_iter", "must be >= 1");
  if (cfg.projection_log_every < 1) throw ValidationError("projection.log_every", "must be >= 1");
  if (cfg.reference_min_horizon < 1 || cfg.reference_max_horizon < cfg.reference_min_horizon) {
    throw ValidationError("reference.max_horizon", "need 1 <= min_horizon <= max_horizon");
  }

  std::optional<UtilityProblem> utility;
  if (cfg.problem.kind == "utility") {
    if (cfg.problem.n < 2) throw ValidationError("problem.n", "the utility problem needs n >= 2");
    if (!cfg.sets.empty()) throw ValidationError("set.0", "the utility problem defines its own constraint family");
    utility = build_instance(cfg.problem.n, cfg.seed);
  } else if (cfg.problem.kind != "quadratic" && cfg.problem.kind != "zero") {
    throw ValidationError("problem.kind", fmt::format("unknown problem kind '{}'", cfg.problem.kind));
  }

  // Constraint family.
  std::optional<SetFamily> family;
  if (utility) {
    family = utility->family;
  } else {
    if (cfg.sets.empty()) throw ValidationError("set.0", "at least one constraint set is required");
    std::vector<ConvexSet> sets;
    for (std::size_t i = 0; i < cfg.sets.size(); ++i) {
      const SetSpec& s = cfg.sets[i];
      const std::string key = fmt::format("set.{}", i);
      try {
        if (s.kind == "halfspace") {
          sets.push_back(ConvexSet::halfspace(s.normal, s.offset));
        } else if (s.kind == "box") {
          sets.push_back(ConvexSet::box(s.lower, s.upper));
        } else {
          sets.push_back(ConvexSet::ball(s.center, s.radius));
        }
      } catch (const ValidationError& e) {
        throw ValidationError(key, e.what());
      }
      if (cfg.dimension > 0 && sets.back().dim() != cfg.dimension) {
        throw ValidationError(key, fmt::format("dimension {} differs from family.dimension {}", sets.back().dim(),
                                               cfg.dimension));
      }
    }
    family = SetFamily(std::move(sets), cfg.witness);
  }

  // Graph and weights.
  const int nodes = family->size();
  std::optional<Graph> graph;
  if (!cfg.graph_given && utility) {
    graph = utility->graph;
  } else if (cfg.graph.topology == "edges") {
    graph = Graph(cfg.graph.nodes > 0 ? cfg.graph.nodes : nodes, cfg.graph.edges);
  } else {
    graph = Graph::named(cfg.graph.topology, cfg.graph.nodes > 0 ? cfg.graph.nodes : nodes);
  }
  if (graph->nodes() != nodes) {
    throw ValidationError("graph.nodes",
                          fmt::format("graph has {} nodes but the family has {} sets (one per node)", graph->nodes(), nodes));
  }
  GossipMatrix q = metropolis_weights(*graph);

  std::optional<PowerLawSchedule> slow, fast;
  std::optional<PairCertificate> cert;
  if (cfg.slow) slow = make_schedule(*cfg.slow, StepRole::slow, "schedule.slow");
  if (cfg.fast) fast = make_schedule(*cfg.fast, StepRole::fast, "schedule.fast");
  if (slow && fast) cert = validate_pair(*slow, *fast);

  // Drift and noise.
  SamplingOracle oracle;
  const int dim = family->dim();
  if (utility) {
    oracle = utility_oracle(utility->instance);
  } else {
    DriftField drift = zero_drift();
    if (cfg.problem.kind == "quadratic") {
      std::vector<Vec> centers = cfg.problem.centers;
      if (centers.size() == 1) centers.assign(static_cast<std::size_t>(nodes), centers.front());
      if (centers.size() != static_cast<std::size_t>(nodes)) {
        throw ValidationError("problem.centers", fmt::format("need 1 or {} centers, got {}", nodes, centers.size()));
      }
      for (const auto& c : centers)
        if (c.size() != dim) throw ValidationError("problem.centers", "center dimension differs from the family");
      drift = quadratic_drift(std::move(centers), cfg.problem.curvature);
    }
    NoiseModel noise = cfg.problem.sigma > 0.0 ? gaussian_noise(cfg.problem.sigma, dim) : no_noise();
    if (cfg.problem.sigma < 0.0) throw ValidationError("problem.sigma", "must be nonnegative");
    oracle = additive_oracle(std::move(drift), std::move(noise));
  }

  Vec y0;
  if (cfg.y0) {
    if (cfg.y0->size() != dim) throw ValidationError("initial.y0", "dimension differs from the family");
    y0 = *cfg.y0;
  } else if (utility) {
    y0 = Vec::Constant(dim, 1.0 / dim);
  } else {
    y0 = Vec::Zero(dim);
  }

  const bool bdh = cfg.mode == "bdh";
  return ResolvedRun{std::move(*graph),
                     std::move(q),
                     std::move(*family),
                     slow,
                     fast,
                     cert,
                     std::move(oracle),
                     utility ? std::optional<UtilityInstance>(utility->instance) : std::nullopt,
                     std::move(y0),
                     bdh ? DsaMode::bdh : DsaMode::gd,
                     bdh ? ProjectionMode::bdh : ProjectionMode::gd};
}

const std::map<std::string, std::string>& bundled_configs() {
  static const std::map<std::string, std::string> configs{
      {"paper10_utility", R"(; Stochastic utility problem on the 10-node network (n = 9, N = 10).
[run]
name = paper10_utility
mode = gd
seed = 42
horizon = 10000
log_every = 10
output = paper10_utility

[problem]
kind = utility
n = 9

[graph]
topology = paper10

[schedule.slow]
c = 1
k0 = 0
p = 0.95

[schedule.fast]
c = 1
k0 = 0
p = 0.7

[reference]
min_horizon = 10000
max_horizon = 100000
threshold = 1e-8
)"},
      {"quadrant_projection", R"(; Project (1,1) onto {x1 <= 0} and {x2 <= 0} with two nodes.
[run]
name = quadrant_projection
mode = bdh
output = quadrant_projection

[graph]
topology = complete

[family]
dimension = 2
witness = -1, -1

[set.0]
kind = halfspace
normal = 1, 0
offset = 0

[set.1]
kind = halfspace
normal = 0, 1
offset = 0

[schedule.fast]
p = 0.7

[initial]
y0 = 1, 1

[projection]
tol = 1e-6
max_iter = 100000
log_every = 100
)"},
      {"quadratic_box", R"(; Noise-free quadratic drift over the box [0,1]^2, split across three nodes.
[run]
name = quadratic_box
mode = gd
seed = 7
horizon = 20000
log_every = 100
output = quadratic_box

[problem]
kind = quadratic
curvature = 1
centers = 0.2, 0.9; 0.5, 0.6; 0.5, 0.3

[graph]
topology = complete

[family]
dimension = 2
witness = 0.5, 0.5

[set.0]
kind = box
lower = 0, -10
upper = 1, 10

[set.1]
kind = box
lower = -10, 0
upper = 10, 1

[set.2]
kind = ball
center = 0.5, 0.5
radius = 1

[schedule.slow]
p = 0.95

[schedule.fast]
p = 0.7

[reference]
enabled = false
)"},
  };
  return configs;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  std::string origin = path;
  if (std::filesystem::is_regular_file(path)) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot read config '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (auto it = bundled_configs().find(path); it != bundled_configs().end()) {
    text = it->second;
    origin = "bundled:" + path;
  } else {
    throw ValidationError("config", fmt::format("no such file or bundled config '{}'", path));
  }
  RunConfig cfg = parse_config(text, origin);
  resolve(cfg);
  return cfg;
}

std::string canonical(const RunConfig& cfg) {
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) { out += fmt::format("{}={}\n", k, v); };
  line("run.name", cfg.name);
  line("run.mode", cfg.mode);
  line("run.seed", std::to_string(cfg.seed));
  line("run.horizon", std::to_string(cfg.horizon));
  line("run.log_every", std::to_string(cfg.log_every));
  line("run.output", cfg.output);
  line("graph.given", cfg.graph_given ? "1" : "0");
  line("graph.topology", cfg.graph.topology);
  line("graph.nodes", std::to_string(cfg.graph.nodes));
  for (auto [i, j] : cfg.graph.edges) line("graph.edge", fmt::format("{}-{}", i, j));
  line("problem.kind", cfg.problem.kind);
  line("problem.n", std::to_string(cfg.problem.n));
  for (const auto& c : cfg.problem.centers) line("problem.center", fmt_vec(c));
  line("problem.curvature", fmt::format("{:.17g}", cfg.problem.curvature));
  line("problem.sigma", fmt::format("{:.17g}", cfg.problem.sigma));
  line("family.dimension", std::to_string(cfg.dimension));
  line("family.witness", cfg.witness ? fmt_vec(*cfg.witness) : "-");
  for (std::size_t i = 0; i < cfg.sets.size(); ++i) {
    const auto& s = cfg.sets[i];
    line(fmt::format("set.{}", i), fmt::format("{}|{}|{:.17g}|{}|{}|{}|{:.17g}", s.kind, fmt_vec(s.normal), s.offset,
                                               fmt_vec(s.lower), fmt_vec(s.upper), fmt_vec(s.center), s.radius));
  }
  auto sched = [&](std::string_view k, const std::optional<ScheduleSpec>& s) {
    line(k, s ? fmt::format("{:.17g}|{:.17g}|{:.17g}", s->c, s->k0, s->p) : "-");
  };
  sched("schedule.slow", cfg.slow);
  sched("schedule.fast", cfg.fast);
  line("initial.y0", cfg.y0 ? fmt_vec(*cfg.y0) : "-");
  line("projection", fmt::format("{:.17g}|{}|{}", cfg.projection_tol, cfg.projection_max_iter, cfg.projection_log_every));
  line("reference", fmt::format("{}|{}|{}|{:.17g}", cfg.reference, cfg.reference_min_horizon, cfg.reference_max_horizon,
                                cfg.reference_threshold));
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace dsproj
