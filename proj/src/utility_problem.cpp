#include "dsproj/utility_problem.hpp"

#include <memory>
#include <vector>

#include "dsproj/error.hpp"

namespace dsproj {

int active_piece(const UtilityInstance& inst, double t) {
  int best = 0;
  double best_value = inst.v[0] + inst.s[0] * t;
  for (int k = 1; k < inst.pieces(); ++k) {
    const double value = inst.v[k] + inst.s[k] * t;
    if (value > best_value) {
      best = k;
      best_value = value;
    }
  }
  return best;
}

Vec subgradient(const UtilityInstance& inst, const Vec& y, const Vec& xi) {
  if (y.size() != inst.n || xi.size() != inst.n) throw InputError("utility subgradient: dimension mismatch");
  const Vec coeff = inst.c + xi;
  return inst.s[active_piece(inst, coeff.dot(y))] * coeff;
}

Vec sample_subgradient(const UtilityInstance& inst, const Vec& y, NodeRng& rng) {
  Vec xi(inst.n);
  for (int i = 0; i < inst.n; ++i) xi[i] = rng.gaussian();
  return subgradient(inst, y, xi);
}

UtilityInstance make_instance(int n, Vec v, Vec s, std::uint64_t seed) {
  if (n < 1) throw ValidationError("problem.n", "dimension must be positive");
  if (v.size() == 0 || v.size() != s.size()) throw ValidationError("problem", "piece constants must be nonempty and paired");
  UtilityInstance inst;
  inst.n = n;
  inst.v = std::move(v);
  inst.s = std::move(s);
  inst.c = Vec::LinSpaced(n, 1.0, static_cast<double>(n)) / static_cast<double>(n);
  inst.seed = seed;
  return inst;
}

UtilityProblem build_instance(int n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("problem.n", "the utility problem needs n >= 2");
  NodeRng rng(seed, kInstanceStream);
  Vec v(kUtilityPieces), s(kUtilityPieces);
  for (int k = 0; k < kUtilityPieces; ++k) {
    v[k] = rng.uniform();
    s[k] = rng.uniform();
  }
  UtilityInstance inst = make_instance(n, std::move(v), std::move(s), seed);

  std::vector<ConvexSet> sets;
  sets.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    Vec normal = Vec::Zero(n);
    normal[i] = -1.0;  // -y_i <= 0
    sets.push_back(ConvexSet::halfspace(std::move(normal), 0.0));
  }
  sets.push_back(ConvexSet::halfspace(-Vec::Ones(n), -1.0));  // -sum y <= -1
  const Vec witness = Vec::Constant(n, 2.0 / n);
  SetFamily family(std::move(sets), witness);
  const int nodes = n + 1;
  Graph graph = nodes == 10 ? Graph::paper10() : Graph::ring(nodes);
  return UtilityProblem{std::move(inst), std::move(family), std::move(graph)};
}

SamplingOracle utility_oracle(const UtilityInstance& inst) {
  return SamplingOracle{[inst](int, const Vec& y, NodeRng& rng, Eigen::Ref<Vec> out) {
    out = -sample_subgradient(inst, y, rng);
  }};
}

DriftField utility_drift(const UtilityInstance& inst, int samples, std::uint64_t seed) {
  if (samples < 1) throw InputError("utility_drift needs at least one sample");
  auto draws = std::make_shared<std::vector<Vec>>();
  NodeRng rng(seed, kProbeStream);
  for (int t = 0; t < samples; ++t) {
    Vec xi(inst.n);
    for (int i = 0; i < inst.n; ++i) xi[i] = rng.gaussian();
    draws->push_back(std::move(xi));
  }
  return DriftField{[inst, draws](int, const Vec& y) -> Vec {
                      Vec acc = Vec::Zero(inst.n);
                      for (const Vec& xi : *draws) acc += subgradient(inst, y, xi);
                      return -acc / static_cast<double>(draws->size());
                    },
                    inst.s.maxCoeff() * (inst.c.norm() + std::sqrt(static_cast<double>(inst.n))), false};
}

}  // namespace dsproj
