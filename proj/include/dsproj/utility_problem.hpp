#pragma once

#include <cstdint>

#include "dsproj/dsa.hpp"
#include "dsproj/geometry.hpp"
#include "dsproj/network.hpp"
#include "dsproj/rng.hpp"

namespace dsproj {

/// Stochastic utility problem
///   min_y E[ phi( sum_i (c_i + xi_i) y_i ) ],  phi(t) = max_k (v_k + s_k t),
/// with c_i = i/n, xi ~ N(0, I), and (v_k, s_k) drawn uniformly from [0, 1].
struct UtilityInstance {
  int n = 0;
  Vec v;  // intercepts, length m
  Vec s;  // slopes, length m
  Vec c;  // c_i = i/n, i = 1..n
  std::uint64_t seed = 0;

  int pieces() const { return static_cast<int>(v.size()); }
};

inline constexpr int kUtilityPieces = 10;

/// Index of the active piece at t; ties go to the lowest index.
int active_piece(const UtilityInstance& inst, double t);

/// Subgradient of F(., xi) at y: s_{k*} (c + xi), k* the active piece at t = <c + xi, y>.
Vec subgradient(const UtilityInstance& inst, const Vec& y, const Vec& xi);

/// Draws xi ~ N(0, I) from `rng` and returns subgradient(inst, y, xi).
Vec sample_subgradient(const UtilityInstance& inst, const Vec& y, NodeRng& rng);

struct UtilityProblem {
  UtilityInstance instance;
  SetFamily family;
  Graph graph;
};

/// n >= 2 variables, N = n + 1 nodes. Node i < n holds {y : y_i >= 0} and
/// node n holds {y : sum_i y_i >= 1}. The graph is the built-in 10-node
/// topology when N = 10 and a ring otherwise.
UtilityProblem build_instance(int n, std::uint64_t seed);

/// Instance with explicit pieces, for tests.
UtilityInstance make_instance(int n, Vec v, Vec s, std::uint64_t seed = 0);

/// Engines minimise, so the oracle returns the negated subgradient sample.
SamplingOracle utility_oracle(const UtilityInstance& inst);

/// Deterministic drift -E[subgradient] estimated with `samples` common random draws of xi.
/// Non-smooth: its Lipschitz spot-check is advisory.
DriftField utility_drift(const UtilityInstance& inst, int samples, std::uint64_t seed);

}  // namespace dsproj
