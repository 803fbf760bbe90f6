#include "dsproj/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include <fmt/format.h>

#include "dsproj/error.hpp"

namespace dsproj {

double disagreement(const Stacked& v) {
  double d = 0.0;
  for (int i = 0; i < v.nodes(); ++i)
    for (int j = i + 1; j < v.nodes(); ++j) d = std::max(d, (v.block(i) - v.block(j)).norm());
  return d;
}

TraceRecord measure(const DsaState& state, const SetFamily& family, const std::optional<Vec>& reference,
                    double oracle_tol) {
  TraceRecord rec;
  rec.k = state.k;
  const Vec probe = state.y.block(0);
  try {
    rec.feasibility_error = (probe - exact_intersection_projection(family, probe, oracle_tol)).norm();
  } catch (const ConvergenceError& e) {
    fmt::print(stderr, "warning: feasibility oracle failed at k={}: {}\n", state.k, e.what());
    rec.feasibility_error = kOracleFailed;
  }
  if (reference) rec.optimality_error = (probe - *reference).norm();
  rec.disagreement = disagreement(state.y);
  if (state.nodes() >= 4) {
    std::array<double, 6> pairs{};
    constexpr std::array<std::pair<int, int>, 6> idx{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    for (std::size_t p = 0; p < idx.size(); ++p) {
      pairs[p] = (state.y.block(idx[p].first) - state.y.block(idx[p].second)).norm();
    }
    rec.pair_disagreement = pairs;
  }
  rec.max_norm_y = state.stability.running_max();
  rec.stability_flag = state.stability.unstable();
  rec.probe_sum = probe.sum();
  rec.average_identity_residual = state.average_identity_residual;
  rec.x_average_norm = state.x_average_norm;

  try {
    const Vec target = exact_intersection_projection(family, state.y.average(), oracle_tol);
    double worst = 0.0;
    Vec cand(state.dim());
    for (int i = 0; i < state.nodes(); ++i) {
      if (state.mode == DsaMode::gd) {
        cand = state.fast.block(i);
      } else {
        project_into(family[i], state.fast.block(i), cand);
      }
      worst = std::max(worst, (cand - target).norm());
    }
    rec.projection_tracking_error = worst;
  } catch (const ConvergenceError& e) {
    fmt::print(stderr, "warning: tracking oracle failed at k={}: {}\n", state.k, e.what());
    rec.projection_tracking_error = kOracleFailed;
  }
  return rec;
}

}  // namespace dsproj
