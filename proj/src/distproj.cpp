#include "dsproj/distproj.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace dsproj {

namespace {

void check_inputs(const ProjectionRun& run, const SetFamily& family, const GossipMatrix& q) {
  if (family.size() != q.nodes()) {
    throw InputError(fmt::format("family has {} sets but the network has {} nodes", family.size(), q.nodes()));
  }
  if (run.z.nodes() != q.nodes() || run.z.dim() != family.dim()) {
    throw InputError("projection state does not match the family and network");
  }
}

double max_deviation(const Stacked& s, const Vec& mean) {
  double d = 0.0;
  for (int i = 0; i < s.nodes(); ++i) d = std::max(d, (s.block(i) - mean).norm());
  return d;
}

}  // namespace

ProjectionRun start_projection(ProjectionMode mode, int nodes, const Vec& y0) {
  if (nodes < 1) throw InputError("projection needs at least one node");
  ProjectionRun run;
  run.mode = mode;
  run.y0 = y0;
  run.targets = Stacked::replicate(nodes, y0);
  run.z = run.targets;
  run.x = Stacked(nodes, static_cast<int>(y0.size()));
  return run;
}

void gd_projection_step(ProjectionRun& run, const SetFamily& family, const GossipMatrix& q, double b,
                        const Stacked& targets, Exec exec) {
  check_inputs(run, family, q);
  if (!(b > 0.0)) throw InputError("step size must be positive");
  kernels::gd_fast_update(family, q, run.z, targets, b, run.next, exec);
  std::swap(run.z, run.next);
  ++run.k;
}

void bdh_projection_step(ProjectionRun& run, const SetFamily& family, const GossipMatrix& q, double b, Exec exec) {
  check_inputs(run, family, q);
  if (!(b > 0.0)) throw InputError("step size must be positive");
  kernels::bdh_fast_update(family, q, run.z, run.x, run.next, run.proj, run.sum, exec);
  std::swap(run.x, run.next);
  Vec& z = run.z.flat();
  const Vec& x = run.x.flat();
  for (Eigen::Index c = 0; c < z.size(); ++c) z[c] += b * x[c];
  ++run.k;

  // |x_k| <= gamma^k |x_0 + P(r_1)| + 2C/(1 - gamma) with C = sup |P(r)|;
  // checked with a 10x allowance on the transient term.
  run.max_projection_norm = std::max(run.max_projection_norm, run.proj.norm());
  const double xn = run.x.norm();
  if (run.first_x_norm < 0.0) run.first_x_norm = xn;
  const double gamma = q.spectral_gap();
  const double bound = 10.0 * run.first_x_norm + 2.0 * run.max_projection_norm / (1.0 - gamma) + 1e-12;
  if (xn > bound) run.x_bound_exceeded = true;
}

Stacked projection_candidates(const ProjectionRun& run, const SetFamily& family) {
  if (run.mode == ProjectionMode::gd) return run.z;
  Stacked out(run.z.nodes(), run.z.dim());
  for (int i = 0; i < run.z.nodes(); ++i) project_into(family[i], run.z.block(i), out.block(i));
  return out;
}

ProjectionNotConverged::ProjectionNotConverged(ProjectionResult result)
    : ConvergenceError(fmt::format("distributed projection did not converge in {} iterations (residual {:.3g})",
                                   result.iterations, result.residual),
                       result.answer, result.residual),
      result_(std::move(result)) {}

ProjectionResult run_projection(ProjectionMode mode, const SetFamily& family, const GossipMatrix& q,
                                const PowerLawSchedule& schedule, const Vec& y0, const StopRule& stop, Exec exec) {
  if (!(stop.tol > 0.0)) throw InputError("stop.tol must be positive");
  if (stop.max_iter < 1 || stop.log_every < 1) throw InputError("stop.max_iter and stop.log_every must be >= 1");
  if (y0.size() != family.dim()) throw InputError("initial point dimension does not match the family");

  ProjectionResult result;
  try {
    result.oracle = exact_intersection_projection(family, y0);
  } catch (const ConvergenceError&) {
    result.oracle.reset();
  }

  ProjectionRun run = start_projection(mode, q.nodes(), y0);
  Vec prev_mean = projection_candidates(run, family).average();
  double residual = std::numeric_limits<double>::infinity();

  auto record = [&](const Stacked& cand, const Vec& mean) {
    ProjectionRecord rec;
    rec.k = run.k;
    rec.disagreement = max_deviation(cand, mean);
    rec.residual = residual;
    for (int i = 0; i < cand.nodes(); ++i) {
      rec.node_error.push_back(result.oracle ? (cand.block(i) - *result.oracle).norm() : -1.0);
    }
    result.history.push_back(std::move(rec));
  };

  while (run.k < stop.max_iter) {
    const double b = schedule.value(run.k + 1);
    if (mode == ProjectionMode::gd) {
      gd_projection_step(run, family, q, b, run.targets, exec);
    } else {
      bdh_projection_step(run, family, q, b, exec);
    }
    const Stacked cand = projection_candidates(run, family);
    const Vec mean = cand.average();
    residual = max_deviation(cand, mean) + (mean - prev_mean).norm();
    prev_mean = mean;
    const bool done = residual < stop.tol;
    if (run.k == 1 || run.k % stop.log_every == 0 || done || run.k == stop.max_iter) record(cand, mean);
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.answer = prev_mean;
  result.iterations = run.k;
  result.residual = residual;
  result.x_bound_exceeded = run.x_bound_exceeded;
  if (!result.converged) throw ProjectionNotConverged(std::move(result));
  return result;
}

}  // namespace dsproj
