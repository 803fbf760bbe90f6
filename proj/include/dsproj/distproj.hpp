#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsproj/error.hpp"
#include "dsproj/geometry.hpp"
#include "dsproj/kernels.hpp"
#include "dsproj/network.hpp"
#include "dsproj/schedule.hpp"
#include "dsproj/types.hpp"

namespace dsproj {

enum class ProjectionMode { gd, bdh };

/// State of a distributed projection of a point y0 onto the intersection of
/// the family. In gd mode each node keeps z^i in its own set; in bdh mode the
/// pair (z, x) follows the correction-vector recursion with z_0^i = y0 and
/// x_0 = 0.
struct ProjectionRun {
  ProjectionMode mode = ProjectionMode::gd;
  Vec y0;
  Stacked targets;  // y0 at every node
  Stacked z;
  Stacked x;
  std::int64_t k = 0;  // completed steps

  // Largest |P(z_k)| seen so far and the Lemma-style bound it implies for
  // |x_k|; only maintained in bdh mode.
  double max_projection_norm = 0.0;
  double first_x_norm = -1.0;
  bool x_bound_exceeded = false;

  // scratch
  Stacked proj;
  Stacked sum;
  Stacked next;
};

ProjectionRun start_projection(ProjectionMode mode, int nodes, const Vec& y0);

/// One round of z^i <- P^i(m^i - b (m^i - target^i)), m = (Q kron I) z.
void gd_projection_step(ProjectionRun& run, const SetFamily& family, const GossipMatrix& q, double b,
                        const Stacked& targets, Exec exec = Exec::parallel);

/// One round of x_k = (Q kron I)(x_{k-1} + P(z_k)) - P(z_k), z_{k+1} = z_k + b x_k.
void bdh_projection_step(ProjectionRun& run, const SetFamily& family, const GossipMatrix& q, double b,
                         Exec exec = Exec::parallel);

/// Per-node estimates of the projection: z^i in gd mode, P^i(z^i) in bdh mode.
Stacked projection_candidates(const ProjectionRun& run, const SetFamily& family);

struct ProjectionRecord {
  std::int64_t k = 0;
  std::vector<double> node_error;  // |candidate_i - oracle|, -1 when no oracle
  double disagreement = 0.0;       // max_i |candidate_i - mean candidate|
  double residual = 0.0;           // disagreement + displacement of the mean
};

struct StopRule {
  double tol = 1e-6;
  std::int64_t max_iter = 100000;
  std::int64_t log_every = 100;
};

struct ProjectionResult {
  Vec answer;
  std::optional<Vec> oracle;  // Dykstra projection of y0, if it converged
  std::vector<ProjectionRecord> history;
  std::int64_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool x_bound_exceeded = false;
};

/// Raised by run_projection when max_iter is exhausted; carries the full result.
class ProjectionNotConverged : public ConvergenceError {
 public:
  explicit ProjectionNotConverged(ProjectionResult result);
  const ProjectionResult& result() const { return result_; }

 private:
  ProjectionResult result_;
};

/// Iterates until disagreement + displacement of the mean candidate drops
/// below stop.tol; the answer is the average of the node candidates.
ProjectionResult run_projection(ProjectionMode mode, const SetFamily& family, const GossipMatrix& q,
                                const PowerLawSchedule& schedule, const Vec& y0, const StopRule& stop,
                                Exec exec = Exec::parallel);

}  // namespace dsproj
