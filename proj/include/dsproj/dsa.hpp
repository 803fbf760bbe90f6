#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dsproj/error.hpp"
#include "dsproj/geometry.hpp"
#include "dsproj/kernels.hpp"
#include "dsproj/metrics.hpp"
#include "dsproj/network.hpp"
#include "dsproj/schedule.hpp"
#include "dsproj/state.hpp"

namespace dsproj {

/// Per-node drift h^i with a declared Lipschitz constant. `smooth` is false
/// for subgradient fields, where the Lipschitz spot-check is advisory only.
struct DriftField {
  std::function<Vec(int node, const Vec& y)> h;
  double lipschitz = 0.0;
  bool smooth = true;

  /// H(y) = (1/N) sum_i h^i(y).
  Vec aggregate(const Vec& y, int nodes) const;
};

/// Martingale-difference noise M^i given node state, with declared K such
/// that E|M|^2 <= K (1 + |y|^2).
struct NoiseModel {
  std::function<Vec(int node, const Vec& y, NodeRng& rng)> sample;
  double variance_bound = 0.0;
};

/// Source of noisy drift samples h^i(y^i) + M^i; the engines only consume the sum.
struct SamplingOracle {
  std::function<void(int node, const Vec& y, NodeRng& rng, Eigen::Ref<Vec> out)> sample;
};

DriftField zero_drift();
/// h^i(y) = -curvature * (y - centers^i); a single center is shared by all nodes.
DriftField quadratic_drift(std::vector<Vec> centers, double curvature);
NoiseModel no_noise();
/// Isotropic Gaussian with standard deviation sigma per coordinate.
NoiseModel gaussian_noise(double sigma, int dim);
SamplingOracle additive_oracle(DriftField drift, NoiseModel noise);

/// Lipschitz spot-check of h^i on random pairs; returns the largest observed
/// ratio |h(x) - h(y)| / |x - y| over all nodes.
double lipschitz_estimate(const DriftField& drift, int nodes, int dim, int pairs, std::uint64_t seed, double scale = 1.0);

/// DSA-GD starts from z = 0, DSA-BDH from z = 0 and x = 0; y0 is replicated
/// at every node. Node i draws noise from stream i of `seed`.
DsaState start_dsa(DsaMode mode, int nodes, const Vec& y0, std::uint64_t seed);
DsaState start_dsa(DsaMode mode, const Stacked& y0, std::uint64_t seed);

/// One DSA-GD round:
///   z_{k+1}^i = P^i(m^i - b (m^i - y_k^i)),  m = (Q kron I) z_k
///   s^i = h^i(y_k^i) + M_{k+1}^i
///   y_{k+1}^i = ((Q kron I) y_k)^i + a (z_k^i - y_k^i) + a s^i
/// Throws DivergenceError if a coordinate becomes non-finite.
void dsa_gd_step(DsaState& state, const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle,
                 double a, double b, Exec exec = Exec::parallel);

/// One DSA-BDH round, on r = z + y:
///   x_k = (Q kron I)(x_{k-1} + P(r_k)) - P(r_k);   ybar_k = P(r_k)
///   y_{k+1}^i = ((Q kron I) y_k)^i + a (ybar_k^i - y_k^i) + a s^i
///   r_{k+1} = r_k + b x_k + (y_{k+1} - y_k)
void dsa_bdh_step(DsaState& state, const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle,
                  double a, double b, Exec exec = Exec::parallel);

struct DsaOptions {
  DsaMode mode = DsaMode::gd;
  std::int64_t horizon = 10000;
  std::int64_t log_every = 10;
  std::uint64_t seed = 42;
  std::optional<Vec> reference;  // y^{1,*} for the optimality error
  Exec exec = Exec::parallel;
  /// Force a_k = 0 (frozen slow variable), for fast-timescale studies.
  bool freeze_slow = false;
};

struct DsaResult {
  std::vector<TraceRecord> history;
  DsaState final_state;
  PairCertificate certificate;
  double max_average_identity_residual = 0.0;
  double max_x_average_norm = 0.0;
};

/// Divergence during run_dsa; carries the records logged before it.
class RunDiverged : public DivergenceError {
 public:
  RunDiverged(const DivergenceError& cause, std::vector<TraceRecord> history)
      : DivergenceError(cause.what(), cause.iteration(), cause.node()), history_(std::move(history)) {}
  const std::vector<TraceRecord>& history() const { return history_; }

 private:
  std::vector<TraceRecord> history_;
};

/// Runs `horizon` rounds from y0 (replicated) and records a TraceRecord at
/// k = 1 and every `log_every` rounds (and at the horizon).
DsaResult run_dsa(const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle,
                  const PowerLawSchedule& slow, const PowerLawSchedule& fast, const Vec& y0, const DsaOptions& opts);

struct ReferenceSolution {
  Vec y1;                 // node-0 iterate at the stop
  std::int64_t iterations = 0;
  bool threshold_met = false;  // relative displacement fell below the threshold
};

/// Long run used to define y^{1,*}: at least `min_horizon` rounds, then stops
/// once |y^1_{k+1} - y^1_k| / |y_k| < threshold or at `max_horizon`.
ReferenceSolution reference_solution(const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle,
                                     const PowerLawSchedule& slow, const PowerLawSchedule& fast, const Vec& y0,
                                     DsaMode mode, std::uint64_t seed, std::int64_t min_horizon,
                                     std::int64_t max_horizon, double threshold = 1e-8, Exec exec = Exec::parallel);

}  // namespace dsproj
