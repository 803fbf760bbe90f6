#pragma once

#include <cstdint>
#include <vector>

#include "dsproj/rng.hpp"
#include "dsproj/types.hpp"

namespace dsproj {

enum class DsaMode { gd, bdh };

/// Watches sup_k |y_k|. The run is flagged unstable when the largest norm
/// seen during a decade of iterations [10^d, 10^{d+1}) exceeds ten times the
/// largest norm of the previous decade. The flag is sticky.
class StabilityMonitor {
 public:
  void observe(std::int64_t k, double norm);
  double running_max() const { return running_max_; }
  bool unstable() const { return unstable_; }

 private:
  int decade_ = -1;
  double current_max_ = 0.0;
  double previous_max_ = -1.0;
  double running_max_ = 0.0;
  bool unstable_ = false;
};

/// Iterates of the two-timescale scheme. For DSA-BDH the fast variable is
/// stored shifted, r = z + y, which is the quantity the local projections
/// act on; z() recovers z.
struct DsaState {
  DsaMode mode = DsaMode::gd;
  Stacked y;
  Stacked fast;  // z (gd) or r = z + y (bdh)
  Stacked x;     // bdh correction vectors
  std::int64_t k = 0;  // completed rounds
  std::vector<NodeRng> rngs;
  StabilityMonitor stability;

  // Quantities of the most recent round, kept for invariant checks.
  Stacked last_samples;         // h^i(y^i) + M^i
  Stacked last_pull;            // z_k (gd) or P^i(y_k^i + z_k^i) (bdh)
  double last_a = 0.0;
  double average_identity_residual = 0.0;  // see dsa.hpp
  double x_average_norm = 0.0;             // |<x_k>|, bdh only

  // scratch
  Stacked next_y;
  Stacked next_fast;
  Stacked next_x;
  Stacked proj;
  Stacked sum;

  int nodes() const { return y.nodes(); }
  int dim() const { return y.dim(); }
  Stacked z() const;
};

}  // namespace dsproj
