#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "dsproj/geometry.hpp"
#include "dsproj/state.hpp"

namespace dsproj {

/// Value written when the projection oracle fails to converge.
inline constexpr double kOracleFailed = -1.0;

/// Per-iteration snapshot of a DSA run. Node 0 is the probe node.
struct TraceRecord {
  std::int64_t k = 0;
  double optimality_error = kOracleFailed;  // |y^1_k - y^{1,*}|, kOracleFailed without a reference
  double feasibility_error = 0.0;           // |y^1_k - P_X(y^1_k)|
  double disagreement = 0.0;                // max_{i,j} |y^i_k - y^j_k|
  double max_norm_y = 0.0;                  // running max of |y_k|
  bool stability_flag = false;              // true when flagged unstable
  /// |y^i - y^j| for (i,j) in (1,2),(1,3),(1,4),(2,3),(2,4),(3,4) (1-based); only when N >= 4.
  std::optional<std::array<double, 6>> pair_disagreement;
  double probe_sum = 0.0;                       // sum of the coordinates of y^1
  double average_identity_residual = 0.0;       // see dsa.hpp
  double x_average_norm = 0.0;                  // |<x_k>| (bdh)
  double projection_tracking_error = 0.0;       // max_i |pull^i - P_X(<y_k>)|
};

/// max_{i,j} |v^i - v^j|.
double disagreement(const Stacked& v);

/// Builds the record for the current state. Feasibility uses the Dykstra
/// oracle with tolerance `oracle_tol`; on oracle failure the field holds
/// kOracleFailed and a warning is printed.
TraceRecord measure(const DsaState& state, const SetFamily& family, const std::optional<Vec>& reference,
                    double oracle_tol = kDefaultTol);

}  // namespace dsproj
