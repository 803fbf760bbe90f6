#pragma once

#include "dsproj/geometry.hpp"
#include "dsproj/network.hpp"
#include "dsproj/types.hpp"

namespace dsproj {

/// How the per-node loop of a synchronous round is executed. Both policies
/// compute every node with identical arithmetic, so results are bit-identical.
enum class Exec { serial, parallel };

namespace kernels {

// All kernels read only their inputs and write only their outputs; outputs
// must not alias inputs unless stated.

/// out = (Q kron I_n) in, evaluated as in^i + sum_{j != i} q_ij (in^j - in^i)
/// so that a consensus vector is reproduced exactly.
void mix(const GossipMatrix& q, const Stacked& in, Stacked& out, Exec exec);

/// z_next^i = P^i(m^i - b (m^i - target^i)) with m = (Q kron I_n) z.
void gd_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& z, const Stacked& targets, double b,
                    Stacked& z_next, Exec exec);

/// proj^i = P^i(r^i); x = (Q kron I_n)(x_prev + proj) - proj.
/// `sum` is scratch space of the same shape.
void bdh_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& r, const Stacked& x_prev,
                     Stacked& x, Stacked& proj, Stacked& sum, Exec exec);

/// y_next^i = ((Q kron I_n) y)^i + a (pull^i - y^i) + a sample^i.
void slow_update(const GossipMatrix& q, const Stacked& y, const Stacked& pull, const Stacked& samples, double a,
                 Stacked& y_next, Exec exec);

namespace serial {
void mix(const GossipMatrix& q, const Stacked& in, Stacked& out);
void gd_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& z, const Stacked& targets, double b,
                    Stacked& z_next);
void bdh_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& r, const Stacked& x_prev,
                     Stacked& x, Stacked& proj, Stacked& sum);
void slow_update(const GossipMatrix& q, const Stacked& y, const Stacked& pull, const Stacked& samples, double a,
                 Stacked& y_next);
}  // namespace serial

namespace omp {
void mix(const GossipMatrix& q, const Stacked& in, Stacked& out);
void gd_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& z, const Stacked& targets, double b,
                    Stacked& z_next);
void bdh_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& r, const Stacked& x_prev,
                     Stacked& x, Stacked& proj, Stacked& sum);
void slow_update(const GossipMatrix& q, const Stacked& y, const Stacked& pull, const Stacked& samples, double a,
                 Stacked& y_next);
}  // namespace omp

}  // namespace kernels
}  // namespace dsproj
