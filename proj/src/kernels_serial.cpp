#include "dsproj/kernels.hpp"
#include "node_ops.hpp"

namespace dsproj::kernels::serial {

void mix(const GossipMatrix& q, const Stacked& in, Stacked& out) {
  const int nodes = in.nodes();
  for (int i = 0; i < nodes; ++i) detail::mix_node(q, in, i, out.block(i));
}

void gd_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& z, const Stacked& targets, double b,
                    Stacked& z_next) {
  const int nodes = z.nodes();
  for (int i = 0; i < nodes; ++i) detail::gd_node(family, q, z, targets, b, z_next, i);
}

void bdh_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& r, const Stacked& x_prev,
                     Stacked& x, Stacked& proj, Stacked& sum) {
  const int nodes = r.nodes();
  // Two passes: every P^j(r^j) must exist before any node mixes.
  for (int i = 0; i < nodes; ++i) detail::bdh_project_node(family, r, x_prev, proj, sum, i);
  for (int i = 0; i < nodes; ++i) detail::bdh_mix_node(q, proj, sum, x, i);
}

void slow_update(const GossipMatrix& q, const Stacked& y, const Stacked& pull, const Stacked& samples, double a,
                 Stacked& y_next) {
  const int nodes = y.nodes();
  for (int i = 0; i < nodes; ++i) detail::slow_node(q, y, pull, samples, a, y_next, i);
}

}  // namespace dsproj::kernels::serial
