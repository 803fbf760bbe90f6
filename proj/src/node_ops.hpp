#pragma once

// Per-node bodies shared by the serial and OpenMP kernels.

#include "dsproj/geometry.hpp"
#include "dsproj/network.hpp"
#include "dsproj/types.hpp"

namespace dsproj::kernels::detail {

inline void mix_node(const GossipMatrix& q, const Stacked& in, int i, Eigen::Ref<Vec> out) {
  const int n = in.dim();
  const double* self = in.flat().data() + static_cast<std::ptrdiff_t>(i) * n;
  double* dst = out.data();
  for (int c = 0; c < n; ++c) dst[c] = 0.0;
  for (const auto& w : q.off_diagonal(i)) {
    const double* other = in.flat().data() + static_cast<std::ptrdiff_t>(w.node) * n;
    for (int c = 0; c < n; ++c) dst[c] += w.value * (other[c] - self[c]);
  }
  for (int c = 0; c < n; ++c) dst[c] = self[c] + dst[c];
}

inline void gd_node(const SetFamily& family, const GossipMatrix& q, const Stacked& z, const Stacked& targets,
                    double b, Stacked& z_next, int i) {
  auto out = z_next.block(i);
  mix_node(q, z, i, out);
  out = out - b * (out - targets.block(i));
  project_into(family[i], out, out);
}

inline void bdh_project_node(const SetFamily& family, const Stacked& r, const Stacked& x_prev, Stacked& proj,
                             Stacked& sum, int i) {
  auto p = proj.block(i);
  project_into(family[i], r.block(i), p);
  sum.block(i) = x_prev.block(i) + p;
}

inline void bdh_mix_node(const GossipMatrix& q, const Stacked& proj, const Stacked& sum, Stacked& x, int i) {
  auto out = x.block(i);
  mix_node(q, sum, i, out);
  out -= proj.block(i);
}

inline void slow_node(const GossipMatrix& q, const Stacked& y, const Stacked& pull, const Stacked& samples, double a,
                      Stacked& y_next, int i) {
  auto out = y_next.block(i);
  mix_node(q, y, i, out);
  const auto yi = y.block(i);
  const auto pi = pull.block(i);
  const auto si = samples.block(i);
  for (Eigen::Index c = 0; c < out.size(); ++c) out[c] = out[c] + a * (pi[c] - yi[c]) + a * si[c];
}

}  // namespace dsproj::kernels::detail
