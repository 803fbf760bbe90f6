#include "dsproj/kernels.hpp"

#include <fmt/format.h>

#include "dsproj/error.hpp"

namespace dsproj::kernels {

namespace {

void check(const GossipMatrix& q, const Stacked& s, const char* what) {
  if (s.nodes() != q.nodes()) {
    throw InputError(fmt::format("{}: stacked vector has {} blocks, network has {} nodes", what, s.nodes(), q.nodes()));
  }
}

void check_same(const Stacked& a, const Stacked& b, const char* what) {
  if (!a.same_shape(b)) throw InputError(fmt::format("{}: stacked vectors have mismatched shapes", what));
}

void check_family(const SetFamily& f, const Stacked& s, const char* what) {
  if (f.size() != s.nodes() || f.dim() != s.dim()) {
    throw InputError(fmt::format("{}: family ({} sets in R^{}) does not match stacked vector ({} blocks of {})", what,
                                 f.size(), f.dim(), s.nodes(), s.dim()));
  }
}

}  // namespace

void mix(const GossipMatrix& q, const Stacked& in, Stacked& out, Exec exec) {
  check(q, in, "mix");
  if (!out.same_shape(in)) out = Stacked(in.nodes(), in.dim());
  exec == Exec::serial ? serial::mix(q, in, out) : omp::mix(q, in, out);
}

void gd_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& z, const Stacked& targets, double b,
                    Stacked& z_next, Exec exec) {
  check(q, z, "gd_fast_update");
  check_family(family, z, "gd_fast_update");
  check_same(z, targets, "gd_fast_update");
  if (!z_next.same_shape(z)) z_next = Stacked(z.nodes(), z.dim());
  exec == Exec::serial ? serial::gd_fast_update(family, q, z, targets, b, z_next)
                       : omp::gd_fast_update(family, q, z, targets, b, z_next);
}

void bdh_fast_update(const SetFamily& family, const GossipMatrix& q, const Stacked& r, const Stacked& x_prev,
                     Stacked& x, Stacked& proj, Stacked& sum, Exec exec) {
  check(q, r, "bdh_fast_update");
  check_family(family, r, "bdh_fast_update");
  check_same(r, x_prev, "bdh_fast_update");
  for (Stacked* s : {&x, &proj, &sum})
    if (!s->same_shape(r)) *s = Stacked(r.nodes(), r.dim());
  exec == Exec::serial ? serial::bdh_fast_update(family, q, r, x_prev, x, proj, sum)
                       : omp::bdh_fast_update(family, q, r, x_prev, x, proj, sum);
}

void slow_update(const GossipMatrix& q, const Stacked& y, const Stacked& pull, const Stacked& samples, double a,
                 Stacked& y_next, Exec exec) {
  check(q, y, "slow_update");
  check_same(y, pull, "slow_update");
  check_same(y, samples, "slow_update");
  if (!y_next.same_shape(y)) y_next = Stacked(y.nodes(), y.dim());
  exec == Exec::serial ? serial::slow_update(q, y, pull, samples, a, y_next)
                       : omp::slow_update(q, y, pull, samples, a, y_next);
}

}  // namespace dsproj::kernels
