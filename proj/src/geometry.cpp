#include "dsproj/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dsproj/error.hpp"
#include "dsproj/rng.hpp"

namespace dsproj {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(const ConvexSet& set, Eigen::Index n) {
  if (set.dim() != n) {
    throw InputError(fmt::format("dimension mismatch: set {} has dimension {}, point has {}", set.describe(),
                                 set.dim(), n));
  }
}

bool all_finite(const Vec& v) { return v.allFinite(); }

// Signed slack: positive strictly inside, measured as a distance to the boundary.
double slack(const ConvexSet& set, const Vec& p) { return -set.violation(p); }

}  // namespace

ConvexSet ConvexSet::halfspace(Vec normal, double offset) {
  if (normal.size() == 0) throw ValidationError("halfspace.normal", "empty normal");
  if (!all_finite(normal) || !std::isfinite(offset)) throw ValidationError("halfspace", "non-finite parameters");
  if (!(normal.norm() > 0.0)) throw ValidationError("halfspace.normal", "normal must have positive norm");
  return ConvexSet(Halfspace{std::move(normal), offset});
}

ConvexSet ConvexSet::box(Vec lower, Vec upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw ValidationError("box", "lower and upper must be nonempty and of equal dimension");
  if (!all_finite(lower) || !all_finite(upper)) throw ValidationError("box", "non-finite bounds");
  if ((lower.array() > upper.array()).any()) throw ValidationError("box", "lower must not exceed upper");
  return ConvexSet(Box{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  if (center.size() == 0) throw ValidationError("ball.center", "empty center");
  if (!all_finite(center) || !std::isfinite(radius)) throw ValidationError("ball", "non-finite parameters");
  if (radius < 0.0) throw ValidationError("ball.radius", "radius must be nonnegative");
  return ConvexSet(Ball{std::move(center), radius});
}

Eigen::Index ConvexSet::dim() const {
  return std::visit(overloaded{[](const Halfspace& h) { return h.normal.size(); },
                               [](const Box& b) { return b.lower.size(); },
                               [](const Ball& b) { return b.center.size(); }},
                    shape_);
}

double ConvexSet::violation(const Vec& p) const {
  require_dim(*this, p.size());
  return std::visit(
      overloaded{[&](const Halfspace& h) { return (h.normal.dot(p) - h.offset) / h.normal.norm(); },
                 [&](const Box& b) {
                   return std::max((b.lower - p).maxCoeff(), (p - b.upper).maxCoeff());
                 },
                 [&](const Ball& b) { return (p - b.center).norm() - b.radius; }},
      shape_);
}

std::string ConvexSet::describe() const {
  return std::visit(overloaded{[](const Halfspace& h) { return fmt::format("halfspace(n={})", h.normal.size()); },
                               [](const Box& b) { return fmt::format("box(n={})", b.lower.size()); },
                               [](const Ball& b) { return fmt::format("ball(n={}, r={})", b.center.size(), b.radius); }},
                    shape_);
}

void project_into(const ConvexSet& set, Eigen::Ref<const Vec> p, Eigen::Ref<Vec> out) {
  require_dim(set, p.size());
  if (out.size() != p.size()) throw InputError("project_into: output has wrong dimension");
  std::visit(overloaded{[&](const Halfspace& h) {
                          const double excess = (h.normal.dot(p) - h.offset) / h.normal.squaredNorm();
                          if (excess > 0.0) {
                            out = p - excess * h.normal;
                          } else {
                            out = p;
                          }
                        },
                        [&](const Box& b) { out = p.cwiseMax(b.lower).cwiseMin(b.upper); },
                        [&](const Ball& b) {
                          const double dist = (p - b.center).norm();
                          if (dist <= b.radius) {
                            out = p;
                          } else {
                            out = b.center + (b.radius / dist) * (p - b.center);
                          }
                        }},
             set.shape());
}

Vec project(const ConvexSet& set, const Vec& point) {
  Vec out(point.size());
  project_into(set, point, out);
  return out;
}

bool contains(const ConvexSet& set, const Vec& point, double tol) {
  if (tol < 0.0) throw InputError("contains: tolerance must be nonnegative");
  return set.violation(point) <= tol;
}

namespace {

// A member of the set drawn around `anchor`, built by clamping, radial
// shrinking or reflection rather than by the projection under test.
Vec sample_member(const ConvexSet& set, const Vec& anchor, double scale, NodeRng& rng) {
  const Eigen::Index n = set.dim();
  Vec g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.gaussian();
  return std::visit(overloaded{[&](const Halfspace& h) -> Vec {
                                 Vec y = anchor + scale * g;
                                 const double excess = h.normal.dot(y) - h.offset;
                                 if (excess > 0.0) y -= (2.0 * excess / h.normal.squaredNorm()) * h.normal;
                                 // Reflection can still overshoot by rounding; pull a hair inside.
                                 const double again = h.normal.dot(y) - h.offset;
                                 if (again > 0.0) y -= (again / h.normal.squaredNorm()) * h.normal * (1.0 + 1e-12);
                                 return y;
                               },
                               [&](const Box& b) -> Vec {
                                 Vec y(n);
                                 for (Eigen::Index i = 0; i < n; ++i) {
                                   const double u = rng.uniform();
                                   // Put a third of the coordinates on a face.
                                   if (u < 1.0 / 6.0) {
                                     y[i] = b.lower[i];
                                   } else if (u < 1.0 / 3.0) {
                                     y[i] = b.upper[i];
                                   } else {
                                     y[i] = rng.uniform(b.lower[i], b.upper[i]);
                                   }
                                 }
                                 return y;
                               },
                               [&](const Ball& b) -> Vec {
                                 const double gn = g.norm();
                                 if (gn == 0.0) return b.center;
                                 const double u = rng.uniform();
                                 const double rho = u < 0.3 ? 1.0 : std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
                                 return b.center + (b.radius * rho / gn) * g;
                               }},
                    set.shape());
}

}  // namespace

bool variational_check(const ConvexSet& set, const Vec& point, const Vec& candidate, int probes, double tol,
                       std::uint64_t seed) {
  require_dim(set, point.size());
  require_dim(set, candidate.size());
  if (probes < 1) throw InputError("variational_check: probes must be >= 1");
  if (!contains(set, candidate, std::max(tol, kDefaultTol))) {
    throw InputError("variational_check: candidate is not a member of the set");
  }
  const Vec normal = point - candidate;
  const double scale = 1.0 + normal.norm();
  NodeRng rng(seed, kProbeStream);
  for (int t = 0; t < probes; ++t) {
    const Vec y = sample_member(set, candidate, scale, rng);
    if (normal.dot(y - candidate) > tol) return false;
  }
  return true;
}

SetFamily::SetFamily(std::vector<ConvexSet> sets, std::optional<Vec> witness) : sets_(std::move(sets)) {
  if (sets_.empty()) throw ValidationError("family", "at least one set is required");
  dim_ = static_cast<int>(sets_.front().dim());
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    if (sets_[i].dim() != dim_) {
      throw ValidationError(fmt::format("family.set{}", i),
                            fmt::format("dimension {} differs from family dimension {}", sets_[i].dim(), dim_));
    }
  }

  if (!witness) {
    if (!bounded()) {
      throw ValidationError("family.witness",
                            "a family with an unbounded set needs a witness point strictly inside every set "
                            "(nonempty interior certificate)");
    }
    // Search: Dykstra onto copies of the sets shrunk by delta; any such
    // point has slack >= delta in the originals.
    Vec start = Vec::Zero(dim_);
    for (const auto& s : sets_) {
      if (const auto* b = std::get_if<Box>(&s.shape())) start += 0.5 * (b->lower + b->upper);
      if (const auto* b = std::get_if<Ball>(&s.shape())) start += b->center;
    }
    start /= static_cast<double>(sets_.size());
    for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
      std::vector<ConvexSet> shrunk;
      bool feasible = true;
      for (const auto& s : sets_) {
        if (const auto* b = std::get_if<Box>(&s.shape())) {
          if (((b->upper - b->lower).array() <= 2.0 * delta).any()) {
            feasible = false;
            break;
          }
          shrunk.push_back(ConvexSet::box(b->lower.array() + delta, b->upper.array() - delta));
        } else if (const auto* b = std::get_if<Ball>(&s.shape())) {
          if (b->radius <= delta) {
            feasible = false;
            break;
          }
          shrunk.push_back(ConvexSet::ball(b->center, b->radius - delta));
        } else {
          const auto& h = std::get<Halfspace>(s.shape());
          shrunk.push_back(ConvexSet::halfspace(h.normal, h.offset - delta * h.normal.norm()));
        }
      }
      if (!feasible) continue;
      Vec p = start;
      std::vector<Vec> corr(shrunk.size(), Vec::Zero(dim_));
      for (int cycle = 0; cycle < 20000; ++cycle) {
        const Vec before = p;
        for (std::size_t i = 0; i < shrunk.size(); ++i) {
          const Vec shifted = p + corr[i];
          p = project(shrunk[i], shifted);
          corr[i] = shifted - p;
        }
        if ((p - before).norm() < 1e-12 * (1.0 + p.norm())) break;
      }
      if (margin(p) > 0.5 * delta) {
        witness = p;
        break;
      }
    }
    if (!witness) throw ValidationError("family.witness", "could not certify a nonempty interior; supply a witness");
  }

  if (witness->size() != dim_) {
    throw ValidationError("family.witness", fmt::format("witness has dimension {}, expected {}", witness->size(), dim_));
  }
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    const double m = slack(sets_[i], *witness);
    if (!(m > 0.0)) {
      throw ValidationError("family.witness",
                            fmt::format("witness is not strictly inside set {} (slack {:.3g})", i, m));
    }
  }
  witness_ = *witness;
  margin_ = margin(witness_);
}

bool SetFamily::bounded() const {
  return std::any_of(sets_.begin(), sets_.end(), [](const ConvexSet& s) { return s.bounded(); });
}

double SetFamily::margin(const Vec& point) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : sets_) m = std::min(m, slack(s, point));
  return m;
}

Vec exact_intersection_projection(const SetFamily& family, const Vec& point, double tol, int max_cycles) {
  if (point.size() != family.dim()) {
    throw InputError(fmt::format("dimension mismatch: family has dimension {}, point has {}", family.dim(),
                                 point.size()));
  }
  if (!(tol > 0.0)) throw InputError("exact_intersection_projection: tol must be positive");
  const int m = family.size();
  Vec x = point;
  std::vector<Vec> corr(static_cast<std::size_t>(m), Vec::Zero(family.dim()));
  Vec shifted(family.dim());
  double displacement = std::numeric_limits<double>::infinity();
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    // The iterate alone can stall for whole cycles while the corrections are
    // still unwinding, so the displacement covers both.
    const Vec before = x;
    double corr_change = 0.0;
    for (int i = 0; i < m; ++i) {
      auto& c = corr[static_cast<std::size_t>(i)];
      shifted = x + c;
      project_into(family[i], shifted, x);
      corr_change += (shifted - x - c).squaredNorm();
      c = shifted - x;
    }
    displacement = std::sqrt((x - before).squaredNorm() + corr_change);
    if (displacement < tol) {
      const bool feasible = std::all_of(family.sets().begin(), family.sets().end(),
                                        [&](const ConvexSet& s) { return contains(s, x, 10.0 * tol); });
      if (feasible) return x;
    }
  }
  throw ConvergenceError(fmt::format("Dykstra projection did not converge in {} cycles (displacement {:.3g})",
                                     max_cycles, displacement),
                         x, displacement);
}

}  // namespace dsproj
