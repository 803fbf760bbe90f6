#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dsproj/types.hpp"

namespace dsproj {

/// {x : <normal, x> <= offset}
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

/// {x : lower <= x <= upper}
struct Box {
  Vec lower;
  Vec upper;
};

/// {x : |x - center| <= radius}
struct Ball {
  Vec center;
  double radius = 0.0;
};

/// A closed convex set with a closed-form Euclidean projection.
class ConvexSet {
 public:
  using Shape = std::variant<Halfspace, Box, Ball>;

  static ConvexSet halfspace(Vec normal, double offset);
  static ConvexSet box(Vec lower, Vec upper);
  static ConvexSet ball(Vec center, double radius);

  const Shape& shape() const { return shape_; }
  Eigen::Index dim() const;
  bool bounded() const { return !std::holds_alternative<Halfspace>(shape_); }

  /// Amount by which `point` violates the defining inequality, measured as a
  /// distance (halfspace normals are normalised). Zero or negative inside.
  double violation(const Vec& point) const;

  std::string describe() const;

 private:
  explicit ConvexSet(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

Vec project(const ConvexSet& set, const Vec& point);

/// Allocation-free projection; `out` may alias `point`.
void project_into(const ConvexSet& set, Eigen::Ref<const Vec> point, Eigen::Ref<Vec> out);

bool contains(const ConvexSet& set, const Vec& point, double tol = kDefaultTol);

/// Checks <point - candidate, y - candidate> <= tol on `probes` sampled
/// members y of the set, i.e. that point - candidate lies in the normal cone
/// of the set at candidate. Members are drawn without calling project().
bool variational_check(const ConvexSet& set, const Vec& point, const Vec& candidate, int probes, double tol,
                       std::uint64_t seed = 0);

/// The constraint sets X_1..X_N, one per node, with a certificate that their
/// intersection has nonempty interior.
class SetFamily {
 public:
  /// Throws ValidationError when dimensions disagree, the witness lacks a
  /// strictly positive margin in some set, or no witness is given for a
  /// family containing an unbounded set. A bounded family without a witness
  /// is certified by searching for one.
  explicit SetFamily(std::vector<ConvexSet> sets, std::optional<Vec> witness = std::nullopt);

  int size() const { return static_cast<int>(sets_.size()); }
  int dim() const { return dim_; }
  const ConvexSet& operator[](int i) const { return sets_[static_cast<std::size_t>(i)]; }
  const std::vector<ConvexSet>& sets() const { return sets_; }
  const Vec& witness() const { return witness_; }
  double witness_margin() const { return margin_; }
  bool bounded() const;

  /// min_i of the slack of `point` in set i; positive iff strictly interior to all.
  double margin(const Vec& point) const;

 private:
  std::vector<ConvexSet> sets_;
  int dim_ = 0;
  Vec witness_;
  double margin_ = 0.0;
};

/// Centralised cyclic Dykstra projection onto the intersection of the family.
/// Stops once a full cycle moves the iterate and the correction vectors by
/// less than `tol` in total and every set contains the iterate to 10*tol;
/// throws ConvergenceError after `max_cycles`.
Vec exact_intersection_projection(const SetFamily& family, const Vec& point, double tol = kDefaultTol,
                                  int max_cycles = 200000);

}  // namespace dsproj
