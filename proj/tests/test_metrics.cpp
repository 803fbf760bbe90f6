#include <doctest.h>

#include "dsproj/dsa.hpp"
#include "dsproj/metrics.hpp"

using namespace dsproj;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("feasible consensus at the reference gives zero errors") {
  SetFamily fam({ConvexSet::box(v2(0, 0), v2(1, 1)), ConvexSet::ball(v2(0, 0), 1.0)});
  DsaState s = start_dsa(DsaMode::gd, 2, v2(0.3, 0.4), 1);
  s.fast = s.y;
  const TraceRecord r = measure(s, fam, v2(0.3, 0.4));
  CHECK(r.optimality_error == 0.0);
  CHECK(r.feasibility_error <= 1e-9);
  CHECK(r.disagreement == 0.0);
  CHECK(r.projection_tracking_error <= 1e-9);
  CHECK_FALSE(r.pair_disagreement.has_value());
}

TEST_CASE("disagreement is the largest pairwise distance") {
  Stacked s = Stacked::replicate(5, v2(1, 1));
  s.block(3) = v2(4, 5);
  CHECK(disagreement(s) == doctest::Approx(5.0));
  CHECK(disagreement(Stacked::replicate(4, v2(2, -1))) == 0.0);
}

TEST_CASE("disagreement is symmetric in the node order") {
  NodeRng rng(3, 0);
  Stacked s(6, 3);
  for (Eigen::Index i = 0; i < s.flat().size(); ++i) s.flat()[i] = rng.gaussian();
  Stacked reversed(6, 3);
  for (int i = 0; i < 6; ++i) reversed.block(i) = s.block(5 - i);
  CHECK(disagreement(s) == disagreement(reversed));
  double brute = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) brute = std::max(brute, (s.block(i) - s.block(j)).norm());
  CHECK(disagreement(s) == doctest::Approx(brute).epsilon(1e-15));
}

TEST_CASE("feasibility error against one halfspace is the analytic distance") {
  NodeRng rng(4, 0);
  for (int t = 0; t < 50; ++t) {
    Vec a(3), y(3);
    for (int d = 0; d < 3; ++d) {
      a[d] = rng.gaussian();
      y[d] = 3 * rng.gaussian();
    }
    const double b = rng.gaussian();
    SetFamily fam({ConvexSet::halfspace(a, b)}, Vec(a * (b - 1.0) / a.squaredNorm()));
    DsaState s = start_dsa(DsaMode::gd, 1, y, 1);
    const TraceRecord r = measure(s, fam, std::nullopt);
    CHECK(r.feasibility_error == doctest::Approx(std::max(0.0, (a.dot(y) - b) / a.norm())).epsilon(1e-9));
    CHECK(r.optimality_error == kOracleFailed);
  }
}

TEST_CASE("pair columns appear with four or more nodes and measure is repeatable") {
  SetFamily fam({ConvexSet::ball(v2(0, 0), 2.0), ConvexSet::ball(v2(0, 0), 2.0), ConvexSet::ball(v2(0, 0), 2.0),
                 ConvexSet::ball(v2(0, 0), 2.0)});
  Stacked y(4, 2);
  y.block(0) = v2(0, 0);
  y.block(1) = v2(1, 0);
  y.block(2) = v2(0, 2);
  y.block(3) = v2(3, 4);
  DsaState s = start_dsa(DsaMode::bdh, y, 1);
  const TraceRecord r = measure(s, fam, v2(0, 0));
  REQUIRE(r.pair_disagreement.has_value());
  CHECK((*r.pair_disagreement)[0] == doctest::Approx(1.0));
  CHECK((*r.pair_disagreement)[2] == doctest::Approx(5.0));
  CHECK(r.disagreement == doctest::Approx(5.0));
  CHECK(r.probe_sum == 0.0);
  const TraceRecord again = measure(s, fam, v2(0, 0));
  CHECK(again.feasibility_error == r.feasibility_error);
  CHECK(again.projection_tracking_error == r.projection_tracking_error);
  CHECK(r.feasibility_error >= 0.0);
}
