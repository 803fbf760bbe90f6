#include <doctest.h>

#include "dsproj/distproj.hpp"
#include "dsproj/dsa.hpp"
#include "dsproj/error.hpp"
#include "dsproj/utility_problem.hpp"
#include "oracles.hpp"

using namespace dsproj;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

const PowerLawSchedule kSlow(1, 0, 0.95), kFast(1, 0, 0.7, StepRole::fast);

SetFamily box_and_ball() {
  return SetFamily({ConvexSet::box(v2(0, 0), v2(1, 1)), ConvexSet::ball(v2(0.5, 0.5), 0.6),
                    ConvexSet::halfspace(v2(1, 1), 1.5)},
                   v2(0.5, 0.5));
}

Stacked random_stacked(int nodes, int dim, std::uint64_t seed, double scale = 1.0) {
  NodeRng rng(seed, 0);
  Stacked s(nodes, dim);
  for (Eigen::Index i = 0; i < s.flat().size(); ++i) s.flat()[i] = scale * rng.gaussian();
  return s;
}

SamplingOracle noise_free(DriftField d) { return additive_oracle(std::move(d), no_noise()); }

}  // namespace

TEST_CASE("DSA-GD fixed point") {
  const SetFamily fam = box_and_ball();
  const GossipMatrix q = metropolis_weights(Graph::complete(3));
  const SamplingOracle o = noise_free(zero_drift());
  DsaState s = start_dsa(DsaMode::gd, 3, v2(0.4, 0.7), 1);
  s.fast = s.y;
  const Stacked y0 = s.y;
  for (int k = 1; k <= 100; ++k) dsa_gd_step(s, fam, q, o, kSlow.value(k), kFast.value(k));
  CHECK(s.y == y0);
  CHECK(s.fast == y0);
}

TEST_CASE("DSA-BDH fixed point") {
  const SetFamily fam = box_and_ball();
  const GossipMatrix q = metropolis_weights(Graph::complete(3));
  const SamplingOracle o = noise_free(zero_drift());
  DsaState s = start_dsa(DsaMode::bdh, 3, v2(0.4, 0.7), 1);
  const Stacked y0 = s.y;
  for (int k = 1; k <= 100; ++k) {
    dsa_bdh_step(s, fam, q, o, kSlow.value(k), kFast.value(k));
    CHECK(s.x.norm() == 0.0);
    CHECK(s.z().norm() == 0.0);
  }
  CHECK(s.y == y0);
}

TEST_CASE("single-node DSA-GD matches a direct implementation") {
  Vec lo = Vec::Constant(2, -100), hi = Vec::Constant(2, 100);
  SetFamily fam({ConvexSet::box(lo, hi)});
  const GossipMatrix q = metropolis_weights(Graph(1, {}));
  const Vec center = v2(3, -2);
  const double curv = 0.8;
  const SamplingOracle o = noise_free(quadratic_drift({center}, curv));
  DsaState s = start_dsa(DsaMode::gd, 1, v2(1, 1), 5);

  Vec y = v2(1, 1), z = Vec::Zero(2);
  for (int k = 1; k <= 2000; ++k) {
    const double a = kSlow.value(k), b = kFast.value(k);
    const Vec z_next = (z - b * (z - y)).cwiseMax(lo).cwiseMin(hi);
    const Vec h = -curv * (y - center);
    y = y + a * (z - y) + a * h;
    z = z_next;
    dsa_gd_step(s, fam, q, o, a, b);
    CHECK((s.y.block(0) - y).norm() <= 1e-12);
    CHECK((s.fast.block(0) - z).norm() <= 1e-12);
  }
}

TEST_CASE("frozen slow DSA-BDH is the standalone BDH projection on r") {
  NodeRng rng(8, 0);
  const int nodes = 5;
  std::vector<ConvexSet> sets;
  const Vec w = Vec::Zero(3);
  for (int i = 0; i < nodes; ++i) sets.push_back(oracle::random_set_around(w, 0.2, i, rng));
  const SetFamily fam(std::move(sets), w);
  const GossipMatrix q = metropolis_weights(Graph(nodes, oracle::random_connected_edges(nodes, rng)));
  Vec y(3);
  y << 1.5, -2.0, 0.7;
  const SamplingOracle o = additive_oracle(quadratic_drift({y}, 1.0), gaussian_noise(0.3, 3));
  DsaState s = start_dsa(DsaMode::bdh, nodes, y, 3);
  ProjectionRun ref = start_projection(ProjectionMode::bdh, nodes, y);
  for (int k = 1; k <= 1000; ++k) {
    dsa_bdh_step(s, fam, q, o, 0.0, kFast.value(k));
    bdh_projection_step(ref, fam, q, kFast.value(k));
    REQUIRE(s.fast == ref.z);
    REQUIRE(s.x == ref.x);
  }
  CHECK(s.y == Stacked::replicate(nodes, y));
  CHECK((s.fast.average() - y).norm() <= 1e-9);
  CHECK(s.x.average().norm() <= 1e-9);
}

TEST_CASE("with the slow step frozen the fast variable tracks the projection of the average") {
  const SetFamily fam = box_and_ball();
  const GossipMatrix q = metropolis_weights(Graph::path(3));
  const SamplingOracle o = noise_free(zero_drift());
  Stacked y0 = random_stacked(3, 2, 4, 2.0);
  const Vec target = exact_intersection_projection(fam, y0.average());
  for (DsaMode mode : {DsaMode::gd, DsaMode::bdh}) {
    DsaState s = start_dsa(mode, y0, 1);
    for (int k = 1; k <= 200000; ++k) {
      if (mode == DsaMode::gd) {
        dsa_gd_step(s, fam, q, o, 0.0, kFast.value(k));
      } else {
        dsa_bdh_step(s, fam, q, o, 0.0, kFast.value(k));
      }
    }
    for (int i = 0; i < 3; ++i) {
      const Vec cand = mode == DsaMode::gd ? Vec(s.fast.block(i)) : project(fam[i], s.fast.block(i));
      // gd carries an O(b_k) bias; bdh converges to the exact projection
      CHECK((cand - target).norm() <= (mode == DsaMode::gd ? 1e-2 : 1e-3));
    }
  }
}

TEST_CASE("consensus error contracts at the gossip rate up to the slow correction") {
  const SetFamily fam = box_and_ball();
  const GossipMatrix q = metropolis_weights(Graph::ring(3));
  const SamplingOracle o = noise_free(zero_drift());
  DsaState s = start_dsa(DsaMode::gd, random_stacked(3, 2, 6, 3.0), 1);
  auto deviation = [](const Stacked& v) {
    const Vec avg = v.average();
    double d = 0.0;
    for (int i = 0; i < v.nodes(); ++i) d += (v.block(i) - avg).squaredNorm();
    return std::sqrt(d);
  };
  const double first = deviation(s.y);
  for (int k = 1; k <= 300; ++k) {
    const double before = deviation(s.y);
    Stacked diff = s.fast;
    diff.flat() -= s.y.flat();
    const double a = kSlow.value(k);
    dsa_gd_step(s, fam, q, o, a, kFast.value(k));
    CHECK(deviation(s.y) <= q.spectral_gap() * before + a * deviation(diff) * (1 + 1e-9) + 1e-14);
  }
  CHECK(deviation(s.y) < 1e-3 * first);
}

TEST_CASE("the per-step average identity holds with noise") {
  const SetFamily fam = box_and_ball();
  const GossipMatrix q = metropolis_weights(Graph::complete(3));
  const SamplingOracle o = additive_oracle(quadratic_drift({v2(2, 2)}, 1.0), gaussian_noise(0.5, 2));
  for (DsaMode mode : {DsaMode::gd, DsaMode::bdh}) {
    DsaState s = start_dsa(mode, 3, v2(0, 0), 9);
    for (int k = 1; k <= 2000; ++k) {
      if (mode == DsaMode::gd) {
        dsa_gd_step(s, fam, q, o, kSlow.value(k), kFast.value(k));
      } else {
        dsa_bdh_step(s, fam, q, o, kSlow.value(k), kFast.value(k));
      }
      CHECK(s.average_identity_residual <= 1e-12);
    }
  }
}

TEST_CASE("run_dsa bookkeeping") {
  const SetFamily fam = box_and_ball();
  const GossipMatrix q = metropolis_weights(Graph::complete(3));
  const SamplingOracle o = additive_oracle(zero_drift(), gaussian_noise(0.1, 2));
  DsaOptions opts;
  opts.horizon = 0;
  CHECK(run_dsa(fam, q, o, kSlow, kFast, v2(0, 0), opts).history.empty());

  opts.horizon = 95;
  opts.log_every = 10;
  const DsaResult r = run_dsa(fam, q, o, kSlow, kFast, v2(0, 0), opts);
  REQUIRE(r.history.size() == 11);
  CHECK(r.history.front().k == 1);
  CHECK(r.history[1].k == 10);
  CHECK(r.history.back().k == 95);

  CHECK_THROWS_AS(run_dsa(fam, q, o, kFast, kSlow, v2(0, 0), opts), ValidationError);
}

TEST_CASE("runs are deterministic across repetitions and execution policies") {
  const auto prob = build_instance(4, 17);
  const GossipMatrix q = metropolis_weights(prob.graph);
  const SamplingOracle o = utility_oracle(prob.instance);
  for (DsaMode mode : {DsaMode::gd, DsaMode::bdh}) {
    DsaOptions opts;
    opts.mode = mode;
    opts.horizon = 500;
    opts.seed = 3;
    const DsaResult a = run_dsa(prob.family, q, o, kSlow, kFast, Vec::Constant(4, 0.25), opts);
    const DsaResult b = run_dsa(prob.family, q, o, kSlow, kFast, Vec::Constant(4, 0.25), opts);
    opts.exec = Exec::serial;
    const DsaResult c = run_dsa(prob.family, q, o, kSlow, kFast, Vec::Constant(4, 0.25), opts);
    CHECK(a.final_state.y == b.final_state.y);
    CHECK(a.final_state.y == c.final_state.y);
    CHECK(a.final_state.fast == c.final_state.fast);
    opts.seed = 4;
    const DsaResult d = run_dsa(prob.family, q, o, kSlow, kFast, Vec::Constant(4, 0.25), opts);
    CHECK_FALSE(a.final_state.y == d.final_state.y);
  }
}

TEST_CASE("non-finite iterates abort with the iteration and node") {
  const SetFamily fam = box_and_ball();
  const GossipMatrix q = metropolis_weights(Graph::complete(3));
  SamplingOracle bad;
  bad.sample = [](int node, const Vec&, NodeRng&, Eigen::Ref<Vec> out) {
    out.setZero();
    if (node == 2) out[0] = std::numeric_limits<double>::infinity();
  };
  DsaOptions opts;
  opts.horizon = 50;
  opts.log_every = 1;
  try {
    run_dsa(fam, q, bad, kSlow, kFast, v2(0, 0), opts);
    FAIL("expected divergence");
  } catch (const RunDiverged& e) {
    CHECK(e.iteration() == 1);
    CHECK(e.node() == 2);
    CHECK(e.history().empty());
  }
}

TEST_CASE("stability monitor") {
  StabilityMonitor m;
  for (int k = 1; k <= 1000; ++k) m.observe(k, 1.0 + 1.0 / k);
  CHECK_FALSE(m.unstable());
  CHECK(m.running_max() == doctest::Approx(2.0));
  for (int k = 1001; k <= 2000; ++k) m.observe(k, 100.0);
  CHECK(m.unstable());
}

TEST_CASE("Gaussian noise has zero mean and the declared second moment") {
  const NoiseModel n = gaussian_noise(0.7, 3);
  NodeRng rng(1, 0);
  const int samples = 100000;
  for (const Vec& y : {Vec(Vec::Zero(3)), Vec(Vec::Constant(3, 5.0))}) {
    Vec mean = Vec::Zero(3);
    double second = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Vec m = n.sample(0, y, rng);
      mean += m;
      second += m.squaredNorm();
    }
    mean /= samples;
    second /= samples;
    CHECK(mean.norm() <= 5 * 0.7 * std::sqrt(3.0) / std::sqrt(double(samples)));
    // K is the exact second moment here, so allow five standard errors of the estimate
    CHECK(second <= n.variance_bound * (1 + y.squaredNorm()) * (1 + 5 * std::sqrt(2.0 / (3.0 * samples))));
  }
}

TEST_CASE("quadratic drift passes the Lipschitz spot-check") {
  const DriftField d = quadratic_drift({v2(1, 2), v2(0, 0)}, 2.5);
  CHECK(d.lipschitz == doctest::Approx(2.5));
  CHECK(lipschitz_estimate(d, 2, 2, 100, 1) <= d.lipschitz * (1 + 1e-9));
  CHECK((d.aggregate(v2(0, 0), 2) - v2(1.25, 2.5)).norm() <= 1e-15);
}

TEST_CASE("noise-free DSA-GD reaches an interior constrained minimiser") {
  const Vec lo = v2(0, 0), hi = v2(1, 1);
  const std::vector<Vec> centers{v2(0.2, 0.9), v2(0.5, 0.6), v2(0.5, 0.3)};
  SetFamily fam({ConvexSet::box(v2(0, -10), v2(1, 10)), ConvexSet::box(v2(-10, 0), v2(10, 1)),
                 ConvexSet::box(lo, hi)});
  const GossipMatrix q = metropolis_weights(Graph::complete(3));
  DsaOptions opts;
  opts.horizon = 20000;
  opts.log_every = 20000;
  const DsaResult r = run_dsa(fam, q, noise_free(quadratic_drift(centers, 1.0)), kSlow, kFast, v2(0, 0), opts);
  const Vec expect = oracle::pgd_box_quadratic(centers, 1.0, lo, hi);
  CHECK((r.final_state.y.average() - expect).norm() <= 1e-3);
}

TEST_CASE("DSA-BDH tracks the projection of the average on the utility problem") {
  const auto prob = build_instance(9, 42);
  const GossipMatrix q = metropolis_weights(prob.graph);
  DsaOptions opts;
  opts.mode = DsaMode::bdh;
  opts.horizon = 10000;
  opts.log_every = 10000;
  const DsaResult r = run_dsa(prob.family, q, utility_oracle(prob.instance), kSlow, kFast, Vec::Constant(9, 1.0 / 9), opts);
  CHECK(r.history.back().projection_tracking_error <= 1e-2);
  CHECK(r.max_x_average_norm <= 1e-9);
}
