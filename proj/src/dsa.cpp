#include "dsproj/dsa.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dsproj {

void StabilityMonitor::observe(std::int64_t k, double norm) {
  const int decade = k < 1 ? 0 : static_cast<int>(std::floor(std::log10(static_cast<double>(k))));
  if (decade != decade_) {
    if (decade_ >= 0) previous_max_ = current_max_;
    decade_ = decade;
    current_max_ = 0.0;
  }
  current_max_ = std::max(current_max_, norm);
  running_max_ = std::max(running_max_, norm);
  if (previous_max_ > 0.0 && current_max_ > 10.0 * previous_max_) unstable_ = true;
}

Stacked DsaState::z() const {
  if (mode == DsaMode::gd) return fast;
  Stacked out = fast;
  out.flat() -= y.flat();
  return out;
}

Vec DriftField::aggregate(const Vec& y, int nodes) const {
  Vec acc = Vec::Zero(y.size());
  for (int i = 0; i < nodes; ++i) acc += h(i, y);
  return acc / static_cast<double>(nodes);
}

DriftField zero_drift() {
  return DriftField{[](int, const Vec& y) -> Vec { return Vec::Zero(y.size()); }, 0.0, true};
}

DriftField quadratic_drift(std::vector<Vec> centers, double curvature) {
  if (!(curvature > 0.0)) throw ValidationError("problem.curvature", "curvature must be positive");
  if (centers.empty()) throw ValidationError("problem.centers", "at least one center is required");
  return DriftField{[centers = std::move(centers), curvature](int node, const Vec& y) -> Vec {
                      const std::size_t i = centers.size() == 1 ? 0 : static_cast<std::size_t>(node);
                      return -curvature * (y - centers.at(i));
                    },
                    curvature, true};
}

NoiseModel no_noise() {
  return NoiseModel{[](int, const Vec& y, NodeRng&) -> Vec { return Vec::Zero(y.size()); }, 0.0};
}

NoiseModel gaussian_noise(double sigma, int dim) {
  if (!(sigma >= 0.0)) throw ValidationError("problem.sigma", "noise level must be nonnegative");
  return NoiseModel{[sigma](int, const Vec& y, NodeRng& rng) -> Vec {
                      Vec m(y.size());
                      for (Eigen::Index c = 0; c < m.size(); ++c) m[c] = sigma * rng.gaussian();
                      return m;
                    },
                    sigma * sigma * dim};
}

SamplingOracle additive_oracle(DriftField drift, NoiseModel noise) {
  return SamplingOracle{[drift = std::move(drift), noise = std::move(noise)](int node, const Vec& y, NodeRng& rng,
                                                                            Eigen::Ref<Vec> out) {
    out = drift.h(node, y) + noise.sample(node, y, rng);
  }};
}

double lipschitz_estimate(const DriftField& drift, int nodes, int dim, int pairs, std::uint64_t seed, double scale) {
  NodeRng rng(seed, kProbeStream);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    Vec a(dim), b(dim);
    for (int c = 0; c < dim; ++c) {
      a[c] = scale * rng.gaussian();
      b[c] = scale * rng.gaussian();
    }
    const double d = (a - b).norm();
    if (d == 0.0) continue;
    for (int i = 0; i < nodes; ++i) worst = std::max(worst, (drift.h(i, a) - drift.h(i, b)).norm() / d);
  }
  return worst;
}

DsaState start_dsa(DsaMode mode, const Stacked& y0, std::uint64_t seed) {
  DsaState s;
  s.mode = mode;
  s.y = y0;
  s.fast = mode == DsaMode::gd ? Stacked(y0.nodes(), y0.dim()) : y0;  // z_0 = 0
  s.x = Stacked(y0.nodes(), y0.dim());
  s.last_samples = Stacked(y0.nodes(), y0.dim());
  s.rngs.reserve(static_cast<std::size_t>(y0.nodes()));
  for (int i = 0; i < y0.nodes(); ++i) s.rngs.emplace_back(seed, static_cast<std::uint64_t>(i));
  return s;
}

DsaState start_dsa(DsaMode mode, int nodes, const Vec& y0, std::uint64_t seed) {
  return start_dsa(mode, Stacked::replicate(nodes, y0), seed);
}

namespace {

void check_inputs(const DsaState& s, const SetFamily& family, const GossipMatrix& q) {
  if (s.nodes() != q.nodes() || s.nodes() != family.size()) {
    throw InputError(fmt::format("state has {} nodes, network {}, family {}", s.nodes(), q.nodes(), family.size()));
  }
  if (s.dim() != family.dim()) throw InputError("state dimension does not match the family");
}

void draw_samples(DsaState& s, const SamplingOracle& oracle, Exec exec) {
  const int nodes = s.nodes();
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < nodes; ++i) {
    const Vec yi = s.y.block(i);
    oracle.sample(i, yi, s.rngs[static_cast<std::size_t>(i)], s.last_samples.block(i));
  }
}

void check_finite(const Stacked& v, std::int64_t k, const char* what) {
  if (v.flat().allFinite()) return;
  for (int i = 0; i < v.nodes(); ++i) {
    if (!v.block(i).allFinite()) {
      throw DivergenceError(fmt::format("non-finite {} at iteration {} on node {}", what, k, i), k, i);
    }
  }
}

// |<y_next> - [(1 - a)<y> + a<pull> + a<samples>]|
double average_identity(const Stacked& y_next, const Stacked& y, const Stacked& pull, const Stacked& samples, double a) {
  const Vec predicted = (1.0 - a) * y.average() + a * pull.average() + a * samples.average();
  return (y_next.average() - predicted).norm();
}

}  // namespace

void dsa_gd_step(DsaState& s, const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle, double a,
                 double b, Exec exec) {
  check_inputs(s, family, q);
  if (s.mode != DsaMode::gd) throw InputError("dsa_gd_step called on a DSA-BDH state");
  kernels::gd_fast_update(family, q, s.fast, s.y, b, s.next_fast, exec);
  draw_samples(s, oracle, exec);
  kernels::slow_update(q, s.y, s.fast, s.last_samples, a, s.next_y, exec);

  const std::int64_t k = s.k + 1;
  check_finite(s.next_fast, k, "z");
  check_finite(s.next_y, k, "y");
  s.average_identity_residual = average_identity(s.next_y, s.y, s.fast, s.last_samples, a);
  s.last_a = a;
  std::swap(s.y, s.next_y);
  std::swap(s.fast, s.next_fast);
  s.k = k;
  s.stability.observe(k, s.y.norm());
}

void dsa_bdh_step(DsaState& s, const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle, double a,
                  double b, Exec exec) {
  check_inputs(s, family, q);
  if (s.mode != DsaMode::bdh) throw InputError("dsa_bdh_step called on a DSA-GD state");
  kernels::bdh_fast_update(family, q, s.fast, s.x, s.next_x, s.proj, s.sum, exec);
  draw_samples(s, oracle, exec);
  kernels::slow_update(q, s.y, s.proj, s.last_samples, a, s.next_y, exec);

  if (!s.next_fast.same_shape(s.fast)) s.next_fast = Stacked(s.fast.nodes(), s.fast.dim());
  const Vec& r = s.fast.flat();
  const Vec& x = s.next_x.flat();
  const Vec& y = s.y.flat();
  const Vec& y_next = s.next_y.flat();
  Vec& r_next = s.next_fast.flat();
  for (Eigen::Index c = 0; c < r.size(); ++c) {
    r_next[c] = r[c];
    r_next[c] += b * x[c];
    r_next[c] += y_next[c] - y[c];
  }

  const std::int64_t k = s.k + 1;
  check_finite(s.next_x, k, "x");
  check_finite(s.next_fast, k, "z");
  check_finite(s.next_y, k, "y");
  s.average_identity_residual = average_identity(s.next_y, s.y, s.proj, s.last_samples, a);
  s.x_average_norm = s.next_x.average().norm();
  s.last_a = a;
  std::swap(s.y, s.next_y);
  std::swap(s.fast, s.next_fast);
  std::swap(s.x, s.next_x);
  s.k = k;
  s.stability.observe(k, s.y.norm());
}

DsaResult run_dsa(const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle,
                  const PowerLawSchedule& slow, const PowerLawSchedule& fast, const Vec& y0, const DsaOptions& opts) {
  if (opts.horizon < 0 || opts.log_every < 1) throw InputError("horizon must be >= 0 and log_every >= 1");
  if (y0.size() != family.dim()) throw InputError("initial point dimension does not match the family");
  DsaResult result;
  result.certificate = validate_pair(slow, fast);
  DsaState state = start_dsa(opts.mode, q.nodes(), y0, opts.seed);
  try {
    for (std::int64_t k = 1; k <= opts.horizon; ++k) {
      const double a = opts.freeze_slow ? 0.0 : slow.value(k);
      const double b = fast.value(k);
      if (opts.mode == DsaMode::gd) {
        dsa_gd_step(state, family, q, oracle, a, b, opts.exec);
      } else {
        dsa_bdh_step(state, family, q, oracle, a, b, opts.exec);
      }
      result.max_average_identity_residual =
          std::max(result.max_average_identity_residual, state.average_identity_residual);
      result.max_x_average_norm = std::max(result.max_x_average_norm, state.x_average_norm);
      if (k == 1 || k % opts.log_every == 0 || k == opts.horizon) {
        result.history.push_back(measure(state, family, opts.reference));
      }
    }
  } catch (const DivergenceError& e) {
    throw RunDiverged(e, std::move(result.history));
  }
  result.final_state = std::move(state);
  return result;
}

ReferenceSolution reference_solution(const SetFamily& family, const GossipMatrix& q, const SamplingOracle& oracle,
                                     const PowerLawSchedule& slow, const PowerLawSchedule& fast, const Vec& y0,
                                     DsaMode mode, std::uint64_t seed, std::int64_t min_horizon,
                                     std::int64_t max_horizon, double threshold, Exec exec) {
  if (min_horizon < 1 || max_horizon < min_horizon) throw InputError("reference horizons must satisfy 1 <= min <= max");
  validate_pair(slow, fast);
  DsaState state = start_dsa(mode, q.nodes(), y0, seed);
  ReferenceSolution ref;
  for (std::int64_t k = 1; k <= max_horizon; ++k) {
    const Vec before = state.y.block(0);
    const double norm = state.y.norm();
    if (mode == DsaMode::gd) {
      dsa_gd_step(state, family, q, oracle, slow.value(k), fast.value(k), exec);
    } else {
      dsa_bdh_step(state, family, q, oracle, slow.value(k), fast.value(k), exec);
    }
    ref.iterations = k;
    const double rel = (state.y.block(0) - before).norm() / std::max(norm, 1e-300);
    if (k >= min_horizon && rel < threshold) {
      ref.threshold_met = true;
      break;
    }
  }
  ref.y1 = state.y.block(0);
  return ref;
}

}  // namespace dsproj
