#pragma once

#include <cstdint>
#include <string>

namespace dsproj {

enum class StepRole { slow, fast };

/// Power-law step sequence c / (k + k0)^p for k >= 1, with c > 0, k0 >= 0 and
/// p in (0.5, 1] so that the steps are not summable but square-summable.
class PowerLawSchedule {
 public:
  PowerLawSchedule(double c, double k0, double p, StepRole role = StepRole::slow);

  double value(std::int64_t k) const;
  double operator()(std::int64_t k) const { return value(k); }

  double scale() const { return c_; }
  double offset() const { return k0_; }
  double exponent() const { return p_; }
  StepRole role() const { return role_; }

  /// First index K such that alpha * value(k+1) >= value(k) for all k >= K.
  /// For a power law this holds for every alpha > 1 from some point on.
  std::int64_t ratio_condition_index(double alpha) const;

 private:
  double c_;
  double k0_;
  double p_;
  StepRole role_;
};

/// Record of a validated (slow, fast) pair: slow steps vanish relative to the
/// fast ones, both are valid power laws, and the fast schedule satisfies the
/// ratio condition alpha b_{k+1} >= b_k for alpha = 1 + 1e-6 from `fast_ratio_index` on
/// (checked numerically over the following 10^6 indices).
struct PairCertificate {
  double slow_exponent;
  double fast_exponent;
  double alpha;
  std::int64_t fast_ratio_index;
};

/// Throws ValidationError naming the failed inequality:
/// "square-summability violated", "divergent-sum violated", "a_k = o(b_k) violated".
PairCertificate validate_pair(const PowerLawSchedule& slow, const PowerLawSchedule& fast);

/// Throws ValidationError if the schedule alone is not a valid step sequence.
void validate_schedule(const PowerLawSchedule& s, const std::string& key = "schedule");

}  // namespace dsproj
