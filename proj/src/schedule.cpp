#include "dsproj/schedule.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dsproj/error.hpp"

namespace dsproj {

PowerLawSchedule::PowerLawSchedule(double c, double k0, double p, StepRole role) : c_(c), k0_(k0), p_(p), role_(role) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("schedule.c", "scale must be positive and finite");
  if (!(k0 >= 0.0) || !std::isfinite(k0)) throw ValidationError("schedule.k0", "offset must be nonnegative");
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("schedule.p", "exponent must be positive");
}

double PowerLawSchedule::value(std::int64_t k) const {
  if (k < 1) throw InputError(fmt::format("step index must be >= 1 (got {})", k));
  return c_ / std::pow(static_cast<double>(k) + k0_, p_);
}

std::int64_t PowerLawSchedule::ratio_condition_index(double alpha) const {
  if (!(alpha > 1.0)) throw InputError("ratio condition needs alpha > 1");
  // alpha b_{k+1} >= b_k  <=>  p log(1 + 1/(k + k0)) <= log(alpha)
  //                     <=>  k + k0 >= 1 / (alpha^{1/p} - 1).
  const double threshold = 1.0 / std::expm1(std::log(alpha) / p_);
  const double k = std::ceil(threshold - k0_) + 1.0;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(k));
}

void validate_schedule(const PowerLawSchedule& s, const std::string& key) {
  if (s.exponent() <= 0.5) {
    throw ValidationError(key + ".p", fmt::format("square-summability violated: exponent {} must exceed 0.5", s.exponent()));
  }
  if (s.exponent() > 1.0) {
    throw ValidationError(key + ".p", fmt::format("divergent-sum violated: exponent {} must not exceed 1", s.exponent()));
  }
}

PairCertificate validate_pair(const PowerLawSchedule& slow, const PowerLawSchedule& fast) {
  validate_schedule(slow, "schedule.slow");
  validate_schedule(fast, "schedule.fast");
  if (!(slow.exponent() > fast.exponent())) {
    throw ValidationError("schedule.slow.p",
                          fmt::format("a_k = o(b_k) violated: slow exponent {} must exceed fast exponent {}",
                                      slow.exponent(), fast.exponent()));
  }
  constexpr double alpha = 1.0 + 1e-6;
  const std::int64_t start = fast.ratio_condition_index(alpha);
  const double log_alpha = std::log(alpha);
  for (std::int64_t k = start; k < start + 1'000'000; ++k) {
    const double lhs = fast.exponent() * std::log1p(1.0 / (static_cast<double>(k) + fast.offset()));
    if (lhs > log_alpha) {
      throw ValidationError("schedule.fast",
                            fmt::format("ratio condition alpha*b(k+1) >= b(k) fails at k = {} for alpha = {}", k, alpha));
    }
  }
  return PairCertificate{slow.exponent(), fast.exponent(), alpha, start};
}

}  // namespace dsproj
