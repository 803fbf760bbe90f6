#include <doctest.h>

#include <cmath>

#include "dsproj/error.hpp"
#include "dsproj/schedule.hpp"

using namespace dsproj;

TEST_CASE("power-law values") {
  const PowerLawSchedule b(1, 0, 0.7, StepRole::fast);
  const PowerLawSchedule a(1, 0, 0.95, StepRole::slow);
  CHECK(b.value(1) == 1.0);
  CHECK(a.value(1) == 1.0);
  // 1024^-0.7 = 2^-7 exactly
  const long double expect = std::pow(2.0L, -7.0L);
  CHECK(std::abs(b.value(1024) - static_cast<double>(expect)) <= 1e-17);
  CHECK(b.value(1024) == doctest::Approx(7.8125e-3));
  CHECK_THROWS_AS(b.value(0), InputError);
  const PowerLawSchedule shifted(2, 3, 0.6);
  CHECK(shifted.value(1) == doctest::Approx(2.0 / std::pow(4.0, 0.6)));
}

TEST_CASE("values are positive and nonincreasing") {
  const PowerLawSchedule s(0.5, 2, 0.8);
  double prev = s.value(1);
  for (std::int64_t k = 2; k < 100000; k += 17) {
    const double v = s.value(k);
    CHECK(v > 0.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("pair validation") {
  const PowerLawSchedule slow(1, 0, 0.95), fast(1, 0, 0.7, StepRole::fast);
  const PairCertificate cert = validate_pair(slow, fast);
  CHECK(cert.slow_exponent == 0.95);
  CHECK(cert.fast_exponent == 0.7);
  CHECK(cert.alpha == doctest::Approx(1 + 1e-6));
  CHECK(cert.fast_ratio_index >= 1);
  // beyond the recorded index the ratio condition holds
  for (std::int64_t k = cert.fast_ratio_index; k < cert.fast_ratio_index + 1000; ++k) {
    CHECK(cert.alpha * fast.value(k + 1) >= fast.value(k));
  }
  CHECK_THROWS_WITH_AS(validate_pair(PowerLawSchedule(1, 0, 0.7), PowerLawSchedule(1, 0, 0.95)),
                       doctest::Contains("a_k = o(b_k) violated"), ValidationError);
  CHECK_THROWS_WITH_AS(validate_pair(PowerLawSchedule(1, 0, 0.4), fast), doctest::Contains("square-summability violated"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(validate_pair(PowerLawSchedule(1, 0, 1.2), fast), doctest::Contains("divergent-sum violated"),
                       ValidationError);
  CHECK_THROWS_AS(validate_pair(slow, PowerLawSchedule(1, 0, 0.5)), ValidationError);
  CHECK_THROWS_AS(PowerLawSchedule(0, 0, 0.7), ValidationError);
  CHECK_THROWS_AS(PowerLawSchedule(1, -1, 0.7), ValidationError);
}

TEST_CASE("ratio a_k / b_k decreases for a valid pair") {
  const PowerLawSchedule a(1, 0, 0.95), b(1, 0, 0.7);
  const double first = a.value(1) / b.value(1);
  double prev = first;
  for (std::int64_t k = 10; k <= 1000000; k *= 10) {
    const double r = a.value(k) / b.value(k);
    CHECK(r < first);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("partial sums diverge while sums of squares converge") {
  for (double p : {0.55, 0.7, 0.95, 1.0}) {
    const PowerLawSchedule s(1, 0, p);
    // Sum over (K, K^2] exceeds a fixed amount for every checkpoint K, so the partial sums
    // at least double relative to a constant between K and K^2.
    double total = 0.0;
    std::int64_t k = 1;
    for (std::int64_t K : {10, 100, 10000}) {
      double block = 0.0;
      for (; k <= K; ++k) block += s.value(k);
      if (K > 10) CHECK(block >= 0.5 * std::log(10.0));
      total += block;
    }
    CHECK(total > 1.0);
    // Cauchy tail of the squares beyond the index where the integral bound drops below 1e-6.
    const double index = std::ceil(std::pow(1e-6 * (2 * p - 1), -1.0 / (2 * p - 1)));
    if (index < 1e8) {
      double tail = 0.0;
      const auto start = static_cast<std::int64_t>(index);
      for (std::int64_t j = start; j < start + 1000000; ++j) tail += s.value(j) * s.value(j);
      CHECK(tail < 1e-6);
    }
  }
}

TEST_CASE("ratio condition index") {
  const PowerLawSchedule s(1, 0, 0.7);
  const std::int64_t k0 = s.ratio_condition_index(1 + 1e-6);
  CHECK(k0 > 1);
  CHECK((1 + 1e-6) * s.value(k0 + 1) >= s.value(k0));
  CHECK((1 + 1e-6) * s.value(k0 - 2) < s.value(k0 - 3));
}
