#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "logshot/rng.hpp"

using Catch::Matchers::WithinAbs;
using namespace logshot;

TEST_CASE("SplitRng streams are deterministic and distinct", "[rng]") {
  SplitRng a(20240, 3), b(20240, 3), c(20240, 4), d(20241, 3);
  bool all_equal_c = true, all_equal_d = true;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t ref = a.next_u64();
    REQUIRE(ref == b.next_u64());
    all_equal_c = all_equal_c && (ref == c.next_u64());
    all_equal_d = all_equal_d && (ref == d.next_u64());
  }
  REQUIRE_FALSE(all_equal_c);
  REQUIRE_FALSE(all_equal_d);
}

TEST_CASE("uniform stays strictly inside (0,1)", "[rng]") {
  SplitRng rng(7, 0);
  double lo = 1.0, hi = 0.0, mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    mean += u;
  }
  mean /= n;
  // Mean of U(0,1): se = 1/sqrt(12 n); allow 5 sigma.
  REQUIRE_THAT(mean, WithinAbs(0.5, 5.0 / std::sqrt(12.0 * n)));
  REQUIRE(lo < 0.01);
  REQUIRE(hi > 0.99);
}

TEST_CASE("normal has the right first four moments", "[rng]") {
  SplitRng rng(11, 5);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    m1 += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  REQUIRE_THAT(m1, WithinAbs(0.0, 5.0 / std::sqrt(static_cast<double>(n))));
  // Var(x^2) = 2 for a standard normal, so se(m2) = sqrt(2/n).
  REQUIRE_THAT(m2, WithinAbs(1.0, 5.0 * std::sqrt(2.0 / n)));
  // E[x^4] = 3, Var(x^4) = 105 - 9 = 96.
  REQUIRE_THAT(m4, WithinAbs(3.0, 5.0 * std::sqrt(96.0 / n)));
}

TEST_CASE("exponential has the right mean and rejects bad rates", "[rng]") {
  SplitRng rng(13, 1);
  const int n = 200000;
  const double rate = 2.0;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.exponential(rate);
    REQUIRE(x > 0.0);
    mean += x;
  }
  mean /= n;
  // Exponential(rate) has mean and sd both 1/rate.
  REQUIRE_THAT(mean, WithinAbs(0.5, 5.0 * 0.5 / std::sqrt(static_cast<double>(n))));
  REQUIRE_THROWS_AS(rng.exponential(0.0), std::domain_error);
  REQUIRE_THROWS_AS(rng.exponential(-1.0), std::domain_error);
}

TEST_CASE("splitmix64 is a stable pure function", "[rng]") {
  // Same input, same output; distinct nearby inputs decorrelate.
  REQUIRE(splitmix64(42) == splitmix64(42));
  REQUIRE(splitmix64(42) != splitmix64(43));
  const std::uint64_t x = splitmix64(0);
  REQUIRE(x != 0);
}
