#include <doctest.h>

#include <cmath>

#include "sld/common.hpp"
#include "sld/numerics.hpp"

using namespace sld;

TEST_SUITE("numerics") {
  TEST_CASE("integrate handles polynomials, oscillation, and exponentials") {
    CHECK(num::integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(num::integrate([](double x) { return std::sin(x); }, 0.0, kPi) ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(num::integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(num::integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
  }

  TEST_CASE("integrate respects orientation") {
    CHECK(num::integrate([](double x) { return x; }, 1.0, 0.0) ==
          doctest::Approx(-0.5).epsilon(1e-12));
  }

  TEST_CASE("bisect finds the root to tolerance") {
    const double r = num::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("golden_min locates a quadratic minimum") {
    const double x = num::golden_min([](double t) { return (t - 1.234) * (t - 1.234); },
                                     0.0, 3.0);
    CHECK(x == doctest::Approx(1.234).epsilon(1e-8));
  }

  TEST_CASE("expm1_ratio agrees with the direct formula and its limit") {
    CHECK(num::expm1_ratio(0.0) == 1.0);
    CHECK(num::expm1_ratio(2.0) ==
          doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-15));
    CHECK(num::expm1_ratio(-1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    // series branch: (1 - e^{-x})/x = 1 - x/2 + x^2/6 - ...
    const double x = 1e-10;
    CHECK(num::expm1_ratio(x) == doctest::Approx(1.0 - x / 2.0).epsilon(1e-14));
    // continuity across the branch switch
    CHECK(std::abs(num::expm1_ratio(1e-8) - num::expm1_ratio(1.0000001e-8)) < 1e-13);
  }
}
