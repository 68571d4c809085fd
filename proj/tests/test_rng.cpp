#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "sld/rng.hpp"

using namespace sld;

TEST_SUITE("rng") {
  TEST_CASE("word is a pure function of (seed, stream, counter)") {
    CHECK(rng::word(1, 2, 3) == rng::word(1, 2, 3));
    CHECK(rng::word(1, 2, 3) != rng::word(1, 2, 4));
    CHECK(rng::word(1, 2, 3) != rng::word(1, 3, 3));
    CHECK(rng::word(1, 2, 3) != rng::word(2, 2, 3));
  }

  TEST_CASE("u01 lies in the open unit interval with uniform moments") {
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = rng::u01(42, 0, i);
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
      s += u;
      s2 += u * u;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 5e-3);
    CHECK(std::abs(var - 1.0 / 12.0) < 5e-3);
  }

  TEST_CASE("normal moments match the standard Gaussian") {
    const int n = 100000;
    double s = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rng::normal(7, 1, i);
      s += z;
      s2 += z * z;
      s3 += z * z * z;
      s4 += z * z * z * z;
    }
    CHECK(std::abs(s / n) < 0.02);
    CHECK(std::abs(s2 / n - 1.0) < 0.03);
    CHECK(std::abs(s3 / n) < 0.06);
    CHECK(std::abs(s4 / n - 3.0) < 0.15);
  }

  TEST_CASE("streams decorrelate") {
    const int n = 20000;
    double sxy = 0.0, sx = 0.0, sy = 0.0, sx2 = 0.0, sy2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng::u01(9, 0, i), y = rng::u01(9, 1, i);
      sxy += x * y;
      sx += x;
      sy += y;
      sx2 += x * x;
      sy2 += y * y;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double vx = sx2 / n - (sx / n) * (sx / n);
    const double vy = sy2 / n - (sy / n) * (sy / n);
    CHECK(std::abs(cov / std::sqrt(vx * vy)) < 0.02);
  }

  TEST_CASE("index stays in range and is close to uniform") {
    const uint64_t m = 10;
    std::vector<int> counts(m, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const uint64_t k = rng::index(3, 0, i, m);
      REQUIRE(k < m);
      ++counts[k];
    }
    for (uint64_t k = 0; k < m; ++k)
      CHECK(std::abs(counts[k] - n / static_cast<double>(m)) < 0.05 * n / m);
  }

  TEST_CASE("domain salts are pairwise distinct") {
    const uint64_t salts[] = {rng::kSaltIntegrator, rng::kSaltInit, rng::kSaltInit2,
                              rng::kSaltProbe, rng::kSaltBootstrap};
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) CHECK(salts[i] != salts[j]);
    CHECK(rng::salted(5, rng::kSaltInit) != rng::salted(5, rng::kSaltInit2));
  }
}
