#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sld/rng.hpp"
#include "sld/transport.hpp"

using namespace sld;
using namespace sld::transport;

namespace {

Cloud cloud1d(std::vector<double> v) {
  Cloud c;
  c.d = 1;
  c.pts = std::move(v);
  return c;
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("sorted pairing reproduces hand values") {
    const auto a = cloud1d({0.0, 1.0, 2.0});
    const auto b = cloud1d({3.0, 0.5, 1.0});
    // sorted matching: (0,0.5),(1,1),(2,3) -> W1 = (0.5+0+1)/3
    const auto w1 = wasserstein(a, b, 1.0);
    CHECK(w1.method == Method::Sorted1d);
    CHECK(w1.value == doctest::Approx(0.5));
    const auto w2 = wasserstein(a, b, 2.0);
    CHECK(w2.value == doctest::Approx(std::sqrt((0.25 + 0.0 + 1.0) / 3.0)));
    // translation invariance shift
    auto bs = b;
    for (auto& v : bs.pts) v += 5.0;
    const auto a0 = cloud1d({0.0, 0.0, 0.0});
    CHECK(wasserstein(a, a, 2.0).value == 0.0);
    CHECK(wasserstein(a0, cloud1d({5.0, 5.0, 5.0}), 1.0).value == doctest::Approx(5.0));
  }

  TEST_CASE("paper-half convention divides by sqrt(2), p = 2 only") {
    const auto a = cloud1d({0.0, 1.0});
    const auto b = cloud1d({2.0, 4.0});
    const auto std2 = wasserstein(a, b, 2.0);
    const auto half = wasserstein(a, b, 2.0, Convention::PaperHalf);
    CHECK(half.value == doctest::Approx(std2.value / std::sqrt(2.0)));
    CHECK_THROWS_AS(wasserstein(a, b, 1.0, Convention::PaperHalf), SldError);
  }

  TEST_CASE("assignment solver agrees with sorting in one dimension") {
    const int n = 64;
    Cloud a, b;
    a.d = b.d = 1;
    for (int i = 0; i < n; ++i) {
      a.pts.push_back(std::sin(0.7 * i) * 3.0);
      b.pts.push_back(std::cos(1.3 * i) * 2.0 + 0.5);
    }
    for (double p : {1.0, 2.0, 3.0}) {
      const auto ws = wasserstein(a, b, p);
      const auto wa = wasserstein_assignment(a, b, p);
      CHECK(wa.method == Method::Assignment);
      CHECK(wa.value == doctest::Approx(ws.value).epsilon(1e-10));
    }
  }

  TEST_CASE("assignment matches brute force in two dimensions") {
    // all permutations for n <= 7
    const int n = 6, d = 2;
    Cloud a, b;
    a.d = b.d = d;
    const uint64_t seed = 0xabc;
    for (int i = 0; i < n * d; ++i) {
      a.pts.push_back(rng::normal(seed, 0, i));
      b.pts.push_back(rng::normal(seed, 1, i) + 0.3);
    }
    const auto w = wasserstein(a, b, 2.0);
    CHECK(w.method == Method::Assignment);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    do {
      double tot = 0.0;
      for (int i = 0; i < n; ++i) {
        double c = 0.0;
        for (int k = 0; k < d; ++k) {
          const double diff = a.pts[i * d + k] - b.pts[perm[i] * d + k];
          c += diff * diff;
        }
        tot += c;
      }
      best = std::min(best, tot);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(w.value == doctest::Approx(std::sqrt(best / n)).epsilon(1e-12));
  }

  TEST_CASE("assignment total cost matches the frozen reference") {
    // 64 x 64 cost matrix with entries u01(0x5eed, i, j); reference total from
    // an independent exact solver.
    const int n = 64;
    std::vector<double> cost(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost[i * n + j] = rng::u01(0x5eed, i, j);
    std::vector<int> rowsol;
    const double total = solve_assignment(cost, n, &rowsol);
    CHECK(total == doctest::Approx(1.6391719953488317).epsilon(1e-12));
    // rowsol is a permutation and reproduces the total
    std::vector<bool> used(n, false);
    double recon = 0.0;
    for (int i = 0; i < n; ++i) {
      REQUIRE(rowsol[i] >= 0);
      REQUIRE(rowsol[i] < n);
      CHECK_FALSE(used[rowsol[i]]);
      used[rowsol[i]] = true;
      recon += cost[i * n + rowsol[i]];
    }
    CHECK(recon == doctest::Approx(total).epsilon(1e-14));
  }

  TEST_CASE("gaussian closed form matches the frozen reference") {
    Vec m1(2), m2(2);
    m1 << 0.0, 0.0;
    m2 << 1.0, -1.0;
    Mat c1(2, 2), c2(2, 2);
    c1 << 2.0, 0.5, 0.5, 1.0;
    c2 << 1.0, -0.3, -0.3, 0.5;
    CHECK(wasserstein_gaussian_oracle(m1, c1, m2, c2) ==
          doctest::Approx(1.597905320339897).epsilon(1e-10));
    // identical Gaussians and pure translation
    CHECK(wasserstein_gaussian_oracle(m1, c1, m1, c1) == doctest::Approx(0.0));
    CHECK(wasserstein_gaussian_oracle(m1, c1, m2, c1) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("empirical W2 converges to the gaussian value in distribution") {
    // two product gaussians in d = 2: W2^2 = |dm|^2 + sum (s1-s2)^2
    const int n = 2048, d = 2;
    Cloud a, b;
    a.d = b.d = d;
    const uint64_t seed = 0x77;
    for (int i = 0; i < n; ++i) {
      a.pts.push_back(rng::normal(seed, 0, 2 * i));
      a.pts.push_back(rng::normal(seed, 0, 2 * i + 1));
      b.pts.push_back(0.5 + 2.0 * rng::normal(seed, 1, 2 * i));
      b.pts.push_back(1.5 * rng::normal(seed, 1, 2 * i + 1));
    }
    const double exact = std::sqrt(0.25 + 1.0 + 0.25);
    const auto w = wasserstein(a, b, 2.0);
    CHECK(w.value == doctest::Approx(exact).epsilon(0.06));
  }

  TEST_CASE("interpolation inequality holds along sorted matchings") {
    const uint64_t seed = 0x1111;
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<double> A(256), B(256);
      for (int i = 0; i < 256; ++i) {
        A[i] = rng::normal(seed, 2 * trial, i);
        B[i] = 0.7 * rng::normal(seed, 2 * trial + 1, i) + 0.4;
      }
      for (double q : {1.5, 2.0, 4.0}) {
        const auto [lhs, rhs] = holder_interpolation(A, B, q);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
      }
    }
    // singleton clouds: equality (every W_p equals |a-b|)
    const auto [l1, r1] = holder_interpolation({1.25}, {-0.75}, 2.0);
    CHECK(l1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r1 == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("guards: size mismatch, dimension mismatch, budget") {
    CHECK_THROWS_AS(wasserstein(cloud1d({1.0}), cloud1d({1.0, 2.0}), 2.0), SldError);
    Cloud a2;
    a2.d = 2;
    a2.pts = {0.0, 0.0};
    CHECK_THROWS_AS(wasserstein(a2, cloud1d({0.0}), 2.0), SldError);
    Cloud big1, big2;
    big1.d = big2.d = 2;
    big1.pts.assign(2 * (kAssignmentBudget + 1), 0.0);
    big2.pts.assign(2 * (kAssignmentBudget + 1), 1.0);
    CHECK_THROWS_AS(wasserstein(big1, big2, 2.0), SldError);
    CHECK_THROWS_AS(wasserstein(cloud1d({}), cloud1d({}), 2.0), SldError);
  }
}
