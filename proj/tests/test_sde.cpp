#include <doctest.h>

#include <cmath>
#include <vector>

#include "sld/constants.hpp"
#include "sld/model.hpp"
#include "sld/rng.hpp"
#include "sld/sde.hpp"
#include "sld/stats.hpp"

using namespace sld;
using namespace sld::sde;

namespace {

IntegratorConfig make_cfg(double h, double T, uint64_t seed, size_t n, int workers = 1) {
  IntegratorConfig c;
  c.h = h;
  c.T = T;
  c.seed = seed;
  c.n_paths = n;
  c.workers = workers;
  return c;
}

}  // namespace

TEST_SUITE("sde") {
  TEST_CASE("config defaults and validation") {
    IntegratorConfig c = make_cfg(0.01, 1.0, 0, 1);
    CHECK(c.effective_merge_threshold() == doctest::Approx(0.1));
    c.merge_threshold = 0.05;
    CHECK(c.effective_merge_threshold() == 0.05);
    CHECK(c.n_steps() == 100);
    CHECK_NOTHROW(c.validate());
    c.h = 0.0;
    CHECK_THROWS_AS(c.validate(), SldError);
    c = make_cfg(0.1, 0.05, 0, 1);
    CHECK_THROWS_AS(c.validate(), SldError);
  }

  TEST_CASE("observation times snap to the grid and record it") {
    const auto g = snap_times({0.0, 0.02, 0.0105}, 0.01, 100);
    CHECK(g.steps == std::vector<long>{0, 2, 1});
    CHECK(g.snapped[2] == doctest::Approx(0.01));
    CHECK(g.any_snapped);
    const auto exact = snap_times({0.0, 0.5, 1.0}, 0.01, 100);
    CHECK_FALSE(exact.any_snapped);
    CHECK_THROWS_AS(snap_times({2.0}, 0.01, 100), SldError);
  }

  TEST_CASE("simulation is bitwise independent of the worker count") {
    const auto spec = model::langevin(model::quadratic(2, 1.0));
    const auto init = gaussian_init({0.5, -0.5}, 1.0);
    const std::vector<double> obs{0.1, 0.2};
    const auto one = simulate(spec, init, make_cfg(1e-3, 0.2, 42, 33, 1), obs);
    const auto four = simulate(spec, init, make_cfg(1e-3, 0.2, 42, 33, 4), obs);
    const auto seven = simulate(spec, init, make_cfg(1e-3, 0.2, 42, 33, 7), obs);
    REQUIRE(one.data.size() == 2);
    CHECK(one.data == four.data);
    CHECK(one.data == seven.data);
    CHECK(one.blown == four.blown);
    // and a different seed actually changes the draw
    const auto other = simulate(spec, init, make_cfg(1e-3, 0.2, 43, 33, 1), obs);
    CHECK(one.data != other.data);
  }

  TEST_CASE("synchronous coupling contracts the linear drift exactly") {
    // b = -lambda x: the difference shrinks by (1 - lambda h) per step with no
    // noise contribution at all.
    const double lam = 1.0, h = 1e-3;
    const auto spec = model::langevin(model::quadratic(1, lam));
    const auto cb = couple_synchronous(spec, {2.0}, {-1.0}, make_cfg(h, 0.5, 7, 64), {0.25, 0.5});
    REQUIRE(cb.X.size() == 2);
    for (size_t k = 0; k < 2; ++k) {
      const long steps = cb.grid.steps[k];
      const double expect = 3.0 * std::pow(1.0 - lam * h, static_cast<double>(steps));
      for (size_t i = 0; i < cb.n_pairs(); ++i) {
        const double dist = std::abs(cb.X[k][i] - cb.Y[k][i]);
        CHECK(dist == doctest::Approx(expect).epsilon(1e-12));
      }
    }
    CHECK(cb.scheme == CouplingScheme::Synchronous);
  }

  TEST_CASE("time-T marginal matches the exact linear-drift law") {
    // dX = -X dt + dW from x0 = 1: X_T ~ N(e^{-T}, (1-e^{-2T})/2).
    const double T = 1.0;
    const size_t n = 4000;
    const auto spec = model::langevin(model::quadratic(1, 1.0));
    const auto batch = simulate(spec, dirac({1.0}), make_cfg(1e-3, T, 11, n), {T});
    const double mu = std::exp(-T);
    const double sd = std::sqrt(0.5 * (1.0 - std::exp(-2.0 * T)));
    std::vector<double> ref(n);
    for (size_t i = 0; i < n; ++i) ref[i] = mu + sd * rng::normal(0xFEED, 9, i);
    const double ks = stats::ks_statistic(batch.data[0], ref);
    CHECK(ks < stats::ks_critical(0.01, n, n));
  }

  TEST_CASE("reflection coupling preserves the second marginal law") {
    const auto spec = model::langevin(model::quadratic(1, 1.0));
    const std::vector<double> x0{1.5}, y0{-1.5};
    const auto cfg = make_cfg(1e-3, 1.0, 5, 4000);
    const auto refl = couple_reflection(spec, x0, y0, cfg, {1.0});
    const auto sync = couple_synchronous(spec, x0, y0, cfg, {1.0});
    const double ks = stats::ks_statistic(refl.Y[0], sync.Y[0]);
    CHECK(ks < stats::ks_critical(0.01, 4000, 4000));
    CHECK(refl.scheme == CouplingScheme::Reflection);
  }

  TEST_CASE("coupled pairs are glued bitwise once merged") {
    const auto spec = model::langevin(model::quadratic(1, 1.0));
    const auto cfg = make_cfg(1e-3, 3.0, 21, 256);
    const auto cb = couple_reflection(spec, {0.4}, {-0.4}, cfg, {1.5, 3.0});
    size_t coupled = 0;
    for (size_t i = 0; i < cb.n_pairs(); ++i) {
      if (cb.coupling_time[i] == kNotCoupled) continue;
      ++coupled;
      for (size_t k = 0; k < cb.grid.steps.size(); ++k) {
        if (cb.grid.snapped[k] >= cb.coupling_time[i]) {
          CHECK(cb.X[k][i] == cb.Y[k][i]);  // bitwise
        }
      }
    }
    CHECK(coupled > cb.n_pairs() / 2);
    CHECK(cb.merge_threshold == doctest::Approx(std::sqrt(1e-3)));
  }

  TEST_CASE("general-sigma reflection agrees with the identity scheme on sigma = Id") {
    const auto spec = model::langevin(model::quadratic(1, 1.0));
    const auto cfg = make_cfg(1e-3, 1.0, 3, 512);
    const auto a = couple_reflection(spec, {1.0}, {-1.0}, cfg, {1.0});
    auto spec_g = spec;
    spec_g.sigma_kind = SigmaKind::Constant;
    spec_g.sigma_const = {1.0};
    const auto b = couple_reflection_general(spec_g, {1.0}, {-1.0}, cfg, {1.0});
    CHECK(b.scheme == CouplingScheme::ReflectionGeneral);
    CHECK(b.positivity_ok);
    // same coupling mechanism, so the coupled fraction should be comparable
    size_t ca = 0, cgn = 0;
    for (double t : a.coupling_time) ca += (t != kNotCoupled);
    for (double t : b.coupling_time) cgn += (t != kNotCoupled);
    CHECK(std::abs(static_cast<double>(ca) - static_cast<double>(cgn)) <
          0.15 * static_cast<double>(a.n_pairs()));
  }

  TEST_CASE("independent coupling never merges") {
    const auto spec = model::langevin(model::quadratic(1, 1.0));
    const auto cb = couple_independent(spec, {0.1}, {-0.1}, make_cfg(1e-2, 1.0, 13, 64), {1.0});
    for (double t : cb.coupling_time) CHECK(t == kNotCoupled);
    CHECK(cb.scheme == CouplingScheme::Independent);
  }

  TEST_CASE("divergent drift freezes and flags the path") {
    // U = -x^4 gives drift +2x^3: explosion in finite time from x0 = 2.
    const auto spec = model::langevin(model::custom_poly(1, {{{4}, -1.0}}));
    const auto batch = simulate(spec, dirac({2.0}), make_cfg(1e-3, 0.5, 1, 16), {0.25, 0.5});
    CHECK(batch.blown_count() == 16);
    for (size_t i = 0; i < 16; ++i) {
      CHECK(std::isfinite(batch.data[0][i]));
      CHECK(batch.data[0][i] == batch.data[1][i]);  // frozen after the flag
    }
  }

  TEST_CASE("nonhomogeneous entry point reproduces the autonomous one bitwise") {
    const auto spec = model::langevin(model::quadratic(2, 0.7));
    const auto init = gaussian_init({0.0, 0.0}, 1.0);
    const auto cfg = make_cfg(1e-3, 0.3, 17, 24);
    const std::vector<double> obs{0.1, 0.3};
    const auto a = simulate(spec, init, cfg, obs);
    const auto b = simulate_nonhomogeneous(spec, init, cfg, obs);
    CHECK(a.data == b.data);
    CHECK(a.blown == b.blown);

    // a genuinely time-dependent drift must differ from its t = 0 freeze
    auto td = spec;
    td.time_dependent = true;
    td.b = [](double t, std::span<const double> x, std::span<double> out) {
      for (size_t i = 0; i < x.size(); ++i) out[i] = -(0.7 + t) * x[i];
    };
    const auto c = simulate_nonhomogeneous(td, init, cfg, obs);
    CHECK(c.data != a.data);
  }

  TEST_CASE("interacting particles: determinism and paired synchrony") {
    const auto mk = model::builtin_mckean(model::quadratic(1, 1.0), model::quadratic(1, 0.25));
    const auto cfg = make_cfg(1e-3, 0.5, 9, 128);
    const std::vector<double> obs{0.25, 0.5};
    const auto a = simulate_mckean(mk, gaussian_init({1.0}, 0.5), cfg, obs);
    const auto b = simulate_mckean(mk, gaussian_init({1.0}, 0.5), cfg, obs);
    REQUIRE(a.size() == 2);
    CHECK(a[0].pts == b[0].pts);
    CHECK(a[1].pts == b[1].pts);
    CHECK(a[0].t == doctest::Approx(0.25));

    // identical dirac starts and shared drivers keep the two clouds identical
    const auto pc = simulate_mckean_paired(mk, dirac({0.3}), dirac({0.3}), cfg, obs);
    REQUIRE(pc.first.size() == 2);
    CHECK(pc.first[0].pts == pc.second[0].pts);
    CHECK(pc.first[1].pts == pc.second[1].pts);
    // distinct starts contract under the convex pair
    const auto pd = simulate_mckean_paired(mk, dirac({2.0}), dirac({-2.0}), cfg, obs);
    double d0 = 0.0, d1 = 0.0;
    for (size_t i = 0; i < pd.first[0].size(); ++i) {
      d0 += std::abs(pd.first[0].pts[i] - pd.second[0].pts[i]);
      d1 += std::abs(pd.first[1].pts[i] - pd.second[1].pts[i]);
    }
    CHECK(d1 < d0);
  }

  TEST_CASE("kinetic pair distance decays at close to the certified rate") {
    const auto kc = constants::kinetic_contraction_search(0.0);
    REQUIRE(kc.found);
    const auto spec = model::builtin_kinetic(model::quadratic(1, 1.0));
    // The difference dynamics are deterministic and linear, so one pair with
    // synchronous noise tracks the ODE exactly up to O(h).
    const auto cb = couple_synchronous(spec, {1.0, 0.0}, {-1.0, 0.5}, make_cfg(1e-4, 2.0, 1, 1),
                                       {0.0, 2.0});
    auto Nval = [&](size_t k) {
      const double dx = cb.X[k][0] - cb.Y[k][0];
      const double dv = cb.X[k][1] - cb.Y[k][1];
      return kc.a * dx * dx + kc.b * dx * dv + dv * dv;
    };
    const double rate = -std::log(Nval(1) / Nval(0)) / 2.0;
    CHECK(rate >= 0.9 * kc.K);
  }

  TEST_CASE("sigma bound probing matches declared structure") {
    auto spec = model::langevin(model::quadratic(2, 1.0));
    spec.sigma_kind = SigmaKind::Constant;
    spec.sigma_const = {1.0, 0.5, 0.0, 2.0};
    const auto gb = probe_sigma_bounds(spec, 64, 2.0, 99);
    // singular values of [[1, .5], [0, 2]]: s^2 solve s^4 - 5.25 s^2 + 4 = 0
    const double disc = std::sqrt(5.25 * 5.25 - 16.0);
    CHECK(gb.M == doctest::Approx(0.5 * (5.25 + disc)).epsilon(1e-9));
    CHECK(gb.N_inv == doctest::Approx(1.0 / (0.5 * (5.25 - disc))).epsilon(1e-9));
    CHECK(gb.Lambda == doctest::Approx(0.0).epsilon(1e-12));

    // a genuinely singular diffusion is refused
    const auto kin = model::builtin_kinetic(model::quadratic(1, 1.0));
    CHECK_THROWS_AS(probe_sigma_bounds(kin, 8, 2.0, 99), SldError);
  }
}
