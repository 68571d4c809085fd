#include <doctest.h>

#include <cmath>
#include <vector>

#include "sld/constants.hpp"
#include "sld/model.hpp"

using namespace sld;
using namespace sld::model;

namespace {

double U_at(const PotentialSpec& p, std::vector<double> x) { return p.U(x); }

std::vector<double> grad_at(const PotentialSpec& p, std::vector<double> x) {
  std::vector<double> g(x.size());
  p.grad(x, g);
  return g;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("builtin potential values and gradients") {
    const auto q = quadratic(2, 1.5);
    CHECK(U_at(q, {1.0, 2.0}) == doctest::Approx(7.5));
    CHECK(grad_at(q, {1.0, 2.0})[0] == doctest::Approx(3.0));
    CHECK(grad_at(q, {1.0, 2.0})[1] == doctest::Approx(6.0));

    const auto p = power(2, 1.5);  // |x|^3
    CHECK(U_at(p, {3.0, 4.0}) == doctest::Approx(125.0));
    CHECK(grad_at(p, {3.0, 4.0})[0] == doctest::Approx(45.0));
    CHECK(grad_at(p, {3.0, 4.0})[1] == doctest::Approx(60.0));
    CHECK(grad_at(p, {0.0, 0.0})[0] == 0.0);

    const auto pc = perturbed_convex(1, 1.0, 1.0);
    CHECK(U_at(pc, {0.7}) ==
          doctest::Approx(0.5 * 0.49 + 0.5 * (0.7 - std::cos(0.7))));
    CHECK(grad_at(pc, {0.7})[0] ==
          doctest::Approx(0.7 + 0.5 * (1.0 + std::sin(0.7))));

    const auto dw = double_well();
    CHECK(dw.d == 1);
    CHECK(U_at(dw, {2.0}) == doctest::Approx(2.0));
    CHECK(grad_at(dw, {2.0})[0] == doctest::Approx(6.0));

    const auto cp = custom_poly(2, {{{2, 0}, 1.0}, {{0, 2}, 0.5}, {{1, 1}, 0.25}});
    CHECK(U_at(cp, {1.0, 2.0}) == doctest::Approx(3.5));
    CHECK(grad_at(cp, {1.0, 2.0})[0] == doctest::Approx(2.5));
    CHECK(grad_at(cp, {1.0, 2.0})[1] == doctest::Approx(2.25));

    CHECK(U_at(zero_potential(3), {1.0, 2.0, 3.0}) == 0.0);
  }

  TEST_CASE("gradients agree with central differences") {
    const PotentialSpec pots[] = {
        quadratic(3, 0.8), power(2, 1.5), power(1, 2.0), perturbed_convex(2, 1.0, 0.5),
        double_well(), custom_poly(2, {{{2, 1}, 0.3}, {{0, 4}, 0.1}, {{1, 0}, -0.7}})};
    for (const auto& p : pots) {
      CHECK(gradient_consistency(p, 40, 0x5eed) < 1e-5);
    }
  }

  TEST_CASE("analytic semiconvexity constants") {
    CHECK(*quadratic(2, 1.5).analytic_semiconvexity() == doctest::Approx(3.0));
    CHECK(*power(2, 2.0).analytic_semiconvexity() == doctest::Approx(0.0));
    CHECK(*power(2, 1.0).analytic_semiconvexity() == doctest::Approx(2.0));
    CHECK(*zero_potential(1).analytic_semiconvexity() == doctest::Approx(0.0));
    CHECK_FALSE(double_well().analytic_semiconvexity().has_value());

    SamplingPlan plan;
    const auto res = semiconvexity_K(langevin(quadratic(2, 1.5)), plan);
    CHECK(res.mode == CertificationMode::Analytic);
    CHECK(res.K == doctest::Approx(3.0));
  }

  TEST_CASE("sampled semiconvexity recovers a constant-curvature polynomial") {
    // U = x^2 written as a custom polynomial: the pair ratio is identically 2,
    // so the sampled route has nothing to hide.
    SamplingPlan plan;
    plan.pairs = 20000;
    plan.seed = 3;
    const auto res = semiconvexity_K(langevin(custom_poly(1, {{{2}, 1.0}})), plan);
    CHECK(res.mode == CertificationMode::Sampled);
    CHECK_FALSE(res.diverged);
    CHECK(res.K == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("sampled semiconvexity approaches the sine-perturbation infimum") {
    // U'' = K + (M/2) cos x has infimum K - M/2; the probed value can only sit
    // above it.
    SamplingPlan plan;
    plan.seed = 11;
    const auto res = semiconvexity_K(langevin(perturbed_convex(1, 2.0, 1.0)), plan);
    CHECK(res.mode == CertificationMode::Sampled);
    CHECK(res.K >= 1.5 - 1e-9);
    CHECK(res.K <= 1.5 + 0.05);

    const auto dwr = semiconvexity_K(langevin(double_well()), plan);
    CHECK(dwr.K >= -1.0 - 1e-9);
    CHECK(dwr.K <= -1.0 + 0.05);
  }

  TEST_CASE("sampled semiconvexity flags downward divergence") {
    SamplingPlan plan;
    plan.pairs = 20000;
    const auto res = semiconvexity_K(langevin(custom_poly(1, {{{4}, -1.0}})), plan);
    CHECK(res.diverged);
    CHECK(res.K == kDivergedK);
  }

  TEST_CASE("curvature profile: analytic bypasses") {
    SamplingPlan plan;
    const std::vector<double> radii{0.5, 1.0, 2.0, 4.0};
    const auto rq = kappa_profile(langevin(quadratic(1, 1.5)), radii, plan);
    CHECK(rq.certification_mode == CertificationMode::Analytic);
    REQUIRE(rq.kappa_profile.size() == radii.size());
    for (const auto& [r, k] : rq.kappa_profile) CHECK(k == doctest::Approx(3.0));
    CHECK(rq.K_semiconvexity == doctest::Approx(3.0));
    CHECK(rq.kappa_infinity == doctest::Approx(3.0));

    const auto rp = kappa_profile(langevin(power(1, 2.0)), radii, plan);
    CHECK(rp.certification_mode == CertificationMode::Analytic);
    REQUIRE(rp.Kbeta.has_value());
    CHECK(rp.Kbeta->first == doctest::Approx(2.0));
    CHECK(rp.Kbeta->second == doctest::Approx(constants::superconvex_Kbeta(2.0, 1)));
    for (size_t i = 0; i < radii.size(); ++i)
      CHECK(rp.kappa_profile[i].second == doctest::Approx(radii[i] * radii[i]));
  }

  TEST_CASE("curvature profile: sampled sine perturbation stays in its band") {
    // kappa(r) = K + (M/2) (sin x - sin y)/(x - y) over |x-y| = r, so it lies
    // within K +- (M/2) min(1, 2/r).
    SamplingPlan plan;
    plan.pairs = 20000;
    plan.seed = 5;
    const std::vector<double> radii{0.5, 1.0, 2.0, 4.0, 8.0};
    const auto rep = kappa_profile(langevin(perturbed_convex(1, 1.0, 1.0)), radii, plan);
    CHECK(rep.certification_mode == CertificationMode::Sampled);
    CHECK_FALSE(rep.diverged);
    REQUIRE(rep.kappa_profile.size() == radii.size());
    for (const auto& [r, k] : rep.kappa_profile) {
      const double half_band = 0.5 * std::min(1.0, 2.0 / r);
      CHECK(k >= 1.0 - half_band - 1e-9);
      CHECK(k <= 1.0 + half_band + 1e-9);
      CHECK(k >= 1.0 - 1.0 / r - 1e-9);  // the coarse 1 - M/r floor
    }
    CHECK(rep.kappa_infinity >= rep.K_semiconvexity);
  }

  TEST_CASE("modulus certificate for the quartic") {
    SamplingPlan plan;
    plan.pairs = 20000;
    plan.seed = 9;
    const double kb = constants::superconvex_Kbeta(2.0, 1);
    const auto ok = certify_Hphi(power(1, 2.0), 2.0, kb, plan);
    CHECK(ok.holds);
    CHECK(ok.violations == 0);
    CHECK(ok.min_ratio >= kb * (1.0 - 1e-9));
    const auto bad = certify_Hphi(power(1, 2.0), 2.0, kb * 1.05, plan);
    CHECK_FALSE(bad.holds);
    CHECK(bad.violations > 0);
    CHECK(bad.min_ratio < kb * 1.05);
  }

  TEST_CASE("langevin and brownian wiring") {
    const auto spec = langevin(quadratic(2, 1.0));
    CHECK(spec.d == 2);
    CHECK(spec.sigma_kind == SigmaKind::Identity);
    REQUIRE(spec.meta.K.has_value());
    CHECK(*spec.meta.K == doctest::Approx(2.0));
    std::vector<double> x{1.0, -2.0}, out(2);
    spec.b(0.0, x, out);
    CHECK(out[0] == doctest::Approx(-1.0));  // -1/2 * 2 lambda x
    CHECK(out[1] == doctest::Approx(2.0));

    const auto bm = brownian(3);
    std::vector<double> x3{1.0, 2.0, 3.0}, out3(3);
    bm.b(0.0, x3, out3);
    for (double v : out3) CHECK(v == 0.0);
    CHECK(*bm.meta.K == 0.0);
  }

  TEST_CASE("kinetic system doubles the state and drives velocity only") {
    const auto spec = builtin_kinetic(quadratic(1, 1.0));
    CHECK(spec.d == 2);
    CHECK(spec.sigma_kind == SigmaKind::Diagonal);
    REQUIRE(spec.sigma_diag.size() == 2);
    CHECK(spec.sigma_diag[0] == 0.0);
    CHECK(spec.sigma_diag[1] == 1.0);
    std::vector<double> z{1.0, 0.5}, out(2);
    spec.b(0.0, z, out);
    CHECK(out[0] == doctest::Approx(0.5));    // dx = v
    CHECK(out[1] == doctest::Approx(-2.5));   // dv = -grad V - v = -2x - v
  }

  TEST_CASE("interacting-particle drift and evenness guard") {
    const auto mk = builtin_mckean(quadratic(1, 1.0), quadratic(1, 0.5));
    REQUIRE(mk.meta.K_V.has_value());
    CHECK(*mk.meta.K_V == doctest::Approx(2.0));
    CHECK(*mk.meta.K_W == doctest::Approx(1.0));
    const std::vector<double> cloud{1.0, 3.0};
    std::vector<double> out(1);
    mk.particle_drift(cloud, 2, 0, out);
    CHECK(out[0] == doctest::Approx(-1.0 + 0.5));
    mk.particle_drift(cloud, 2, 1, out);
    CHECK(out[0] == doctest::Approx(-3.0 - 0.5));

    CHECK_THROWS_AS(builtin_mckean(zero_potential(1), custom_poly(1, {{{3}, 1.0}})),
                    SldError);
  }

  TEST_CASE("config-facing potential registry") {
    const auto names = potential_family_names();
    CHECK(names.size() == 6);
    const auto q = make_potential("quadratic", 2, {{"lambda", 1.5}});
    CHECK(U_at(q, {1.0, 2.0}) == doctest::Approx(7.5));
    const auto pc = make_potential("perturbed_convex", 1, {{"K", 1.0}, {"M", 0.5}});
    CHECK(pc.K1 == doctest::Approx(1.0));
    CHECK(pc.M == doctest::Approx(0.5));
    CHECK_THROWS_AS(make_potential("nope", 1, {}), SldError);
    const auto cp = make_potential("custom_poly", 1, {}, {{{2}, 2.0}});
    CHECK(U_at(cp, {3.0}) == doctest::Approx(18.0));
  }
}
