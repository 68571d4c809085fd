#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "sld/constants.hpp"
#include "support/golden_cases.hpp"

using namespace sld;
using namespace sld::constants;

TEST_SUITE("constants") {
  TEST_CASE("poincare_flow equals the linear-drift marginal variance") {
    // 20 (K, T) pairs, including negative and near-zero curvature.
    const double Ks[] = {-2.0, -0.5, 1e-12, 0.3, 2.0};
    const double Ts[] = {0.25, 1.0, 3.0, 10.0};
    for (double K : Ks)
      for (double T : Ts) {
        const double direct = std::abs(K) * T < 1e-8
                                  ? T * (1.0 - K * T / 2.0)
                                  : (1.0 - std::exp(-K * T)) / K;
        CHECK(poincare_flow(K, 1.0, T, 0.0) == doctest::Approx(direct).epsilon(1e-13));
      }
  }

  TEST_CASE("flow constants: limits and initial-value transport") {
    CHECK(poincare_flow(0.0, 3.0, 2.0, 0.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(poincare_flow(2.0, 1.0, kInf, 5.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(poincare_flow(1.0, 1.0, 0.0, 7.0) == doctest::Approx(7.0).epsilon(1e-14));
    // the initial value rides along as e^{-KT} C0
    CHECK(poincare_flow(1.0, 1.0, 2.0, 3.0) - poincare_flow(1.0, 1.0, 2.0, 0.0) ==
          doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-13));
    CHECK_THROWS(poincare_flow(1.0, 0.0, 2.0, 0.0));
    CHECK(logsobolev_flow(2.0, kInf, 0.0) == 1.0);  // Gaussian N(0, 1/2) constant
    CHECK(logsobolev_flow(1.0, 1.0, 0.0) ==
          doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-14));
  }

  TEST_CASE("t2_constant branches") {
    CHECK(t2_constant(0.0, 3.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(t2_constant(2.0, kInf) == doctest::Approx(1.0).epsilon(1e-14));
    const double K = 1.5, T = 2.0;
    CHECK(t2_constant(K, T) ==
          doctest::Approx(std::min(2.0 / K, 4.0 * (1.0 - std::exp(-K * T / 2.0)) / K))
              .epsilon(1e-13));
    const double Kn = -1.0;
    const double e = 1.0 - std::exp(-Kn * T / 2.0);
    CHECK(t2_constant(Kn, T) == doctest::Approx(4.0 * (e / Kn - e * e / Kn)).epsilon(1e-13));
    CHECK_THROWS(t2_constant(-1.0, kInf));
  }

  TEST_CASE("wi and beckner forms") {
    // A = K - 2 lambda
    const double K = 2.0, lam = 0.5, T = 1.0, A = K - 2.0 * lam;
    CHECK(wi_constant(K, lam, T, 0.0) ==
          doctest::Approx(2.0 * (1.0 - std::exp(-A * T)) / (A * lam)).epsilon(1e-13));
    CHECK(beckner_constant(2.0, 1.0, 1.0, 0.5) ==
          doctest::Approx(2.0 * (std::exp(0.5) - 1.0)).epsilon(1e-13));
    // K -> 0 limit: M ((m+2)/m) 2t/m
    CHECK(beckner_constant(2.0, 1.0, 0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS(beckner_constant(1.5, 1.0, 1.0, 0.5));
  }

  TEST_CASE("constant curvature profile gives lambda = K/4") {
    for (double K : {0.5, 1.0, 2.0}) {
      const auto r = eberle_rate([K](double) { return K; });
      CHECK(r.R0 == 0.0);
      CHECK(r.phi_min == 1.0);
      CHECK(r.lambda == doctest::Approx(K / 4.0).epsilon(1e-8));
      CHECK(r.prefactor == 2.0);
      CHECK(eberle_poincare(r) == doctest::Approx(2.0 / K).epsilon(1e-8));
    }
  }

  TEST_CASE("convex-plus-perturbation profile matches closed forms and the oracle") {
    const auto r = eberle_rate([](double rr) { return 1.0 - 1.0 / std::max(rr, 1e-12); });
    CHECK(r.R0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.R1 == doctest::Approx(1.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK(r.phi_min == doctest::Approx(std::exp(-1.0 / 8.0)).epsilon(1e-10));
    // independent scipy quadrature of the same definitions
    CHECK(r.lambda == doctest::Approx(0.13382618364946353).epsilon(1e-8));
    // closed-form Poincare bound (R1^2 / phi_min shape)
    CHECK(perturbation_cp_bound(1.0, 1.0) ==
          doctest::Approx(std::pow(1.0 + 2.0 * std::sqrt(2.0), 2.0) * std::exp(1.0 / 8.0))
              .epsilon(1e-10));
  }

  TEST_CASE("tabulated-profile variant reproduces the callable variant") {
    std::vector<std::pair<double, double>> prof;
    for (int i = 0; i <= 400; ++i) {
      const double rr = 1e-3 + (20.0 - 1e-3) * i / 400.0;
      prof.emplace_back(rr, 1.0 - 1.0 / rr);
    }
    const auto a = eberle_rate_profile(prof);
    const auto b = eberle_rate([](double rr) { return 1.0 - 1.0 / std::max(rr, 1e-12); });
    CHECK(a.lambda == doctest::Approx(b.lambda).epsilon(2e-2));
    CHECK(a.R0 == doctest::Approx(b.R0).epsilon(1e-2));
  }

  TEST_CASE("concave distance D brackets and concavity") {
    const auto r = eberle_rate([](double rr) { return 1.0 - 1.0 / std::max(rr, 1e-12); });
    REQUIRE(r.D.size() >= 3);
    for (const auto& [rr, Dv] : r.D) {
      CHECK(Dv <= rr + 1e-12);
      CHECK(Dv >= r.phi_min * rr / 2.0 - 1e-12);
    }
    for (size_t i = 2; i < r.D.size(); ++i) {
      const double second = r.D[i].second - 2.0 * r.D[i - 1].second + r.D[i - 2].second;
      CHECK(second <= 1e-9);
    }
  }

  TEST_CASE("no positive rate when curvature stays negative") {
    const auto r = eberle_rate([](double) { return -1.0; });
    CHECK(r.no_rate);
    CHECK_THROWS(eberle_poincare(r));
  }

  TEST_CASE("general-sigma variant switches the exponent and rate formula") {
    GeneralSigmaBounds gb{1.0, 1.0, 0.0};
    const auto r = eberle_rate([](double) { return 1.0; }, gb);
    CHECK(r.general);
    CHECK(r.positivity_ok);
    CHECK(r.lambda == doctest::Approx(r.phi_min / (2.0 * r.R1 * r.R1)).epsilon(1e-12));
    GeneralSigmaBounds bad{1.0, 1.0, 3.0};  // (2/N_inv) - Lambda < 0
    const auto rb = eberle_rate([](double) { return 1.0; }, bad);
    CHECK_FALSE(rb.positivity_ok);
  }

  TEST_CASE("superconvex modulus constants") {
    CHECK(superconvex_Kbeta(1.0, 1) == doctest::Approx(2.0));
    CHECK(superconvex_Kbeta(1.0, 5) == doctest::Approx(2.0));
    CHECK(superconvex_Kbeta(2.0, 1) == doctest::Approx(1.0));
    CHECK(superconvex_Kbeta(2.0, 2) == doctest::Approx(0.5));
    double prev = 1e9;
    for (double b : {1.0, 1.5, 2.0, 3.0}) {
      const double v = superconvex_Kbeta(b, 1);
      CHECK(v < prev);
      prev = v;
    }
    const auto cb = superconvex_CP_CLS(1.0, 2.0);
    CHECK(cb.C_P > 0.0);
    CHECK(cb.C_LS > 0.0);
    const auto lb = lack_CP_CLS(1.0, 2.0);
    CHECK(lb.C_P >= 32.0);
    CHECK(lb.C_LS >= 32.0);
  }

  TEST_CASE("weak_w2i inverts a constant rate exactly") {
    const auto w = weak_w2i([](double) { return 1.0; }, 2.0, 1.0);
    // G(eps) = eps, target 8I/K^2 = 2 -> F = 2
    CHECK(w.w2_bound == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(w.entropy_bound == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
    const auto z = weak_w2i([](double) { return 1.0; }, 2.0, 0.0);
    CHECK(z.w2_bound == 0.0);
  }

  TEST_CASE("decay formulas match their closed forms") {
    DecayParams p;
    p.K = 1.0;
    p.beta = 2.0;
    p.r0 = 2.0;
    p.t = 3.0;
    // eta0 / (1 + K (beta-1) eta0^{beta-1} t)^{1/(beta-1)} with eta0 = 4
    CHECK(decay_bound(DecayKind::PolynomialSuperconvex, p) ==
          doctest::Approx(4.0 / (1.0 + 4.0 * 3.0)).epsilon(1e-13));
    p.beta = 1.0;
    CHECK(decay_bound(DecayKind::PolynomialSuperconvex, p) ==
          doctest::Approx(4.0 * std::exp(-3.0)).epsilon(1e-13));
    DecayParams q;
    q.f_sup = 2.0;
    q.t = 2.0;
    CHECK(decay_bound(DecayKind::ReverseGradient, q) ==
          doctest::Approx(4.0 / std::sqrt(4.0 * kPi)).epsilon(1e-13));
    DecayParams o;
    o.lambda = 1.0;
    o.r = 1.0;
    o.t = 1.0;
    const double el = std::exp(-1.0);
    CHECK(decay_bound(DecayKind::OuHitting, o) ==
          doctest::Approx(std::exp(-0.5) / (std::sqrt(2.0 * kPi) * std::sqrt(1.0 - el)))
              .epsilon(1e-13));
    DecayParams v;
    v.M = 2.0;
    v.K = 0.5;
    v.t = 1.0;
    CHECK(decay_bound(DecayKind::VarianceDecay, v) ==
          doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-13));
    CHECK(decay_bound(DecayKind::EntropyDecay, v) ==
          doctest::Approx(4.0 * std::exp(-0.5)).epsilon(1e-13));
    DecayParams m;
    m.c_n = 1.0;
    m.phi_min = 0.5;
    m.q = 1.0;
    m.L = 0.5;
    m.lambda = 1.0;
    m.t = 2.0;
    CHECK(decay_bound(DecayKind::MixedCommutation, m) ==
          doctest::Approx(std::pow(4.0, 0.5) * std::exp((0.25 - 0.5) * 2.0)).epsilon(1e-13));
  }

  TEST_CASE("nonhomogeneous transport constant matches the scipy oracle") {
    auto Kf = [](double t) { return t + 0.5 * std::sin(t); };
    auto lam = linear_lambda(0.5);
    auto lamp = [](double) { return 0.5; };
    CHECK(nonhomogeneous_t2(Kf, lam, lamp, 1.0, 0.5) ==
          doctest::Approx(5.5322569842331717).epsilon(1e-9));
    CHECK(nonhomogeneous_t2(Kf, lam, lamp, 0.0, 0.7) == 0.7);
  }

  TEST_CASE("mckean and kinetic rates") {
    CHECK(mckean_rate(1.0, -0.25) == doctest::Approx(0.75));
    CHECK(mckean_rate(2.0, 0.5) == doctest::Approx(2.0));
    CHECK(mckean_rate(0.0, 0.8, std::nullopt, true) == doctest::Approx(0.8));
    SigmaVariant sv{0.1, 1.0};
    CHECK(mckean_rate(1.0, -0.25, sv) == doctest::Approx(0.75 - 0.1 * 5.0));
    const auto kc = kinetic_contraction_search(0.0);
    CHECK(kc.found);
    CHECK(kc.K > 0.0);
    CHECK(kc.a > 0.0);
    CHECK(kc.b * kc.b < 4.0 * kc.a);  // N stays positive definite
  }

  TEST_CASE("convolution bounds and regularized curvature") {
    const auto cb = convolution_constants(0.25, 4.0, 2.0, IneqKind::Poincare);
    CHECK(cb.upper == doctest::Approx(0.25 * 4.0 + 0.75 * 2.0));
    CHECK(cb.lower_given_symmetric == doctest::Approx(0.0));
    const auto cb2 = convolution_constants(0.75, 4.0, 2.0, IneqKind::LogSobolev);
    CHECK(cb2.lower_given_symmetric == doctest::Approx(0.75 * 4.0 - 0.25 * 2.0));
    CHECK(prekopa_curvature(1.0, 0.3) == doctest::Approx(1.0));
    CHECK(prekopa_curvature(4.0, 0.5) == doctest::Approx(4.0 / (0.5 + 2.0)));
  }

  TEST_CASE("weak poincare rate matches the analytic value and its cutoff") {
    CHECK(weak_poincare_alpha([](double t) { return std::exp(-t); }, 0.5) ==
          doctest::Approx(0.5).epsilon(1e-7));
    CHECK(weak_poincare_alpha([](double t) { return std::exp(-t); }, 2.0) ==
          doctest::Approx(0.0));
    CHECK(weak_poincare_alpha([](double t) { return std::pow(1.0 + t, -2.0); }, 1.0) ==
          doctest::Approx(0.0));
  }

  TEST_CASE("golden regression table") {
    std::ifstream in(std::string(SLD_GOLDEN_DIR) + "/constants_golden.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);  // version banner
    std::getline(in, line);  // header
    size_t row = 0;
    const auto cases = sld::testing::golden_cases();
    while (std::getline(in, line)) {
      REQUIRE(row < cases.size());
      const size_t pos = line.rfind(',');
      const double stored = std::stod(line.substr(pos + 1));
      const double fresh = cases[row].value;
      CHECK(std::abs(fresh - stored) <= 1e-12 * (1.0 + std::abs(stored)));
      ++row;
    }
    CHECK(row == cases.size());
  }
}
