#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sld/common.hpp"

namespace sld::constants {

// ---------------------------------------------------------------------------
// Certificates

enum class IneqKind { Poincare, LogSobolev, T2, WI, Beckner, WeakW2I, WeakPoincare };
enum class Convention { Standard, PaperHalf };

const char* to_string(IneqKind k);
const char* to_string(Convention c);

struct InequalityCertificate {
  IneqKind kind;
  double constant = 0.0;
  double T = kInf;  // horizon the constant refers to (may be infinity)
  std::vector<std::pair<std::string, double>> inputs;
  Convention convention = Convention::Standard;
  std::string anchor;  // formula identifier, stable across versions
};

// ---------------------------------------------------------------------------
// Semigroup flow constants. All take T (possibly infinity, requires K > 0)
// and use a series branch below |K|T < 1e-8 in place of (1-e^{-KT})/K.

// e^{-KT} C_P0 + M (1-e^{-KT})/K, with M = sup |sigma|^2.
double poincare_flow(double K, double M, double T, double C_P0);
// e^{-KT} C_LS0 + 2 (1-e^{-KT})/K (identity diffusion only).
double logsobolev_flow(double K, double T, double C_LS0);

// T2 transport constant of the time-T marginal started from a point:
//   K > 0: min(2/K, 4(1-e^{-KT/2})/K);  K = 0: 2T;
//   K < 0: 4[(1-e^{-KT/2})/K - (1-e^{-KT/2})^2/K].
double t2_constant(double K, double T);
// Flow version given an initial T2 constant C_W0:
//   K > 0 (needs 0 < lambda < K): e^{-(K-lambda)T} C_W0 + 2/lambda;
//   K <= 0: C_T + sqrt(2)/2 + B_T C_W0,
//           B_T = 1 + sqrt(2)(1-e^{-KT})/K + 2(e^{-KT}-1).
double t2_flow(double K, double T, double C_W0, double lambda);

// WI constant with A = K - 2 lambda: e^{-AT} D0 + 2(1-e^{-AT})/(A lambda).
double wi_constant(double K, double lambda, double T, double D0);

// Beckner-type constant M ((m+2)/m)(e^{2Kt/m}-1)/K (K -> 0 by series).
double beckner_constant(double m, double M, double K, double t);

// ---------------------------------------------------------------------------
// Reflection-coupling (Eberle-type) rate from a curvature profile kappa(r).

struct EberleRate {
  double R0 = 0.0;
  double R1 = 0.0;
  double phi_min = 1.0;
  double lambda = 0.0;     // contraction rate
  double prefactor = 2.0;  // 2 / phi_min
  std::vector<std::pair<double, double>> D;  // tabulated concave distance
  bool general = false;    // true when built with the (M, N_inv, Lambda) data
  bool no_rate = false;    // kappa_infinity <= 0: no finite R1
  bool positivity_ok = true;  // general case: (2/N_inv) - Lambda > 0 held
};

struct GeneralSigmaBounds {
  double M = 1.0;      // sup |sigma u|^2
  double N_inv = 1.0;  // sup |sigma^{-1} u|^2
  double Lambda = 0.0; // sup |(sigma(x)-sigma(x')) u|^2
};

// kappa as a callable profile; for the identity-diffusion case the exponent
// constant is 1/4 and 1/lambda = int_0^{R1} Phi/phi; in the general case the
// exponent constant is 1/((2/N_inv)-Lambda) and lambda = phi_min/(2 R1^2).
EberleRate eberle_rate(const std::function<double(double)>& kappa,
                       std::optional<GeneralSigmaBounds> general = std::nullopt);
// Tabulated profile variant (piecewise-linear interpolation, flat tail).
EberleRate eberle_rate_profile(const std::vector<std::pair<double, double>>& kappa,
                               std::optional<GeneralSigmaBounds> general = std::nullopt);

// Poincare bound 1/(2 lambda) from a computed rate.
double eberle_poincare(const EberleRate& rate);

// Poincare bound for the convex-plus-bounded-gradient family evaluated from
// the displayed closed form (M/K + sqrt(8/K))^2 exp(M^2/(8K)).
double perturbation_cp_bound(double K, double M);

// ---------------------------------------------------------------------------
// Super-convex potentials U = |x|^{2 beta}.

// Modulus constant: 2 beta 2^{2-2beta} in dimension 1, else 2 beta 2^{3-3beta}.
double superconvex_Kbeta(double beta, int d);

struct CPCLSBounds {
  double C_P;
  double C_LS;
};
// Poincare / log-Sobolev bounds for the super-convex modulus a^beta.
CPCLSBounds superconvex_CP_CLS(double K, double beta);
// Same for the capped modulus a^beta ^ 1 (lack-of-convexity variant),
// each bound maxed with 32/K.
CPCLSBounds lack_CP_CLS(double K, double beta);

// Weak W2I constant 2 F(8 I / K^2) where F inverts eps -> eps alpha^2(eps).
struct WeakW2I {
  double w2_bound;       // bound on W2^2
  double entropy_bound;  // companion bound 2 (I F(8I/K^2))^{1/2}
};
WeakW2I weak_w2i(const std::function<double(double)>& alpha, double K, double I);

// ---------------------------------------------------------------------------
// Pointwise decay formulas (umbrella dispatcher).

enum class DecayKind {
  PolynomialSuperconvex,  // params: K, beta, r0 = |x-y|, t  -> bound on |X-Y|^2
  AlphaEpsilon,           // params: K, alpha_eps, eps, eta0, t
  ReverseGradient,        // params: f_sup, t
  OuHitting,              // params: lambda, r, t
  VarianceDecay,          // params: M, K, t  (times int |grad g|^2)
  EntropyDecay,           // params: c, M, K, t (times int |grad g|^2 / g)
  MixedCommutation,       // params: c_n, phi_min, q, L, lambda, t
};

struct DecayParams {
  double K = 0, beta = 2, r0 = 1, t = 0;
  double alpha_eps = 1, eps = 0, eta0 = 1;
  double f_sup = 1;
  double lambda = 1, r = 1;
  double M = 1, c = 1;
  double c_n = 1, phi_min = 1, q = 1, L = 0;
};
double decay_bound(DecayKind kind, const DecayParams& p);

// ---------------------------------------------------------------------------
// Time-dependent curvature.

// C(T) = 4 e^{-K(T)+lambda(T)} int_0^T e^{K(s)-lambda(s)} / lambda'(s) ds;
// the flow version adds C_T0 e^{-K(T)+lambda(T)}. lambda_prime is supplied by
// the caller (no symbolic differentiation).
double nonhomogeneous_t2(const std::function<double(double)>& Kfun,
                         const std::function<double(double)>& lambda,
                         const std::function<double(double)>& lambda_prime,
                         double T, double C_T0 = 0.0);

// The two stock heuristics for the free function lambda(.): linear in t, or
// proportional to K(t).
std::function<double(double)> linear_lambda(double slope);

// ---------------------------------------------------------------------------
// McKean-Vlasov / kinetic rates.

struct SigmaVariant {
  double r;  // diffusion perturbation size
  double l;  // Lipschitz constant of the curvature profile
};
// Squared-W2 contraction rate K_V + min(K_W, 0); sigma-variant subtracts
// r (1 + 4 l^2). The matched-means branch (V = 0) returns K_W.
double mckean_rate(double K_V, double K_W,
                   std::optional<SigmaVariant> variant = std::nullopt,
                   bool matched_means_V0 = false);

struct KineticContraction {
  double a = 0, b = 0, K = 0;
  bool found = false;
};
// Grid-plus-refinement search for (a, b) making
// N((x,v),(y,w)) = a|x-y|^2 + b<x-y, v-w> + |v-w|^2 decay at rate K along the
// linearized kinetic system with Hessian range [2-delta, 2+delta].
KineticContraction kinetic_contraction_search(double delta);

// ---------------------------------------------------------------------------
// Convolution / scaling stability.

struct ConvolutionBounds {
  double upper;                 // lambda C_X + (1-lambda) C_Y
  double lower_given_symmetric; // max(0, lambda C_X - (1-lambda) C_Y)
};
ConvolutionBounds convolution_constants(double lambda, double C_X, double C_Y,
                                        IneqKind kind);

// Curvature of sqrt(lambda) X + sqrt(1-lambda) G: K / (lambda + K(1-lambda)).
double prekopa_curvature(double K, double lambda);

// Weak Poincare rate alpha(s) = s inf_{u>0} (1/u) c^{-1}(u e^{1-u/s}) for a
// decreasing decay function c; the infimum by golden-section over log u, the
// inverse by bisection. Values of c above c(0) invert to 0.
double weak_poincare_alpha(const std::function<double(double)>& c, double s);

}  // namespace sld::constants
