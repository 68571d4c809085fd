#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sld/constants.hpp"
#include "sld/model.hpp"
#include "sld/sde.hpp"

namespace sld::verify {

inline constexpr int kBootstrapB = 200;
inline constexpr double kDefaultSigmas = 3.0;

enum class PassRule { UpperBound, LowerBound, TwoSided };
const char* to_string(PassRule r);

// One verified inequality: empirical statistic vs theoretical bound with a
// bootstrap standard error and a declared k-standard-error pass rule.
struct CheckResult {
  std::string name;
  double bound = 0.0;
  double empirical = 0.0;
  double stderr_value = 0.0;
  double k = kDefaultSigmas;
  PassRule rule = PassRule::UpperBound;
  bool passed = false;
  double margin_sigmas = 0.0;
  // A finite test-function family can refute but never certify an inequality.
  bool necessary_condition_only = false;
  std::map<std::string, std::string> provenance;
  // Per-time rows (t, empirical, bound, stderr) for CSV emission.
  std::vector<std::array<double, 4>> series;
};

// Fills passed/margin_sigmas from the other fields.
void finalize(CheckResult& r);

// ---------------------------------------------------------------------------
// Test function library
// ---------------------------------------------------------------------------

struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> f;
  std::function<void(std::span<const double>, std::span<double>)> grad;
  bool positive = false;  // strictly positive (usable on the entropy side)
};

// The fixed 20-function family (linear forms, coordinate quadratics, bounded
// trigonometric functions) instantiated for dimension d.
std::vector<TestFunction> test_library(int d);
// Log-Sobolev extremal direction exp(a x_1 / 2) (not part of the fixed 20).
TestFunction exp_tilt(double a);
TestFunction constant_fn(double value);

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

// W_p(law(X_t), law(Y_t)) <= e^{-K t / p} |x - y| under synchronous coupling;
// K from spec metadata.
CheckResult check_w_contraction(const model::DiffusionSpec& spec, const std::vector<double>& x,
                                const std::vector<double>& y, const std::vector<double>& times,
                                double p, const sde::IntegratorConfig& cfg);

enum class CommutationForm { Strong, Squared, Interpolated };

// Gradient/semigroup commutation at a point: |grad P_t f|(x) estimated by
// common-random-number central differences, compared to the selected
// right-hand form.
CheckResult check_gradient_commutation(const model::DiffusionSpec& spec, const TestFunction& f,
                                       const std::vector<double>& x, double t,
                                       CommutationForm form, const sde::IntegratorConfig& cfg,
                                       double m = 2.0);

// Var(f) <= C mean|grad f|^2 over the cloud for every library function;
// necessary-condition check only.
CheckResult check_poincare(const sde::ParticleCloud& cloud,
                           const std::vector<TestFunction>& fns, double C, uint64_t seed);

// Ent(f^2) <= C mean|grad f|^2 (jackknife-corrected plug-in entropy).
CheckResult check_logsobolev(const sde::ParticleCloud& cloud,
                             const std::vector<TestFunction>& fns, double C, uint64_t seed);

// Closed-form T2 check on the OU family (marginal N(x e^{-Kt/2}, (1-e^{-KT})/K)
// started from a point): Gaussian mean tilts, paper-half transport side, no
// Monte Carlo. K = 0 is the Brownian branch with variance T.
CheckResult check_t2(double K, double T, const std::vector<double>& tilts);

// Var_{mu_inf}(P_t g) <= (M/2K) e^{-Kt} mean|grad g|^2 via the stationary
// autocovariance at lag 2t (reversible identity); burn-in horizon cfg.T.
CheckResult check_variance_decay(const model::DiffusionSpec& spec, const TestFunction& g,
                                 const std::vector<double>& times,
                                 const sde::IntegratorConfig& cfg);

// Ent_{mu_inf}(P_t g) <= (c M / K) e^{-Kt} mean(|grad g|^2 / g) for positive g
// (c = 1 for identity diffusion); inner Monte Carlo estimates P_t g pointwise.
CheckResult check_entropy_decay(const model::DiffusionSpec& spec, const TestFunction& g,
                                const std::vector<double>& times,
                                const sde::IntegratorConfig& cfg, size_t inner_paths = 96);

// W1 between reflection-coupled marginals vs (2/phi_min) e^{-lambda t} |x-y|.
CheckResult check_eberle_w1(const model::DiffusionSpec& spec, const std::vector<double>& x,
                            const std::vector<double>& y, const std::vector<double>& times,
                            const constants::EberleRate& rate, const sde::IntegratorConfig& cfg);

// Coupling-time tail against the driftless closed form 2 Phi(r/(2 sqrt t)) - 1
// (two-sided; meaningful for b = 0, d = 1).
CheckResult check_coupling_time_exact(const model::DiffusionSpec& spec,
                                      const std::vector<double>& x, const std::vector<double>& y,
                                      const std::vector<double>& times,
                                      const sde::IntegratorConfig& cfg);

// One-sided tail bound P(T_c > t) <= r / sqrt(2 pi t), or the OU variant
// sqrt(lambda) e^{-t lambda / 2} / (sqrt(2 pi) sqrt(1 - e^{-t lambda})) r when
// ou_lambda is given.
CheckResult check_coupling_time_tail(const model::DiffusionSpec& spec,
                                     const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& times,
                                     const sde::IntegratorConfig& cfg,
                                     std::optional<double> ou_lambda = std::nullopt);

// Paired-cloud interacting-particle contraction: fitted exponential rate of
// W2(cloud1(t), cloud2(t)) >= (K_V + min(K_W, 0))/2 - k stderr. The V = 0
// matched-means branch uses rate K_W/2.
CheckResult check_mckean_contraction(const model::McKeanSpec& mv, const sde::InitSampler& init1,
                                     const sde::InitSampler& init2,
                                     const std::vector<double>& times,
                                     const sde::IntegratorConfig& cfg,
                                     bool matched_means_V0 = false);

// Exact-arithmetic convolution stability on Gaussian factors with variances
// var1, var2 mixed with weight lambda; checks the upper bound, the symmetric
// lower bound, and the alpha-regularization specialization.
CheckResult check_convolution(constants::IneqKind kind, double var1, double var2,
                              double lambda);

}  // namespace sld::verify
