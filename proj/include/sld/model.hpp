#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sld/common.hpp"

namespace sld::model {

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

enum class PotentialFamily {
  Zero,             // U = 0
  Quadratic,        // U = lambda |x|^2
  Power,            // U = |x|^{2 beta}
  PerturbedConvex,  // U = (K/2)|x|^2 + (M/2)(x_1 - cos x_1)
  DoubleWell,       // U = x^4/4 - x^2/2 (1-d shape applied to x_1)
  CustomPoly,       // U = sum_alpha c_alpha prod_i x_i^{alpha_i}
};

std::string to_string(PotentialFamily f);

struct PotentialSpec {
  int d = 1;
  PotentialFamily family = PotentialFamily::Zero;
  // Family parameters (only the relevant ones are read).
  double lambda = 0.0;  // Quadratic
  double beta = 1.0;    // Power
  double K1 = 0.0;      // PerturbedConvex: convexity of the quadratic part
  double M = 0.0;       // PerturbedConvex: sup-norm of the perturbation gradient
  // CustomPoly terms: (multi-index of length d, coefficient).
  std::vector<std::pair<std::vector<int>, double>> poly;

  double U(std::span<const double> x) const;
  void grad(std::span<const double> x, std::span<double> out) const;

  // Closed-form semi-convexity constant of <grad U(x)-grad U(y), x-y> / |x-y|^2
  // where known (Quadratic: 2*lambda; Power: 0 for beta>1, 2 at beta=1; Zero: 0).
  std::optional<double> analytic_semiconvexity() const;
};

PotentialSpec zero_potential(int d);
PotentialSpec quadratic(int d, double lambda);
PotentialSpec power(int d, double beta);
PotentialSpec perturbed_convex(int d, double K, double M);
PotentialSpec double_well();
PotentialSpec custom_poly(int d, std::vector<std::pair<std::vector<int>, double>> terms);

// Central-difference consistency of grad vs U at random probes; returns max
// relative error over n points.
double gradient_consistency(const PotentialSpec& pot, int n_points, uint64_t seed);

// ---------------------------------------------------------------------------
// Diffusion specifications
// ---------------------------------------------------------------------------

struct Metadata {
  std::optional<double> K;       // semi-convexity of the drift pair
  std::optional<double> K_V;     // McKean confinement convexity
  std::optional<double> K_W;     // McKean interaction convexity
  std::optional<double> beta;    // super-convexity exponent
  std::optional<double> M;       // sup_{|u|=1} sup_x |sigma(x) u|^2
  std::optional<double> N_inv;   // sup |sigma^{-1}(x) u|^2
  std::optional<double> Lambda;  // sup over pairs |(sigma(x)-sigma(y)) u|^2
};

struct DiffusionSpec {
  int d = 1;
  DriftFn b;         // (t, x, out)
  SigmaFn sigma;     // (t, x, row-major d*d out); may be empty for Identity
  SigmaKind sigma_kind = SigmaKind::Identity;
  std::vector<double> sigma_diag;   // Diagonal: constant per-coordinate factors
  std::vector<double> sigma_const;  // Constant: row-major d*d matrix
  bool time_dependent = false;
  std::string name;
  Metadata meta;
  std::optional<PotentialSpec> potential;  // set for Langevin builds

  void eval_sigma(double t, std::span<const double> x, std::span<double> out) const;
};

// Langevin diffusion: b = -1/2 grad U, sigma = Id.
DiffusionSpec langevin(const PotentialSpec& pot);
// Driftless Brownian motion.
DiffusionSpec brownian(int d);

// Kinetic (position, velocity) system: state z = (x, v) in R^{2d};
// drift (v, -grad V(x) - v); noise acts on the velocity block only.
DiffusionSpec builtin_kinetic(const PotentialSpec& V);

// Interacting-particle specification: drift on particle i of a cloud is
//   -1/2 grad V(X_i) - (1/2N) sum_j grad W(X_i - X_j).
// W must be even; checked at probe points on construction.
struct McKeanSpec {
  int d = 1;
  PotentialSpec V;
  PotentialSpec W;
  Metadata meta;
  std::string name;
  void particle_drift(std::span<const double> cloud, size_t n, size_t i,
                      std::span<double> out) const;
};

McKeanSpec builtin_mckean(const PotentialSpec& V, const PotentialSpec& W);

// ---------------------------------------------------------------------------
// Curvature certification
// ---------------------------------------------------------------------------

enum class CertificationMode { Analytic, Sampled };

struct SamplingPlan {
  long pairs = 100000;       // total probed pairs
  double r_min = 1e-3;       // radius strata, log-spaced
  double r_max = 1e2;
  int radii = 40;            // number of strata
  double center_scale = 3.0; // centers uniform in [-scale, scale]^d
  int descent_steps = 50;    // local refinement budget on the worst pair
  uint64_t seed = 0;
};

struct CurvatureReport {
  double K_semiconvexity = 0.0;
  std::vector<std::pair<double, double>> kappa_profile;  // (r, kappa(r))
  double kappa_infinity = 0.0;
  std::optional<std::pair<double, double>> Kbeta;  // (beta, K_beta)
  CertificationMode certification_mode = CertificationMode::Sampled;
  bool diverged = false;  // sampled ratio ran away below the divergence cutoff
};

// Large negative stand-in reported when the sampled infimum diverges downward.
inline constexpr double kDivergedK = -1e15;

struct SemiconvexityResult {
  double K = 0.0;
  CertificationMode mode = CertificationMode::Sampled;
  bool diverged = false;
};

// Infimum over probed pairs of
//   -(|sigma(x)-sigma(y)|_HS^2 + 2 <b(x)-b(y), x-y>) / |x-y|^2,
// closed form for analytic families. A sampled value is an upper bound on the
// true constant and is flagged as such.
SemiconvexityResult semiconvexity_K(const DiffusionSpec& spec, const SamplingPlan& plan);

// Per-radius curvature profile kappa(r) over the given increasing grid of
// radii; analytic families bypass sampling.
CurvatureReport kappa_profile(const DiffusionSpec& spec, const std::vector<double>& radii,
                              const SamplingPlan& plan);

struct HphiCertificate {
  bool holds = false;
  double min_ratio = 0.0;
  long violations = 0;
};

// Certifies <grad U(x)-grad U(y), x-y> >= K |x-y|^{2 beta} over probed pairs;
// min_ratio is the probed infimum of the left side over |x-y|^{2 beta}.
HphiCertificate certify_Hphi(const PotentialSpec& pot, double beta, double K,
                             const SamplingPlan& plan);

// ---------------------------------------------------------------------------
// Config-facing registry
// ---------------------------------------------------------------------------

// Potential families by config name ("zero", "quadratic", "power",
// "perturbed_convex", "double_well", "custom_poly").
std::vector<std::string> potential_family_names();
PotentialSpec make_potential(const std::string& family, int d,
                             const std::map<std::string, double>& params,
                             const std::vector<std::pair<std::vector<int>, double>>& poly = {});

}  // namespace sld::model
