#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sld/common.hpp"
#include "sld/constants.hpp"
#include "sld/model.hpp"

namespace sld::sde {

struct IntegratorConfig {
  double h = 1e-3;              // step size
  double T = 1.0;               // horizon
  uint64_t seed = 0;
  size_t n_paths = 1;
  double merge_threshold = -1;  // < 0 selects the default sqrt(h)
  int workers = 1;

  double effective_merge_threshold() const;
  long n_steps() const;
  void validate() const;
};

// Observation times snapped to the step grid; the snap is recorded, not silent.
struct ObserveGrid {
  std::vector<double> requested;
  std::vector<long> steps;
  std::vector<double> snapped;
  bool any_snapped = false;
};

ObserveGrid snap_times(const std::vector<double>& times, double h, long n_steps);

struct TrajectoryBatch {
  int d = 1;
  ObserveGrid grid;
  // data[k][i*d + c]: observation k, path i, coordinate c.
  std::vector<std::vector<double>> data;
  std::vector<uint8_t> blown;
  uint64_t seed = 0;
  double h = 0.0;
  size_t n_paths() const { return blown.size(); }
  size_t blown_count() const;
};

enum class CouplingScheme { Synchronous, Reflection, ReflectionGeneral, Independent };
std::string to_string(CouplingScheme s);

struct CoupledBatch {
  int d = 1;
  ObserveGrid grid;
  std::vector<std::vector<double>> X, Y;  // layout as TrajectoryBatch::data
  std::vector<double> coupling_time;      // kNotCoupled until merged
  std::vector<uint8_t> blown;
  CouplingScheme scheme = CouplingScheme::Synchronous;
  double merge_threshold = 0.0;
  bool positivity_ok = true;  // general sigma: (2/N_inv) - Lambda > 0 on the probe set
  std::optional<constants::GeneralSigmaBounds> sigma_bounds;
  uint64_t seed = 0;
  double h = 0.0;
  size_t n_pairs() const { return coupling_time.size(); }
};

struct ParticleCloud {
  int d = 1;
  double t = 0.0;
  std::vector<double> pts;  // n*d row-major
  size_t size() const { return d > 0 ? pts.size() / d : 0; }
};

struct PairedClouds {
  std::vector<ParticleCloud> first, second;
  std::vector<uint8_t> blown_first, blown_second;
};

// Initial condition: writes the starting point of path `index` given the
// init-domain seed (deterministic; samplers own their randomness).
using InitSampler = std::function<void(uint64_t seed, size_t index, std::span<double> out)>;

InitSampler dirac(const std::vector<double>& x);
InitSampler gaussian_init(const std::vector<double>& mean, double sd);

// Euler-Maruyama batch simulation; deterministic given (seed, N, h),
// independent of the worker count. Any coordinate beyond the divergence
// sentinel freezes the path and flags it.
TrajectoryBatch simulate(const model::DiffusionSpec& spec, const InitSampler& init,
                         const IntegratorConfig& cfg, const std::vector<double>& observe);

// Same-noise pair integration from two starts.
CoupledBatch couple_synchronous(const model::DiffusionSpec& spec, const std::vector<double>& x0,
                                const std::vector<double>& y0, const IntegratorConfig& cfg,
                                const std::vector<double>& observe);

// Mirror coupling for sigma = Id: the second path sees increments reflected
// across the hyperplane orthogonal to the difference direction; pairs merge
// once the distance falls below the threshold and are glued bitwise after.
CoupledBatch couple_reflection(const model::DiffusionSpec& spec, const std::vector<double>& x0,
                               const std::vector<double>& y0, const IntegratorConfig& cfg,
                               const std::vector<double>& observe);

// Mirror coupling for invertible sigma: Y advances with sigma(Y) H xi where
// H = Id - 2 u u* and u is the normalized sigma^{-1}(Y)(X - Y).
CoupledBatch couple_reflection_general(const model::DiffusionSpec& spec,
                                       const std::vector<double>& x0,
                                       const std::vector<double>& y0,
                                       const IntegratorConfig& cfg,
                                       const std::vector<double>& observe);

// Independent drivers from two starts (no merging): baseline scheme.
CoupledBatch couple_independent(const model::DiffusionSpec& spec, const std::vector<double>& x0,
                                const std::vector<double>& y0, const IntegratorConfig& cfg,
                                const std::vector<double>& observe);

// Interacting-particle system; all particles advance together per step.
std::vector<ParticleCloud> simulate_mckean(const model::McKeanSpec& mv, const InitSampler& init,
                                           const IntegratorConfig& cfg,
                                           const std::vector<double>& observe);

// Two clouds with synchronously coupled drivers (same increment per particle
// index) from two initial samplers.
PairedClouds simulate_mckean_paired(const model::McKeanSpec& mv, const InitSampler& init1,
                                    const InitSampler& init2, const IntegratorConfig& cfg,
                                    const std::vector<double>& observe);

// Entry point for time-dependent coefficients; coefficients are evaluated at
// the left grid time. Constant-in-time specs reproduce simulate bitwise.
TrajectoryBatch simulate_nonhomogeneous(const model::DiffusionSpec& spec,
                                        const InitSampler& init, const IntegratorConfig& cfg,
                                        const std::vector<double>& observe);

// Probes sup |sigma u|^2, sup |sigma^{-1} u|^2 and the pairwise difference
// bound Lambda over random points; used when metadata does not declare them.
constants::GeneralSigmaBounds probe_sigma_bounds(const model::DiffusionSpec& spec,
                                                 int n_probes, double scale, uint64_t seed);

}  // namespace sld::sde
