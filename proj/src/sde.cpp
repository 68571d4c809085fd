#include "sld/sde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sld/parallel.hpp"
#include "sld/rng.hpp"

namespace sld::sde {
namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sorted (step, observation index) pairs so paths record in one forward pass.
std::vector<std::pair<long, size_t>> observation_order(const ObserveGrid& grid) {
  std::vector<std::pair<long, size_t>> obs(grid.steps.size());
  for (size_t k = 0; k < grid.steps.size(); ++k) obs[k] = {grid.steps[k], k};
  std::sort(obs.begin(), obs.end());
  return obs;
}

bool finite_in_bounds(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > kBlowupSentinel) return false;
  return true;
}

// One Euler-Maruyama step into xnew; false signals divergence (xnew invalid).
// A non-finite drift value is treated as divergence of the path as well.
bool em_step(const model::DiffusionSpec& spec, double t, double h, double sqh,
             std::span<const double> x, std::span<const double> xi,
             std::span<double> bbuf, std::span<double> smat, std::span<double> xnew) {
  const int d = spec.d;
  spec.b(t, x, bbuf);
  switch (spec.sigma_kind) {
    case SigmaKind::Identity:
      for (int c = 0; c < d; ++c) xnew[c] = x[c] + h * bbuf[c] + sqh * xi[c];
      break;
    case SigmaKind::Diagonal:
      for (int c = 0; c < d; ++c)
        xnew[c] = x[c] + h * bbuf[c] + sqh * spec.sigma_diag[c] * xi[c];
      break;
    case SigmaKind::Constant:
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += spec.sigma_const[static_cast<size_t>(c) * d + j] * xi[j];
        xnew[c] = x[c] + h * bbuf[c] + sqh * acc;
      }
      break;
    case SigmaKind::General:
      spec.eval_sigma(t, x, smat);
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += smat[static_cast<size_t>(c) * d + j] * xi[j];
        xnew[c] = x[c] + h * bbuf[c] + sqh * acc;
      }
      break;
  }
  return finite_in_bounds(xnew);
}

}  // namespace

double IntegratorConfig::effective_merge_threshold() const {
  return merge_threshold < 0.0 ? std::sqrt(h) : merge_threshold;
}

long IntegratorConfig::n_steps() const {
  return std::max<long>(1, std::lround(T / h));
}

void IntegratorConfig::validate() const {
  require(h > 0.0, "integrator: step h must be positive");
  require(T >= h, "integrator: horizon T must be at least one step");
  require(n_paths >= 1, "integrator: need at least one path");
}

ObserveGrid snap_times(const std::vector<double>& times, double h, long n_steps) {
  ObserveGrid g;
  g.requested = times;
  for (double t : times) {
    require(t >= 0.0 && t <= n_steps * h * (1.0 + 1e-12) + 1e-12,
            "observe time outside [0, T]");
    long s = std::lround(t / h);
    s = std::clamp<long>(s, 0, n_steps);
    g.steps.push_back(s);
    g.snapped.push_back(s * h);
    if (std::abs(s * h - t) > 1e-12 * std::max(1.0, std::abs(t))) g.any_snapped = true;
  }
  return g;
}

size_t TrajectoryBatch::blown_count() const {
  size_t n = 0;
  for (auto b : blown) n += b;
  return n;
}

std::string to_string(CouplingScheme s) {
  switch (s) {
    case CouplingScheme::Synchronous: return "synchronous";
    case CouplingScheme::Reflection: return "reflection";
    case CouplingScheme::ReflectionGeneral: return "reflection-general";
    case CouplingScheme::Independent: return "independent";
  }
  return "?";
}

InitSampler dirac(const std::vector<double>& x) {
  return [x](uint64_t, size_t, std::span<double> out) {
    require(out.size() == x.size(), "dirac init: dimension mismatch");
    std::copy(x.begin(), x.end(), out.begin());
  };
}

InitSampler gaussian_init(const std::vector<double>& mean, double sd) {
  require(sd >= 0.0, "gaussian init: sd must be nonnegative");
  return [mean, sd](uint64_t seed, size_t index, std::span<double> out) {
    require(out.size() == mean.size(), "gaussian init: dimension mismatch");
    for (size_t c = 0; c < out.size(); ++c)
      out[c] = mean[c] + sd * rng::normal(seed, index, c);
  };
}

TrajectoryBatch simulate(const model::DiffusionSpec& spec, const InitSampler& init,
                         const IntegratorConfig& cfg, const std::vector<double>& observe) {
  cfg.validate();
  require(static_cast<bool>(spec.b), "simulate: drift not set");
  const int d = spec.d;
  const long steps = cfg.n_steps();
  const double sqh = std::sqrt(cfg.h);

  TrajectoryBatch out;
  out.d = d;
  out.grid = snap_times(observe, cfg.h, steps);
  out.seed = cfg.seed;
  out.h = cfg.h;
  out.data.assign(observe.size(), std::vector<double>(cfg.n_paths * d));
  out.blown.assign(cfg.n_paths, 0);
  const auto obs = observation_order(out.grid);

  const uint64_t iseed = rng::salted(cfg.seed, rng::kSaltIntegrator);
  const uint64_t initseed = rng::salted(cfg.seed, rng::kSaltInit);
  const size_t dd = static_cast<size_t>(d) * d;

  par::parallel_for(cfg.n_paths, cfg.workers, [&](size_t i) {
    std::vector<double> x(d), xnew(d), bbuf(d), xi(d), smat(dd);
    init(initseed, i, x);
    require(finite_in_bounds(x), "simulate: initial point out of bounds");
    size_t oi = 0;
    auto record = [&](long s) {
      while (oi < obs.size() && obs[oi].first == s) {
        std::copy(x.begin(), x.end(), out.data[obs[oi].second].begin() + i * d);
        ++oi;
      }
    };
    record(0);
    bool dead = false;
    for (long k = 1; k <= steps; ++k) {
      if (!dead) {
        const double t = (k - 1) * cfg.h;
        for (int c = 0; c < d; ++c)
          xi[c] = rng::normal(iseed, i, static_cast<uint64_t>(k - 1) * d + c);
        if (em_step(spec, t, cfg.h, sqh, x, xi, bbuf, smat, xnew)) {
          std::swap(x, xnew);
        } else {
          dead = true;
          out.blown[i] = 1;
        }
      }
      record(k);
    }
  });
  return out;
}

TrajectoryBatch simulate_nonhomogeneous(const model::DiffusionSpec& spec,
                                        const InitSampler& init, const IntegratorConfig& cfg,
                                        const std::vector<double>& observe) {
  return simulate(spec, init, cfg, observe);
}

namespace {

CoupledBatch run_couple(const model::DiffusionSpec& spec, const std::vector<double>& x0,
                        const std::vector<double>& y0, const IntegratorConfig& cfg,
                        const std::vector<double>& observe, CouplingScheme scheme) {
  cfg.validate();
  require(static_cast<bool>(spec.b), "couple: drift not set");
  const int d = spec.d;
  require(static_cast<int>(x0.size()) == d && static_cast<int>(y0.size()) == d,
          "couple: start point dimension mismatch");
  const bool merging =
      scheme == CouplingScheme::Reflection || scheme == CouplingScheme::ReflectionGeneral;
  if (merging) {
    require(x0 != y0, "couple: reflection needs distinct start points");
  }
  if (scheme == CouplingScheme::Reflection)
    require(spec.sigma_kind == SigmaKind::Identity,
            "couple_reflection: sigma must be the identity (use the general variant)");

  const long steps = cfg.n_steps();
  const double sqh = std::sqrt(cfg.h);
  const double thr = cfg.effective_merge_threshold();

  CoupledBatch out;
  out.d = d;
  out.grid = snap_times(observe, cfg.h, steps);
  out.scheme = scheme;
  out.merge_threshold = merging ? thr : 0.0;
  out.seed = cfg.seed;
  out.h = cfg.h;
  out.X.assign(observe.size(), std::vector<double>(cfg.n_paths * d));
  out.Y.assign(observe.size(), std::vector<double>(cfg.n_paths * d));
  out.coupling_time.assign(cfg.n_paths, kNotCoupled);
  out.blown.assign(cfg.n_paths, 0);
  const auto obs = observation_order(out.grid);

  if (scheme == CouplingScheme::ReflectionGeneral) {
    constants::GeneralSigmaBounds gb;
    if (spec.meta.M && spec.meta.N_inv && spec.meta.Lambda) {
      gb.M = *spec.meta.M;
      gb.N_inv = *spec.meta.N_inv;
      gb.Lambda = *spec.meta.Lambda;
    } else {
      gb = probe_sigma_bounds(spec, 64, 3.0, cfg.seed);
    }
    out.sigma_bounds = gb;
    out.positivity_ok = (2.0 / gb.N_inv - gb.Lambda) > 0.0;
  }

  const uint64_t iseed = rng::salted(cfg.seed, rng::kSaltIntegrator);
  const size_t dd = static_cast<size_t>(d) * d;

  par::parallel_for(cfg.n_paths, cfg.workers, [&](size_t i) {
    std::vector<double> x = x0, y = y0;
    std::vector<double> xn(d), yn(d), bbuf(d), xi(d), eta(d), smat(dd), u(d);
    bool coupled = false, dead = false;
    size_t oi = 0;
    auto record = [&](long s) {
      while (oi < obs.size() && obs[oi].first == s) {
        std::copy(x.begin(), x.end(), out.X[obs[oi].second].begin() + i * d);
        std::copy(y.begin(), y.end(), out.Y[obs[oi].second].begin() + i * d);
        ++oi;
      }
    };
    auto try_merge = [&](long s) {
      if (coupled || dead) return;
      if (merging) {
        double r2 = 0.0;
        for (int c = 0; c < d; ++c) r2 += (x[c] - y[c]) * (x[c] - y[c]);
        if (std::sqrt(r2) <= thr) {
          coupled = true;
          out.coupling_time[i] = s * cfg.h;
          y = x;  // glued bitwise from now on
        }
      } else if (scheme == CouplingScheme::Synchronous && x == y) {
        coupled = true;
        out.coupling_time[i] = s * cfg.h;
      }
    };
    try_merge(0);
    record(0);
    for (long k = 1; k <= steps; ++k) {
      if (!dead) {
        const double t = (k - 1) * cfg.h;
        const uint64_t ctr = static_cast<uint64_t>(k - 1) * d;
        for (int c = 0; c < d; ++c) xi[c] = rng::normal(iseed, i, ctr + c);
        bool okx = em_step(spec, t, cfg.h, sqh, x, xi, bbuf, smat, xn);
        bool oky = true;
        if (coupled && merging) {
          yn = xn;
        } else {
          switch (scheme) {
            case CouplingScheme::Synchronous:
              oky = em_step(spec, t, cfg.h, sqh, y, xi, bbuf, smat, yn);
              break;
            case CouplingScheme::Independent:
              for (int c = 0; c < d; ++c)
                eta[c] = rng::normal(iseed, cfg.n_paths + i, ctr + c);
              oky = em_step(spec, t, cfg.h, sqh, y, eta, bbuf, smat, yn);
              break;
            case CouplingScheme::Reflection: {
              double dot = 0.0, r2 = 0.0;
              for (int c = 0; c < d; ++c) {
                u[c] = x[c] - y[c];
                r2 += u[c] * u[c];
              }
              const double inv = 1.0 / std::sqrt(r2);
              for (int c = 0; c < d; ++c) {
                u[c] *= inv;
                dot += u[c] * xi[c];
              }
              for (int c = 0; c < d; ++c) eta[c] = xi[c] - 2.0 * dot * u[c];
              oky = em_step(spec, t, cfg.h, sqh, y, eta, bbuf, smat, yn);
              break;
            }
            case CouplingScheme::ReflectionGeneral: {
              spec.eval_sigma(t, y, smat);
              Eigen::Map<const RowMat> S(smat.data(), d, d);
              Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
              require(lu.rcond() > 1e-8, "couple_reflection_general: sigma numerically singular");
              Eigen::VectorXd diff(d);
              for (int c = 0; c < d; ++c) diff[c] = x[c] - y[c];
              Eigen::VectorXd u0 = lu.solve(diff);
              const double n0 = u0.norm();
              require(n0 > 0.0, "couple_reflection_general: degenerate direction");
              u0 /= n0;
              double dot = 0.0;
              for (int c = 0; c < d; ++c) dot += u0[c] * xi[c];
              for (int c = 0; c < d; ++c) eta[c] = xi[c] - 2.0 * dot * u0[c];
              oky = em_step(spec, t, cfg.h, sqh, y, eta, bbuf, smat, yn);
              break;
            }
          }
        }
        if (okx && oky) {
          std::swap(x, xn);
          std::swap(y, yn);
          try_merge(k);
        } else {
          dead = true;
          out.blown[i] = 1;
        }
      }
      record(k);
    }
  });
  return out;
}

}  // namespace

CoupledBatch couple_synchronous(const model::DiffusionSpec& spec, const std::vector<double>& x0,
                                const std::vector<double>& y0, const IntegratorConfig& cfg,
                                const std::vector<double>& observe) {
  return run_couple(spec, x0, y0, cfg, observe, CouplingScheme::Synchronous);
}

CoupledBatch couple_reflection(const model::DiffusionSpec& spec, const std::vector<double>& x0,
                               const std::vector<double>& y0, const IntegratorConfig& cfg,
                               const std::vector<double>& observe) {
  return run_couple(spec, x0, y0, cfg, observe, CouplingScheme::Reflection);
}

CoupledBatch couple_reflection_general(const model::DiffusionSpec& spec,
                                       const std::vector<double>& x0,
                                       const std::vector<double>& y0,
                                       const IntegratorConfig& cfg,
                                       const std::vector<double>& observe) {
  return run_couple(spec, x0, y0, cfg, observe, CouplingScheme::ReflectionGeneral);
}

CoupledBatch couple_independent(const model::DiffusionSpec& spec, const std::vector<double>& x0,
                                const std::vector<double>& y0, const IntegratorConfig& cfg,
                                const std::vector<double>& observe) {
  return run_couple(spec, x0, y0, cfg, observe, CouplingScheme::Independent);
}

namespace {

std::vector<ParticleCloud> run_mckean_single(const model::McKeanSpec& mv,
                                             const InitSampler& init, uint64_t init_salt,
                                             const IntegratorConfig& cfg,
                                             const std::vector<double>& observe,
                                             std::vector<uint8_t>& blown_out) {
  cfg.validate();
  require(cfg.n_paths >= 2, "mckean: need at least two particles");
  const int d = mv.d;
  const size_t n = cfg.n_paths;
  const long steps = cfg.n_steps();
  const double sqh = std::sqrt(cfg.h);
  const auto grid = snap_times(observe, cfg.h, steps);
  const auto obs = observation_order(grid);

  std::vector<ParticleCloud> out(observe.size());
  for (size_t k = 0; k < observe.size(); ++k) {
    out[k].d = d;
    out[k].t = grid.snapped[k];
    out[k].pts.assign(n * d, 0.0);
  }

  const uint64_t iseed = rng::salted(cfg.seed, rng::kSaltIntegrator);
  const uint64_t initseed = rng::salted(cfg.seed, init_salt);
  std::vector<double> cur(n * d), nxt(n * d);
  blown_out.assign(n, 0);

  for (size_t i = 0; i < n; ++i) {
    init(initseed, i, std::span<double>(cur.data() + i * d, d));
    require(finite_in_bounds(std::span<const double>(cur.data() + i * d, d)),
            "mckean: initial particle out of bounds");
  }

  size_t oi = 0;
  auto record = [&](long s) {
    while (oi < obs.size() && obs[oi].first == s) {
      out[obs[oi].second].pts = cur;
      ++oi;
    }
  };
  record(0);
  for (long k = 1; k <= steps; ++k) {
    par::parallel_for(n, cfg.workers, [&](size_t i) {
      double* dst = nxt.data() + i * d;
      const double* src = cur.data() + i * d;
      if (blown_out[i]) {
        std::copy(src, src + d, dst);
        return;
      }
      thread_local std::vector<double> bbuf;
      bbuf.resize(d);
      mv.particle_drift(cur, n, i, bbuf);
      const uint64_t ctr = static_cast<uint64_t>(k - 1) * d;
      bool ok = true;
      for (int c = 0; c < d; ++c) {
        const double xi = rng::normal(iseed, i, ctr + c);
        dst[c] = src[c] + cfg.h * bbuf[c] + sqh * xi;
        if (!std::isfinite(dst[c]) || std::abs(dst[c]) > kBlowupSentinel) ok = false;
      }
      if (!ok) {
        blown_out[i] = 1;
        std::copy(src, src + d, dst);
      }
    });
    std::swap(cur, nxt);
    record(k);
  }
  return out;
}

}  // namespace

std::vector<ParticleCloud> simulate_mckean(const model::McKeanSpec& mv, const InitSampler& init,
                                           const IntegratorConfig& cfg,
                                           const std::vector<double>& observe) {
  std::vector<uint8_t> blown;
  return run_mckean_single(mv, init, rng::kSaltInit, cfg, observe, blown);
}

PairedClouds simulate_mckean_paired(const model::McKeanSpec& mv, const InitSampler& init1,
                                    const InitSampler& init2, const IntegratorConfig& cfg,
                                    const std::vector<double>& observe) {
  PairedClouds pc;
  pc.first = run_mckean_single(mv, init1, rng::kSaltInit, cfg, observe, pc.blown_first);
  pc.second = run_mckean_single(mv, init2, rng::kSaltInit2, cfg, observe, pc.blown_second);
  return pc;
}

constants::GeneralSigmaBounds probe_sigma_bounds(const model::DiffusionSpec& spec,
                                                 int n_probes, double scale, uint64_t seed) {
  const int d = spec.d;
  const size_t dd = static_cast<size_t>(d) * d;
  const uint64_t s = rng::salted(seed, rng::kSaltProbe ^ 0x5ba5ULL);
  std::vector<double> smat(dd), prev(dd);
  constants::GeneralSigmaBounds gb;
  gb.M = 0.0;
  gb.N_inv = 0.0;
  gb.Lambda = 0.0;
  std::vector<double> x(d);
  for (int k = 0; k < n_probes; ++k) {
    for (int c = 0; c < d; ++c) x[c] = scale * (2.0 * rng::u01(s, k, c) - 1.0);
    spec.eval_sigma(0.0, x, smat);
    Eigen::Map<const RowMat> S(smat.data(), d, d);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(d - 1);
    require(smin > 0.0, "probe_sigma_bounds: singular sigma at a probe point");
    gb.M = std::max(gb.M, smax * smax);
    gb.N_inv = std::max(gb.N_inv, 1.0 / (smin * smin));
    if (k > 0) {
      Eigen::Map<const RowMat> P(prev.data(), d, d);
      Eigen::JacobiSVD<Eigen::MatrixXd> dsvd(S - P);
      const double dmax = dsvd.singularValues()(0);
      gb.Lambda = std::max(gb.Lambda, dmax * dmax);
    }
    prev = smat;
  }
  return gb;
}

}  // namespace sld::sde
