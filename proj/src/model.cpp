#include "sld/model.hpp"

#include <algorithm>
#include <cmath>

#include "sld/constants.hpp"
#include "sld/rng.hpp"

namespace sld::model {
namespace {

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double sqnorm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

std::string to_string(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::Zero: return "zero";
    case PotentialFamily::Quadratic: return "quadratic";
    case PotentialFamily::Power: return "power";
    case PotentialFamily::PerturbedConvex: return "perturbed_convex";
    case PotentialFamily::DoubleWell: return "double_well";
    case PotentialFamily::CustomPoly: return "custom_poly";
  }
  return "?";
}

double PotentialSpec::U(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == d, "potential: point dimension mismatch");
  switch (family) {
    case PotentialFamily::Zero:
      return 0.0;
    case PotentialFamily::Quadratic:
      return lambda * sqnorm(x);
    case PotentialFamily::Power:
      return std::pow(sqnorm(x), beta);
    case PotentialFamily::PerturbedConvex:
      return 0.5 * K1 * sqnorm(x) + 0.5 * M * (x[0] - std::cos(x[0]));
    case PotentialFamily::DoubleWell: {
      const double u = x[0];
      return 0.25 * u * u * u * u - 0.5 * u * u;
    }
    case PotentialFamily::CustomPoly: {
      double acc = 0.0;
      for (const auto& [alpha, coeff] : poly) {
        double term = coeff;
        for (int i = 0; i < d; ++i) term *= pow_int(x[i], alpha[i]);
        acc += term;
      }
      return acc;
    }
  }
  return 0.0;
}

void PotentialSpec::grad(std::span<const double> x, std::span<double> out) const {
  require(static_cast<int>(x.size()) == d && out.size() == x.size(),
          "potential: gradient buffer mismatch");
  switch (family) {
    case PotentialFamily::Zero:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case PotentialFamily::Quadratic:
      for (int i = 0; i < d; ++i) out[i] = 2.0 * lambda * x[i];
      return;
    case PotentialFamily::Power: {
      const double r2 = sqnorm(x);
      const double f = (r2 == 0.0) ? 0.0 : 2.0 * beta * std::pow(r2, beta - 1.0);
      for (int i = 0; i < d; ++i) out[i] = f * x[i];
      return;
    }
    case PotentialFamily::PerturbedConvex:
      for (int i = 0; i < d; ++i) out[i] = K1 * x[i];
      out[0] += 0.5 * M * (1.0 + std::sin(x[0]));
      return;
    case PotentialFamily::DoubleWell:
      std::fill(out.begin(), out.end(), 0.0);
      out[0] = x[0] * x[0] * x[0] - x[0];
      return;
    case PotentialFamily::CustomPoly: {
      std::fill(out.begin(), out.end(), 0.0);
      for (const auto& [alpha, coeff] : poly) {
        for (int j = 0; j < d; ++j) {
          if (alpha[j] == 0) continue;
          double term = coeff * alpha[j] * pow_int(x[j], alpha[j] - 1);
          for (int i = 0; i < d; ++i)
            if (i != j) term *= pow_int(x[i], alpha[i]);
          out[j] += term;
        }
      }
      return;
    }
  }
}

std::optional<double> PotentialSpec::analytic_semiconvexity() const {
  switch (family) {
    case PotentialFamily::Zero:
      return 0.0;
    case PotentialFamily::Quadratic:
      return 2.0 * lambda;
    case PotentialFamily::Power:
      return beta > 1.0 ? 0.0 : 2.0;
    default:
      return std::nullopt;
  }
}

PotentialSpec zero_potential(int d) {
  require(d >= 1, "potential: d must be positive");
  PotentialSpec p;
  p.d = d;
  p.family = PotentialFamily::Zero;
  return p;
}

PotentialSpec quadratic(int d, double lambda) {
  require(d >= 1, "potential: d must be positive");
  PotentialSpec p;
  p.d = d;
  p.family = PotentialFamily::Quadratic;
  p.lambda = lambda;
  return p;
}

PotentialSpec power(int d, double beta) {
  require(d >= 1, "potential: d must be positive");
  require(beta >= 1.0, "power potential: beta must be >= 1");
  PotentialSpec p;
  p.d = d;
  p.family = PotentialFamily::Power;
  p.beta = beta;
  return p;
}

PotentialSpec perturbed_convex(int d, double K, double M) {
  require(d >= 1, "potential: d must be positive");
  require(K > 0.0 && M >= 0.0, "perturbed_convex: needs K > 0, M >= 0");
  PotentialSpec p;
  p.d = d;
  p.family = PotentialFamily::PerturbedConvex;
  p.K1 = K;
  p.M = M;
  return p;
}

PotentialSpec double_well() {
  PotentialSpec p;
  p.d = 1;
  p.family = PotentialFamily::DoubleWell;
  return p;
}

PotentialSpec custom_poly(int d, std::vector<std::pair<std::vector<int>, double>> terms) {
  require(d >= 1, "potential: d must be positive");
  for (const auto& [alpha, coeff] : terms) {
    require(static_cast<int>(alpha.size()) == d, "custom_poly: multi-index length != d");
    for (int a : alpha) require(a >= 0, "custom_poly: negative exponent");
    (void)coeff;
  }
  PotentialSpec p;
  p.d = d;
  p.family = PotentialFamily::CustomPoly;
  p.poly = std::move(terms);
  return p;
}

double gradient_consistency(const PotentialSpec& pot, int n_points, uint64_t seed) {
  const uint64_t s = rng::salted(seed, rng::kSaltProbe);
  std::vector<double> x(pot.d), g(pot.d), xp(pot.d);
  double worst = 0.0;
  for (int k = 0; k < n_points; ++k) {
    for (int i = 0; i < pot.d; ++i) x[i] = 4.0 * rng::u01(s, k, i) - 2.0;
    pot.grad(x, g);
    for (int j = 0; j < pot.d; ++j) {
      const double h = 1e-5 * (1.0 + std::abs(x[j]));
      xp = x;
      xp[j] = x[j] + h;
      const double up = pot.U(xp);
      xp[j] = x[j] - h;
      const double um = pot.U(xp);
      const double fd = (up - um) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / (1.0 + std::abs(g[j])));
    }
  }
  return worst;
}

void DiffusionSpec::eval_sigma(double t, std::span<const double> x, std::span<double> out) const {
  const size_t dd = static_cast<size_t>(d) * d;
  require(out.size() == dd, "sigma: output buffer must be d*d");
  switch (sigma_kind) {
    case SigmaKind::Identity:
      std::fill(out.begin(), out.end(), 0.0);
      for (int i = 0; i < d; ++i) out[static_cast<size_t>(i) * d + i] = 1.0;
      return;
    case SigmaKind::Diagonal:
      std::fill(out.begin(), out.end(), 0.0);
      for (int i = 0; i < d; ++i) out[static_cast<size_t>(i) * d + i] = sigma_diag[i];
      return;
    case SigmaKind::Constant:
      std::copy(sigma_const.begin(), sigma_const.end(), out.begin());
      return;
    case SigmaKind::General:
      require(static_cast<bool>(sigma), "sigma: general kind needs a callback");
      sigma(t, x, out);
      return;
  }
}

DiffusionSpec langevin(const PotentialSpec& pot) {
  DiffusionSpec s;
  s.d = pot.d;
  s.b = [pot](double, std::span<const double> x, std::span<double> out) {
    pot.grad(x, out);
    for (auto& v : out) v = -0.5 * v;
  };
  s.sigma_kind = SigmaKind::Identity;
  s.name = "langevin(" + to_string(pot.family) + ")";
  s.meta.K = pot.analytic_semiconvexity();
  s.meta.M = 1.0;
  if (pot.family == PotentialFamily::Power) s.meta.beta = pot.beta;
  s.potential = pot;
  return s;
}

DiffusionSpec brownian(int d) {
  DiffusionSpec s;
  s.d = d;
  s.b = [](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  s.sigma_kind = SigmaKind::Identity;
  s.name = "brownian";
  s.meta.K = 0.0;
  s.meta.M = 1.0;
  s.potential = zero_potential(d);
  return s;
}

DiffusionSpec builtin_kinetic(const PotentialSpec& V) {
  const int dx = V.d;
  DiffusionSpec s;
  s.d = 2 * dx;
  s.b = [V, dx](double, std::span<const double> z, std::span<double> out) {
    thread_local std::vector<double> g;
    g.resize(dx);
    V.grad(z.subspan(0, dx), g);
    for (int i = 0; i < dx; ++i) {
      out[i] = z[dx + i];
      out[dx + i] = -g[i] - z[dx + i];
    }
  };
  s.sigma_kind = SigmaKind::Diagonal;
  s.sigma_diag.assign(static_cast<size_t>(2) * dx, 0.0);
  for (int i = 0; i < dx; ++i) s.sigma_diag[dx + i] = 1.0;
  s.name = "kinetic(" + to_string(V.family) + ")";
  s.meta.M = 1.0;
  s.potential = V;
  return s;
}

void McKeanSpec::particle_drift(std::span<const double> cloud, size_t n, size_t i,
                                std::span<double> out) const {
  thread_local std::vector<double> g, diff;
  g.resize(d);
  diff.resize(d);
  const double* xi = cloud.data() + i * d;
  V.grad(std::span<const double>(xi, d), out);
  for (auto& v : out) v = -0.5 * v;
  const double w = -0.5 / static_cast<double>(n);
  for (size_t j = 0; j < n; ++j) {
    const double* xj = cloud.data() + j * d;
    for (int c = 0; c < d; ++c) diff[c] = xi[c] - xj[c];
    W.grad(diff, g);
    for (int c = 0; c < d; ++c) out[c] += w * g[c];
  }
}

McKeanSpec builtin_mckean(const PotentialSpec& V, const PotentialSpec& W) {
  require(V.d == W.d, "mckean: V and W dimensions differ");
  // Evenness probe for W.
  const uint64_t s = rng::salted(0x6d636bULL, rng::kSaltProbe);
  std::vector<double> x(W.d), mx(W.d);
  for (int k = 0; k < 32; ++k) {
    for (int i = 0; i < W.d; ++i) {
      x[i] = 4.0 * rng::u01(s, k, i) - 2.0;
      mx[i] = -x[i];
    }
    const double wx = W.U(x), wmx = W.U(mx);
    require(std::abs(wx - wmx) <= 1e-8 * (1.0 + std::abs(wx)),
            "mckean: interaction potential W must be even");
  }
  McKeanSpec m;
  m.d = V.d;
  m.V = V;
  m.W = W;
  m.meta.K_V = V.analytic_semiconvexity();
  m.meta.K_W = W.analytic_semiconvexity();
  m.name = "mckean(" + to_string(V.family) + "," + to_string(W.family) + ")";
  return m;
}

// ---------------------------------------------------------------------------
// Curvature certification
// ---------------------------------------------------------------------------

namespace {

// -(|sigma(x)-sigma(y)|_HS^2 + 2 <b(x)-b(y), x-y>) / |x-y|^2 at t = 0.
struct RatioEval {
  const DiffusionSpec& spec;
  mutable std::vector<double> bx, by, sx, sy;

  explicit RatioEval(const DiffusionSpec& s)
      : spec(s), bx(s.d), by(s.d), sx(), sy() {
    if (s.sigma_kind == SigmaKind::General) {
      sx.resize(static_cast<size_t>(s.d) * s.d);
      sy.resize(static_cast<size_t>(s.d) * s.d);
    }
  }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    spec.b(0.0, x, bx);
    spec.b(0.0, y, by);
    double dot = 0.0, r2 = 0.0;
    for (int i = 0; i < spec.d; ++i) {
      const double dxy = x[i] - y[i];
      dot += (bx[i] - by[i]) * dxy;
      r2 += dxy * dxy;
    }
    double hs2 = 0.0;
    if (spec.sigma_kind == SigmaKind::General) {
      spec.eval_sigma(0.0, x, sx);
      spec.eval_sigma(0.0, y, sy);
      for (size_t k = 0; k < sx.size(); ++k) {
        const double dsk = sx[k] - sy[k];
        hs2 += dsk * dsk;
      }
    }
    if (r2 == 0.0) return kInf;
    return -(hs2 + 2.0 * dot) / r2;
  }
};

void sample_direction(uint64_t seed, uint64_t stream, uint64_t ctr_base, int d,
                      std::span<double> u) {
  if (d == 1) {
    u[0] = rng::u01(seed, stream, ctr_base) < 0.5 ? -1.0 : 1.0;
    return;
  }
  double n2 = 0.0;
  for (int i = 0; i < d; ++i) {
    u[i] = rng::normal(seed, stream, ctr_base + i);
    n2 += u[i] * u[i];
  }
  if (n2 < 1e-24) {
    std::fill(u.begin(), u.end(), 0.0);
    u[0] = 1.0;
    return;
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (int i = 0; i < d; ++i) u[i] *= inv;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
  return g;
}

// Pattern-search refinement of the worst unconstrained pair; scale moves let
// homogeneous ratios run toward their limiting infimum.
template <typename F>
double descend_pair(const F& f, std::vector<double>& x, std::vector<double>& y, int steps,
                    bool allow_scale) {
  const int d = static_cast<int>(x.size());
  double best = f(x, y);
  double r = 0.0;
  for (int i = 0; i < d; ++i) r += (x[i] - y[i]) * (x[i] - y[i]);
  double s = 0.5 * std::max(1.0, std::sqrt(r));
  std::vector<double> cx = x, cy = y;
  for (int step = 0; step < steps; ++step) {
    for (int j = 0; j < 2 * d; ++j) {
      auto& v = (j < d) ? cx : cy;
      const int c = j % d;
      const double saved = v[c];
      for (const double delta : {s, -s}) {
        v[c] = saved + delta;
        const double val = f(cx, cy);
        if (val < best) {
          best = val;
          x = cx;
          y = cy;
          goto next_coord;
        }
      }
      v[c] = saved;
      continue;
    next_coord:
      continue;
    }
    if (allow_scale) {
      for (const double c : {0.5, 0.1, 2.0}) {
        std::vector<double> tx = x, ty = y;
        double sep = 0.0;
        for (int i = 0; i < d; ++i) {
          tx[i] *= c;
          ty[i] *= c;
          sep += (tx[i] - ty[i]) * (tx[i] - ty[i]);
        }
        if (sep < 1e-280) continue;
        const double val = f(tx, ty);
        if (val < best) {
          best = val;
          x = tx;
          y = ty;
        }
      }
    }
    cx = x;
    cy = y;
    s *= 0.7;
  }
  return best;
}

}  // namespace

SemiconvexityResult semiconvexity_K(const DiffusionSpec& spec, const SamplingPlan& plan) {
  SemiconvexityResult res;
  if (spec.potential && spec.sigma_kind == SigmaKind::Identity) {
    if (auto k = spec.potential->analytic_semiconvexity()) {
      res.K = *k;
      res.mode = CertificationMode::Analytic;
      return res;
    }
  }
  require(plan.pairs > 0 && plan.radii > 0, "semiconvexity_K: empty sampling plan");
  require(static_cast<bool>(spec.b), "semiconvexity_K: drift not evaluable");

  const int d = spec.d;
  const RatioEval ratio(spec);
  const uint64_t seed = rng::salted(plan.seed, rng::kSaltProbe);
  const auto radii = log_grid(plan.r_min, plan.r_max, plan.radii);
  const long per = std::max<long>(1, plan.pairs / plan.radii);

  double best = kInf;
  std::vector<double> x(d), y(d), u(d), bx(d), by(d);
  uint64_t stream = 0;
  for (double r : radii) {
    for (long k = 0; k < per; ++k, ++stream) {
      for (int i = 0; i < d; ++i) {
        const double c = plan.center_scale * (2.0 * rng::u01(seed, stream, i) - 1.0);
        x[i] = y[i] = c;
      }
      sample_direction(seed, stream, 2 * static_cast<uint64_t>(d), d, u);
      for (int i = 0; i < d; ++i) {
        x[i] += 0.5 * r * u[i];
        y[i] -= 0.5 * r * u[i];
      }
      const double val = ratio(x, y);
      require(std::isfinite(val) || val == kInf, "semiconvexity_K: non-finite drift at probe");
      if (val < best) {
        best = val;
        bx = x;
        by = y;
      }
    }
  }
  if (best < kInf && plan.descent_steps > 0)
    best = descend_pair(ratio, bx, by, plan.descent_steps, /*allow_scale=*/true);
  if (best < -1e12) {
    res.K = kDivergedK;
    res.diverged = true;
    return res;
  }
  res.K = best;
  return res;
}

CurvatureReport kappa_profile(const DiffusionSpec& spec, const std::vector<double>& radii,
                              const SamplingPlan& plan) {
  require(!radii.empty(), "kappa_profile: empty radius grid");
  for (size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, "kappa_profile: radii must be positive");
    if (i) require(radii[i] > radii[i - 1], "kappa_profile: radii must be increasing");
  }
  CurvatureReport rep;
  const int d = spec.d;

  const bool analytic_quadratic =
      spec.potential && spec.sigma_kind == SigmaKind::Identity &&
      (spec.potential->family == PotentialFamily::Quadratic ||
       spec.potential->family == PotentialFamily::Zero ||
       (spec.potential->family == PotentialFamily::Power && spec.potential->beta == 1.0));
  const bool analytic_power1d = spec.potential && spec.sigma_kind == SigmaKind::Identity &&
                                spec.potential->family == PotentialFamily::Power && d == 1 &&
                                spec.potential->beta > 1.0;

  if (analytic_quadratic) {
    const double K = *spec.potential->analytic_semiconvexity();
    for (double r : radii) rep.kappa_profile.emplace_back(r, K);
    rep.certification_mode = CertificationMode::Analytic;
  } else if (analytic_power1d) {
    // In one dimension the infimum at distance r sits at the symmetric pair
    // (r/2, -r/2), giving kappa(r) = K_beta r^{2(beta-1)} exactly.
    const double beta = spec.potential->beta;
    const double kb = constants::superconvex_Kbeta(beta, 1);
    for (double r : radii)
      rep.kappa_profile.emplace_back(r, kb * std::pow(r, 2.0 * (beta - 1.0)));
    rep.Kbeta = {beta, kb};
    rep.certification_mode = CertificationMode::Analytic;
  } else {
    require(static_cast<bool>(spec.b), "kappa_profile: drift not evaluable");
    const RatioEval ratio(spec);
    const uint64_t seed = rng::salted(plan.seed, rng::kSaltProbe ^ 0x6b70ULL);
    const long per = std::max<long>(1, plan.pairs / static_cast<long>(radii.size()));
    uint64_t stream = 0;
    std::vector<double> x(d), y(d), u(d), bc(d), bu(d);
    for (double r : radii) {
      double best = kInf;
      for (long k = 0; k < per; ++k, ++stream) {
        for (int i = 0; i < d; ++i)
          x[i] = y[i] = plan.center_scale * (2.0 * rng::u01(seed, stream, i) - 1.0);
        sample_direction(seed, stream, 2 * static_cast<uint64_t>(d), d, u);
        for (int i = 0; i < d; ++i) {
          x[i] += 0.5 * r * u[i];
          y[i] -= 0.5 * r * u[i];
        }
        const double val = ratio(x, y);
        if (val < best) {
          best = val;
          for (int i = 0; i < d; ++i) bc[i] = 0.5 * (x[i] + y[i]);
          bu = u;
        }
      }
      if (plan.descent_steps > 0 && best < kInf) {
        // Constrained refinement: move the center and rotate the direction,
        // keeping |x - y| = r fixed.
        auto eval = [&](const std::vector<double>& c, const std::vector<double>& e) {
          for (int i = 0; i < d; ++i) {
            x[i] = c[i] + 0.5 * r * e[i];
            y[i] = c[i] - 0.5 * r * e[i];
          }
          return ratio(x, y);
        };
        double s = 0.5 * std::max(1.0, r);
        double theta = 0.5;
        for (int step = 0; step < plan.descent_steps; ++step) {
          for (int c = 0; c < d; ++c) {
            const double saved = bc[c];
            for (const double delta : {s, -s}) {
              bc[c] = saved + delta;
              const double val = eval(bc, bu);
              if (val < best) {
                best = val;
                goto accepted;
              }
            }
            bc[c] = saved;
          accepted:;
          }
          if (d > 1) {
            for (int c = 0; c < d; ++c) {
              for (const double delta : {theta, -theta}) {
                std::vector<double> e = bu;
                e[c] += delta;
                double n2 = 0.0;
                for (double v : e) n2 += v * v;
                if (n2 < 1e-24) continue;
                const double inv = 1.0 / std::sqrt(n2);
                for (double& v : e) v *= inv;
                const double val = eval(bc, e);
                if (val < best) {
                  best = val;
                  bu = e;
                }
              }
            }
          }
          s *= 0.7;
          theta *= 0.7;
        }
      }
      rep.kappa_profile.emplace_back(r, best);
    }
    rep.certification_mode = CertificationMode::Sampled;
    if (spec.potential && spec.potential->family == PotentialFamily::Power)
      rep.Kbeta = {spec.potential->beta,
                   constants::superconvex_Kbeta(spec.potential->beta, d)};
  }

  double kmin = kInf, tail = kInf;
  const size_t n = rep.kappa_profile.size();
  const size_t tail_from = n - std::max<size_t>(1, n / 4);
  for (size_t i = 0; i < n; ++i) {
    kmin = std::min(kmin, rep.kappa_profile[i].second);
    if (i >= tail_from) tail = std::min(tail, rep.kappa_profile[i].second);
  }
  if (kmin < -1e12) {
    rep.K_semiconvexity = kDivergedK;
    rep.diverged = true;
  } else {
    rep.K_semiconvexity = kmin;
  }
  rep.kappa_infinity = tail;
  return rep;
}

HphiCertificate certify_Hphi(const PotentialSpec& pot, double beta, double K,
                             const SamplingPlan& plan) {
  require(beta >= 1.0, "certify_Hphi: beta must be >= 1");
  require(plan.pairs > 0 && plan.radii > 0, "certify_Hphi: empty sampling plan");
  const int d = pot.d;
  // Relative floating-point slack on the certificate threshold: pairs probed
  // arbitrarily close to the equality manifold must not count as violations.
  const double cutoff = K * (1.0 - 1e-12);

  auto ratio = [&](std::span<const double> x, std::span<const double> y) {
    thread_local std::vector<double> gx, gy;
    gx.resize(x.size());
    gy.resize(x.size());
    pot.grad(x, gx);
    pot.grad(y, gy);
    double dot = 0.0, r2 = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double dxy = x[i] - y[i];
      dot += (gx[i] - gy[i]) * dxy;
      r2 += dxy * dxy;
    }
    if (r2 == 0.0) return kInf;
    return dot / std::pow(r2, beta);
  };

  const uint64_t seed = rng::salted(plan.seed, rng::kSaltProbe ^ 0x4870ULL);
  const auto radii = log_grid(plan.r_min, plan.r_max, plan.radii);
  const long per = std::max<long>(1, plan.pairs / plan.radii);

  HphiCertificate cert;
  double best = kInf;
  std::vector<double> x(d), y(d), u(d), bx(d), by(d);
  uint64_t stream = 0;
  for (double r : radii) {
    for (long k = 0; k < per; ++k, ++stream) {
      for (int i = 0; i < d; ++i)
        x[i] = y[i] = plan.center_scale * (2.0 * rng::u01(seed, stream, i) - 1.0);
      sample_direction(seed, stream, 2 * static_cast<uint64_t>(d), d, u);
      for (int i = 0; i < d; ++i) {
        x[i] += 0.5 * r * u[i];
        y[i] -= 0.5 * r * u[i];
      }
      const double val = ratio(x, y);
      if (val < cutoff) ++cert.violations;
      if (val < best) {
        best = val;
        bx = x;
        by = y;
      }
    }
  }
  if (plan.descent_steps > 0 && best < kInf) {
    auto f = [&](const std::vector<double>& a, const std::vector<double>& b) {
      return ratio(a, b);
    };
    best = descend_pair(f, bx, by, plan.descent_steps, /*allow_scale=*/true);
  }
  cert.min_ratio = best;
  cert.holds = (cert.violations == 0) && best >= cutoff;
  return cert;
}

std::vector<std::string> potential_family_names() {
  return {"zero", "quadratic", "power", "perturbed_convex", "double_well", "custom_poly"};
}

PotentialSpec make_potential(const std::string& family, int d,
                             const std::map<std::string, double>& params,
                             const std::vector<std::pair<std::vector<int>, double>>& poly) {
  auto get = [&](const std::string& key) {
    auto it = params.find(key);
    require(it != params.end(), "potential family '" + family + "' needs parameter '" + key + "'");
    return it->second;
  };
  if (family == "zero") return zero_potential(d);
  if (family == "quadratic") return quadratic(d, get("lambda"));
  if (family == "power") return power(d, get("beta"));
  if (family == "perturbed_convex") return perturbed_convex(d, get("K"), get("M"));
  if (family == "double_well") {
    require(d == 1, "double_well potential is one-dimensional");
    return double_well();
  }
  if (family == "custom_poly") return custom_poly(d, poly);
  throw SldError("unknown potential family: " + family);
}

}  // namespace sld::model
