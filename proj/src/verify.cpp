#include "sld/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sld/numerics.hpp"
#include "sld/rng.hpp"
#include "sld/stats.hpp"
#include "sld/transport.hpp"

namespace sld::verify {
namespace {

constexpr double kMarginCap = 1e15;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double diff_norm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void base_provenance(CheckResult& r, const sde::IntegratorConfig& cfg) {
  r.provenance["seed"] = std::to_string(cfg.seed);
  r.provenance["h"] = fmt(cfg.h);
  r.provenance["T"] = fmt(cfg.T);
  r.provenance["n_paths"] = std::to_string(cfg.n_paths);
  r.provenance["bootstrap_B"] = std::to_string(kBootstrapB);
  r.provenance["k_sigmas"] = fmt(kDefaultSigmas);
}

// Worst-margin accumulator: keeps the row with the smallest signed margin.
struct Worst {
  bool seen = false;
  double margin = kMarginCap;
  double emp = 0.0, bound = 0.0, se = 0.0;
  std::string tag;

  void offer(double margin_sigmas, double e, double b, double s, std::string t) {
    if (!seen || margin_sigmas < margin) {
      seen = true;
      margin = margin_sigmas;
      emp = e;
      bound = b;
      se = s;
      tag = std::move(t);
    }
  }
  void commit(CheckResult& r, const char* tag_key) const {
    r.empirical = emp;
    r.bound = bound;
    r.stderr_value = se;
    if (!tag.empty()) r.provenance[tag_key] = tag;
  }
};

double one_sided_margin(double emp, double bound, double se) {
  if (se > 0.0) return std::clamp((bound - emp) / se, -kMarginCap, kMarginCap);
  return emp <= bound + 1e-12 * (1.0 + std::abs(bound)) ? kMarginCap : -kMarginCap;
}

// W_p between the index-selected rows of two stored marginal clouds.
double wp_rows(const std::vector<double>& X, const std::vector<double>& Y, int d, double p,
               std::span<const uint64_t> idx) {
  transport::Cloud A, B;
  A.d = B.d = d;
  A.pts.resize(idx.size() * d);
  B.pts.resize(idx.size() * d);
  for (size_t k = 0; k < idx.size(); ++k)
    for (int c = 0; c < d; ++c) {
      A.pts[k * d + c] = X[idx[k] * d + c];
      B.pts[k * d + c] = Y[idx[k] * d + c];
    }
  return transport::wasserstein(A, B, p).value;
}

double wp_all(const std::vector<double>& X, const std::vector<double>& Y, int d, double p) {
  transport::Cloud A{d, X}, B{d, Y};
  return transport::wasserstein(A, B, p).value;
}

double entropy_plugin(std::span<const double> w) {
  double sw = 0.0, swl = 0.0;
  for (double v : w) {
    sw += v;
    if (v > 0.0) swl += v * std::log(v);
  }
  const double n = static_cast<double>(w.size());
  const double mw = sw / n;
  return swl / n - (mw > 0.0 ? mw * std::log(mw) : 0.0);
}

}  // namespace

const char* to_string(PassRule r) {
  switch (r) {
    case PassRule::UpperBound: return "upper";
    case PassRule::LowerBound: return "lower";
    case PassRule::TwoSided: return "two-sided";
  }
  return "?";
}

void finalize(CheckResult& r) {
  const double se = r.stderr_value;
  const double eps = 1e-12 * (1.0 + std::abs(r.bound));
  switch (r.rule) {
    case PassRule::UpperBound:
      r.margin_sigmas = one_sided_margin(r.empirical, r.bound, se);
      r.passed = se > 0.0 ? r.empirical <= r.bound + r.k * se : r.empirical <= r.bound + eps;
      break;
    case PassRule::LowerBound:
      r.margin_sigmas = one_sided_margin(r.bound, r.empirical, se);
      r.passed = se > 0.0 ? r.empirical >= r.bound - r.k * se : r.empirical >= r.bound - eps;
      break;
    case PassRule::TwoSided: {
      const double dev = std::abs(r.empirical - r.bound);
      r.passed = se > 0.0 ? dev <= r.k * se : dev <= eps;
      r.margin_sigmas =
          se > 0.0 ? std::clamp(r.k - dev / se, -kMarginCap, kMarginCap)
                   : (r.passed ? kMarginCap : -kMarginCap);
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Test function library
// ---------------------------------------------------------------------------

namespace {

TestFunction make_linear(std::string name, std::vector<double> a) {
  TestFunction tf;
  tf.name = std::move(name);
  tf.f = [a](std::span<const double> x) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
  };
  tf.grad = [a](std::span<const double>, std::span<double> g) {
    std::copy(a.begin(), a.end(), g.begin());
  };
  return tf;
}

}  // namespace

std::vector<TestFunction> test_library(int d) {
  require(d >= 1, "test_library: d must be positive");
  std::vector<TestFunction> fns;
  const int last = d - 1;
  const double c = 1.0 / std::sqrt(static_cast<double>(d));

  std::vector<double> e1(d, 0.0), ones(d, c), alt(d), mix(d, 0.0), skew(d, 0.0);
  e1[0] = 1.0;
  for (int i = 0; i < d; ++i) alt[i] = (i % 2 == 0 ? c : -c);
  mix[0] += 1.0;
  mix[last] += 0.5;
  skew[0] += 0.3;
  skew[last] -= 0.7;

  fns.push_back(make_linear("lin_x1", e1));
  fns.push_back(make_linear("lin_mean", ones));
  fns.push_back(make_linear("lin_alt", alt));
  fns.push_back(make_linear("lin_mix", mix));
  fns.push_back(make_linear("lin_skew", skew));

  auto add = [&](std::string name, auto f, auto g, bool pos = false) {
    TestFunction tf;
    tf.name = std::move(name);
    tf.f = f;
    tf.grad = g;
    tf.positive = pos;
    fns.push_back(std::move(tf));
  };

  add("quad_x1", [](std::span<const double> x) { return x[0] * x[0]; },
      [](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = 2.0 * x[0];
      });
  add("quad_norm",
      [d](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s / d;
      },
      [d](std::span<const double> x, std::span<double> g) {
        for (size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * x[i] / d;
      });
  add("quad_cross", [last](std::span<const double> x) { return x[0] * x[last]; },
      [last](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        if (last == 0) {
          g[0] = 2.0 * x[0];
        } else {
          g[0] = x[last];
          g[last] = x[0];
        }
      });
  add("quad_skew",
      [last](std::span<const double> x) {
        const double u = x[0] - 0.5 * x[last];
        return u * u;
      },
      [last](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        const double u = x[0] - 0.5 * x[last];
        g[0] += 2.0 * u;
        g[last] += -u;  // d = 1 folds both terms onto the same coordinate
      });
  add("cos_shift", [](std::span<const double> x) { return std::cos(2.0 * x[0] - 1.0); },
      [](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = -2.0 * std::sin(2.0 * x[0] - 1.0);
      });
  add("sin_x1", [](std::span<const double> x) { return std::sin(x[0]); },
      [](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = std::cos(x[0]);
      });
  add("cos_x1", [](std::span<const double> x) { return std::cos(x[0]); },
      [](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = -std::sin(x[0]);
      });
  add("sin_mean",
      [c](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return std::sin(c * s);
      },
      [c](std::span<const double> x, std::span<double> g) {
        double s = 0.0;
        for (double v : x) s += v;
        const double dc = c * std::cos(c * s);
        std::fill(g.begin(), g.end(), dc);
      });
  add("cos_skew",
      [last](std::span<const double> x) { return std::cos(x[0] - 0.5 * x[last]); },
      [last](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        const double s = std::sin(x[0] - 0.5 * x[last]);
        g[0] += -s;
        g[last] += 0.5 * s;
      });
  add("sin_2x1", [](std::span<const double> x) { return std::sin(2.0 * x[0]); },
      [](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = 2.0 * std::cos(2.0 * x[0]);
      });
  add("cos_2mean",
      [c](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return std::cos(2.0 * c * s);
      },
      [c](std::span<const double> x, std::span<double> g) {
        double s = 0.0;
        for (double v : x) s += v;
        const double dc = -2.0 * c * std::sin(2.0 * c * s);
        std::fill(g.begin(), g.end(), dc);
      });
  add("sin_cos",
      [last](std::span<const double> x) { return std::sin(x[0]) * std::cos(x[last]); },
      [last](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        if (last == 0) {
          g[0] = std::cos(2.0 * x[0]);  // d/dx sin x cos x
        } else {
          g[0] = std::cos(x[0]) * std::cos(x[last]);
          g[last] = -std::sin(x[0]) * std::sin(x[last]);
        }
      });
  add("tanh_x1", [](std::span<const double> x) { return std::tanh(x[0]); },
      [](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        const double t = std::tanh(x[0]);
        g[0] = 1.0 - t * t;
      });
  add("gauss_bump",
      [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::exp(-s / 8.0);
      },
      [](std::span<const double> x, std::span<double> g) {
        double s = 0.0;
        for (double v : x) s += v * v;
        const double f = std::exp(-s / 8.0);
        for (size_t i = 0; i < g.size(); ++i) g[i] = -0.25 * x[i] * f;
      },
      /*pos=*/true);
  add("two_plus_sin", [](std::span<const double> x) { return 2.0 + std::sin(x[0]); },
      [](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = std::cos(x[0]);
      },
      /*pos=*/true);

  require(fns.size() == 20, "test_library: expected exactly 20 functions");
  return fns;
}

TestFunction exp_tilt(double a) {
  TestFunction tf;
  tf.name = "exp_tilt";
  tf.positive = true;
  tf.f = [a](std::span<const double> x) { return std::exp(0.5 * a * x[0]); };
  tf.grad = [a](std::span<const double> x, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = 0.5 * a * std::exp(0.5 * a * x[0]);
  };
  return tf;
}

TestFunction constant_fn(double value) {
  TestFunction tf;
  tf.name = "constant";
  tf.positive = value > 0.0;
  tf.f = [value](std::span<const double>) { return value; };
  tf.grad = [](std::span<const double>, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
  };
  return tf;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

CheckResult check_w_contraction(const model::DiffusionSpec& spec, const std::vector<double>& x,
                                const std::vector<double>& y, const std::vector<double>& times,
                                double p, const sde::IntegratorConfig& cfg) {
  require(spec.meta.K.has_value(), "check_w_contraction: spec metadata must declare K");
  const double K = *spec.meta.K;
  const auto batch = sde::couple_synchronous(spec, x, y, cfg, times);
  const double r0 = diff_norm(x, y);
  const size_t n = cfg.n_paths;

  CheckResult res;
  res.name = "w_contraction";
  res.rule = PassRule::UpperBound;
  base_provenance(res, cfg);
  res.provenance["spec"] = spec.name;
  res.provenance["K"] = fmt(K);
  res.provenance["p"] = fmt(p);
  res.provenance["scheme"] = "synchronous";

  Worst worst;
  for (size_t j = 0; j < times.size(); ++j) {
    const double t = batch.grid.snapped[j];
    const double emp = wp_all(batch.X[j], batch.Y[j], batch.d, p);
    const double bound = std::exp(-K * t / p) * r0;
    const double se = stats::bootstrap_stderr(
        [&](std::span<const uint64_t> idx) {
          return wp_rows(batch.X[j], batch.Y[j], batch.d, p, idx);
        },
        n, kBootstrapB, rng::word(cfg.seed, rng::kSaltBootstrap, j));
    res.series.push_back({t, emp, bound, se});
    worst.offer(one_sided_margin(emp, bound, se), emp, bound, se, fmt(t));
  }
  worst.commit(res, "worst_time");
  finalize(res);
  return res;
}

CheckResult check_gradient_commutation(const model::DiffusionSpec& spec, const TestFunction& f,
                                       const std::vector<double>& x, double t,
                                       CommutationForm form, const sde::IntegratorConfig& cfg,
                                       double m) {
  const int d = spec.d;
  const size_t n = cfg.n_paths;
  require(static_cast<int>(x.size()) == d, "check_gradient_commutation: point dimension");
  if (form != CommutationForm::Strong)
    require(spec.meta.K.has_value(), "check_gradient_commutation: needs K metadata");
  if (form == CommutationForm::Interpolated)
    require(m > 1.0, "check_gradient_commutation: interpolation exponent m must exceed 1");
  const double K = spec.meta.K.value_or(0.0);
  const double delta = 1e-4 * (1.0 + norm_of(x));
  sde::IntegratorConfig c2 = cfg;
  c2.T = std::max(t, cfg.h);
  const std::vector<double> obs{t};

  // Common-random-number batches from the 2d perturbed starts: identical
  // seeds mean identical drivers, so the differences estimate the derivative
  // with O(1/sqrt(N)) noise on the difference only.
  std::vector<std::vector<double>> fp(d), fm(d);
  for (int j = 0; j < d; ++j) {
    auto xp = x, xm = x;
    xp[j] += delta;
    xm[j] -= delta;
    const auto bp = sde::simulate(spec, sde::dirac(xp), c2, obs);
    const auto bm = sde::simulate(spec, sde::dirac(xm), c2, obs);
    fp[j].resize(n);
    fm[j].resize(n);
    for (size_t i = 0; i < n; ++i) {
      fp[j][i] = f.f(std::span<const double>(bp.data[0].data() + i * d, d));
      fm[j][i] = f.f(std::span<const double>(bm.data[0].data() + i * d, d));
    }
  }
  // Right side from the unperturbed start (same drivers again).
  const auto b0 = sde::simulate(spec, sde::dirac(x), c2, obs);
  const double q = (form == CommutationForm::Interpolated) ? m / (m - 1.0) : 0.0;
  std::vector<double> rhs_vals(n), gbuf(d);
  for (size_t i = 0; i < n; ++i) {
    std::span<const double> xi(b0.data[0].data() + i * d, d);
    f.grad(xi, gbuf);
    const double gn = norm_of(gbuf);
    switch (form) {
      case CommutationForm::Strong: rhs_vals[i] = gn; break;
      case CommutationForm::Squared: rhs_vals[i] = gn * gn; break;
      case CommutationForm::Interpolated: rhs_vals[i] = std::pow(gn, q); break;
    }
  }

  auto evaluate = [&](std::span<const uint64_t> idx, bool full) -> std::pair<double, double> {
    auto mean_of = [&](const std::vector<double>& v) {
      if (full) return stats::mean(v);
      double s = 0.0;
      for (auto i : idx) s += v[i];
      return s / static_cast<double>(idx.size());
    };
    double grad2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double dj = (mean_of(fp[j]) - mean_of(fm[j])) / (2.0 * delta);
      grad2 += dj * dj;
    }
    const double lhs_norm = std::sqrt(grad2);
    const double rhs_mean = mean_of(rhs_vals);
    double lhs = 0.0, rhs = 0.0;
    switch (form) {
      case CommutationForm::Strong:
        lhs = lhs_norm;
        rhs = rhs_mean;
        break;
      case CommutationForm::Squared:
        lhs = lhs_norm;
        rhs = std::exp(-K * t / 2.0) * std::sqrt(std::max(0.0, rhs_mean));
        break;
      case CommutationForm::Interpolated:
        lhs = std::pow(lhs_norm, q);
        rhs = std::exp(-K * t / (m - 1.0)) * rhs_mean;
        break;
    }
    return {lhs, rhs};
  };

  const auto [lhs, rhs] = evaluate({}, true);
  const double se = stats::bootstrap_stderr(
      [&](std::span<const uint64_t> idx) {
        const auto [l, r] = evaluate(idx, false);
        return l - r;
      },
      n, kBootstrapB, rng::word(cfg.seed, rng::kSaltBootstrap, 0x67));

  CheckResult res;
  res.name = "gradient_commutation";
  res.rule = PassRule::UpperBound;
  res.empirical = lhs;
  res.bound = rhs;
  res.stderr_value = se;
  base_provenance(res, cfg);
  res.provenance["spec"] = spec.name;
  res.provenance["form"] = form == CommutationForm::Strong
                               ? "strong"
                               : (form == CommutationForm::Squared ? "squared" : "interpolated");
  res.provenance["function"] = f.name;
  res.provenance["t"] = fmt(t);
  res.provenance["delta"] = fmt(delta);
  if (form == CommutationForm::Interpolated) res.provenance["m"] = fmt(m);
  finalize(res);
  return res;
}

namespace {

CheckResult functional_family_check(const sde::ParticleCloud& cloud,
                                    const std::vector<TestFunction>& fns, double C,
                                    uint64_t seed, bool logsobolev) {
  require(cloud.size() > 0, "functional check: empty cloud");
  const size_t n = cloud.size();
  const int d = cloud.d;

  CheckResult res;
  res.name = logsobolev ? "logsobolev" : "poincare";
  res.rule = PassRule::UpperBound;
  res.necessary_condition_only = true;
  res.provenance["C"] = fmt(C);
  res.provenance["n"] = std::to_string(n);
  res.provenance["seed"] = std::to_string(seed);
  res.provenance["bootstrap_B"] = std::to_string(kBootstrapB);
  res.provenance["note"] = "necessary-condition check: a finite family cannot certify";

  Worst worst;
  bool all_passed = true;
  std::vector<double> vals(n), g2(n), gbuf(d);
  for (size_t fi = 0; fi < fns.size(); ++fi) {
    const auto& fn = fns[fi];
    for (size_t i = 0; i < n; ++i) {
      std::span<const double> xi(cloud.pts.data() + i * d, d);
      vals[i] = fn.f(xi);
      fn.grad(xi, gbuf);
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += gbuf[c] * gbuf[c];
      g2[i] = s;
    }
    double emp;
    std::function<double(std::span<const uint64_t>)> stat;
    if (logsobolev) {
      std::vector<double> w(n);
      for (size_t i = 0; i < n; ++i) w[i] = vals[i] * vals[i];
      emp = stats::entropy_jackknife(w);
      stat = [&g2, w, C](std::span<const uint64_t> idx) {
        std::vector<double> wr(idx.size());
        double gs = 0.0;
        for (size_t k = 0; k < idx.size(); ++k) {
          wr[k] = w[idx[k]];
          gs += g2[idx[k]];
        }
        return entropy_plugin(wr) - C * gs / static_cast<double>(idx.size());
      };
    } else {
      emp = stats::variance(vals);
      stat = [&vals, &g2, C](std::span<const uint64_t> idx) {
        double s = 0.0, s2 = 0.0, gs = 0.0;
        for (auto i : idx) {
          s += vals[i];
          s2 += vals[i] * vals[i];
          gs += g2[i];
        }
        const double nn = static_cast<double>(idx.size());
        const double var = std::max(0.0, (s2 - s * s / nn) / (nn - 1.0));
        return var - C * gs / nn;
      };
    }
    const double bound = C * stats::mean(g2);
    const double se =
        stats::bootstrap_stderr(stat, n, kBootstrapB, rng::word(seed, rng::kSaltBootstrap, fi));
    const double margin = one_sided_margin(emp, bound, se);
    res.series.push_back({static_cast<double>(fi), emp, bound, se});
    if (se > 0.0 ? emp > bound + kDefaultSigmas * se
                 : emp > bound + 1e-12 * (1.0 + std::abs(bound)))
      all_passed = false;
    worst.offer(margin, emp, bound, se, fn.name);
  }
  worst.commit(res, "worst_function");
  finalize(res);
  res.passed = all_passed;
  return res;
}

}  // namespace

CheckResult check_poincare(const sde::ParticleCloud& cloud,
                           const std::vector<TestFunction>& fns, double C, uint64_t seed) {
  return functional_family_check(cloud, fns, C, seed, /*logsobolev=*/false);
}

CheckResult check_logsobolev(const sde::ParticleCloud& cloud,
                             const std::vector<TestFunction>& fns, double C, uint64_t seed) {
  return functional_family_check(cloud, fns, C, seed, /*logsobolev=*/true);
}

CheckResult check_t2(double K, double T, const std::vector<double>& tilts) {
  require(!tilts.empty(), "check_t2: need at least one tilt");
  require(std::isfinite(T) || K > 0.0, "check_t2: T = infinity needs K > 0");
  const double v = std::isfinite(T) ? T * num::expm1_ratio(K * T) : 1.0 / K;
  const double C_T = constants::t2_constant(K, T);

  CheckResult res;
  res.name = "t2_gaussian";
  res.rule = PassRule::UpperBound;
  res.provenance["K"] = fmt(K);
  res.provenance["T"] = std::isfinite(T) ? fmt(T) : "inf";
  res.provenance["marginal_variance"] = fmt(v);
  res.provenance["C_T"] = fmt(C_T);
  res.provenance["convention"] = "paper-half";
  res.provenance["note"] = "closed-form Gaussian tilts, no Monte Carlo";

  Worst worst;
  for (double mtilt : tilts) {
    const double w2_paper_sq = 0.5 * mtilt * mtilt;      // standard m^2, halved
    const double H = mtilt * mtilt / (2.0 * v);          // relative entropy
    const double bound = C_T * H;
    worst.offer(one_sided_margin(w2_paper_sq, bound, 0.0), w2_paper_sq, bound, 0.0, fmt(mtilt));
    res.series.push_back({mtilt, w2_paper_sq, bound, 0.0});
  }
  worst.commit(res, "worst_tilt");
  res.stderr_value = 0.0;
  finalize(res);
  return res;
}

CheckResult check_variance_decay(const model::DiffusionSpec& spec, const TestFunction& g,
                                 const std::vector<double>& times,
                                 const sde::IntegratorConfig& cfg) {
  require(spec.meta.K.has_value() && *spec.meta.K > 0.0,
          "check_variance_decay: needs K > 0 metadata");
  const double K = *spec.meta.K;
  const double M = spec.meta.M.value_or(1.0);
  const int d = spec.d;
  const size_t n = cfg.n_paths;
  const double burn = cfg.T;

  double tmax = 0.0;
  for (double t : times) tmax = std::max(tmax, t);
  sde::IntegratorConfig c2 = cfg;
  c2.T = burn + 2.0 * tmax;
  std::vector<double> obs{burn};
  for (double t : times) obs.push_back(burn + 2.0 * t);

  const auto batch =
      sde::simulate(spec, sde::dirac(std::vector<double>(d, 0.0)), c2, obs);

  std::vector<double> g0(n), grad2(n), gbuf(d);
  for (size_t i = 0; i < n; ++i) {
    std::span<const double> xi(batch.data[0].data() + i * d, d);
    g0[i] = g.f(xi);
    g.grad(xi, gbuf);
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += gbuf[c] * gbuf[c];
    grad2[i] = s;
  }
  const double grad2_mean = stats::mean(grad2);

  CheckResult res;
  res.name = "variance_decay";
  res.rule = PassRule::UpperBound;
  base_provenance(res, cfg);
  res.provenance["spec"] = spec.name;
  res.provenance["function"] = g.name;
  res.provenance["burn_in"] = fmt(burn);
  res.provenance["K"] = fmt(K);
  res.provenance["M"] = fmt(M);
  res.provenance["estimator"] = "stationary autocovariance at lag 2t";

  Worst worst;
  std::vector<double> gj(n);
  for (size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    for (size_t i = 0; i < n; ++i)
      gj[i] = g.f(std::span<const double>(batch.data[j + 1].data() + i * d, d));
    double s0 = 0.0, sj = 0.0, sc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      s0 += g0[i];
      sj += gj[i];
      sc += g0[i] * gj[i];
    }
    const double emp = sc / n - (s0 / n) * (sj / n);
    const double bound = (M / (2.0 * K)) * std::exp(-K * t) * grad2_mean;
    const double se = stats::bootstrap_stderr(
        [&](std::span<const uint64_t> idx) {
          double a = 0.0, b = 0.0, c = 0.0, gg = 0.0;
          for (auto i : idx) {
            a += g0[i];
            b += gj[i];
            c += g0[i] * gj[i];
            gg += grad2[i];
          }
          const double nn = static_cast<double>(idx.size());
          return (c / nn - (a / nn) * (b / nn)) -
                 (M / (2.0 * K)) * std::exp(-K * t) * gg / nn;
        },
        n, kBootstrapB, rng::word(cfg.seed, rng::kSaltBootstrap, 0x500 + j));
    res.series.push_back({t, emp, bound, se});
    worst.offer(one_sided_margin(emp, bound, se), emp, bound, se, fmt(t));
  }
  worst.commit(res, "worst_time");
  finalize(res);
  return res;
}

CheckResult check_entropy_decay(const model::DiffusionSpec& spec, const TestFunction& g,
                                const std::vector<double>& times,
                                const sde::IntegratorConfig& cfg, size_t inner_paths) {
  require(spec.meta.K.has_value() && *spec.meta.K > 0.0,
          "check_entropy_decay: needs K > 0 metadata");
  require(g.positive, "check_entropy_decay: test function must be positive");
  const double K = *spec.meta.K;
  const double M = spec.meta.M.value_or(1.0);
  const int d = spec.d;
  const size_t n = cfg.n_paths;

  const auto burn_batch = sde::simulate(spec, sde::dirac(std::vector<double>(d, 0.0)), cfg,
                                        std::vector<double>{cfg.T});
  std::vector<double> ratio(n), gbuf(d);
  for (size_t i = 0; i < n; ++i) {
    std::span<const double> xi(burn_batch.data[0].data() + i * d, d);
    g.grad(xi, gbuf);
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += gbuf[c] * gbuf[c];
    ratio[i] = s / g.f(xi);
  }
  const double ratio_mean = stats::mean(ratio);

  double tmax = 0.0;
  for (double t : times) tmax = std::max(tmax, t);
  // Inner Monte Carlo estimate of P_t g at every cloud point.
  std::vector<std::vector<double>> pg(times.size(), std::vector<double>(n));
  sde::IntegratorConfig ci = cfg;
  ci.n_paths = inner_paths;
  ci.T = std::max(tmax, cfg.h);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> x0(burn_batch.data[0].begin() + i * d,
                           burn_batch.data[0].begin() + (i + 1) * d);
    ci.seed = rng::word(cfg.seed, 0xE27D, i);
    const auto inner = sde::simulate(spec, sde::dirac(x0), ci, times);
    for (size_t j = 0; j < times.size(); ++j) {
      double s = 0.0;
      for (size_t r = 0; r < inner_paths; ++r)
        s += g.f(std::span<const double>(inner.data[j].data() + r * d, d));
      pg[j][i] = s / static_cast<double>(inner_paths);
    }
  }

  CheckResult res;
  res.name = "entropy_decay";
  res.rule = PassRule::UpperBound;
  base_provenance(res, cfg);
  res.provenance["spec"] = spec.name;
  res.provenance["function"] = g.name;
  res.provenance["inner_paths"] = std::to_string(inner_paths);
  res.provenance["K"] = fmt(K);
  res.provenance["M"] = fmt(M);

  Worst worst;
  for (size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    const double emp = stats::entropy_jackknife(pg[j]);
    const double bound = (M / K) * std::exp(-K * t) * ratio_mean;
    const double se = stats::bootstrap_stderr(
        [&](std::span<const uint64_t> idx) {
          std::vector<double> w(idx.size());
          double rs = 0.0;
          for (size_t k = 0; k < idx.size(); ++k) {
            w[k] = pg[j][idx[k]];
            rs += ratio[idx[k]];
          }
          return entropy_plugin(w) -
                 (M / K) * std::exp(-K * t) * rs / static_cast<double>(idx.size());
        },
        n, kBootstrapB, rng::word(cfg.seed, rng::kSaltBootstrap, 0x600 + j));
    res.series.push_back({t, emp, bound, se});
    worst.offer(one_sided_margin(emp, bound, se), emp, bound, se, fmt(t));
  }
  worst.commit(res, "worst_time");
  finalize(res);
  return res;
}

CheckResult check_eberle_w1(const model::DiffusionSpec& spec, const std::vector<double>& x,
                            const std::vector<double>& y, const std::vector<double>& times,
                            const constants::EberleRate& rate, const sde::IntegratorConfig& cfg) {
  require(!rate.no_rate, "check_eberle_w1: profile has no positive rate");
  const auto batch = sde::couple_reflection(spec, x, y, cfg, times);
  const double r0 = diff_norm(x, y);
  const size_t n = cfg.n_paths;

  CheckResult res;
  res.name = "eberle_w1";
  res.rule = PassRule::UpperBound;
  base_provenance(res, cfg);
  res.provenance["spec"] = spec.name;
  res.provenance["lambda"] = fmt(rate.lambda);
  res.provenance["phi_min"] = fmt(rate.phi_min);
  res.provenance["scheme"] = "reflection";

  Worst worst;
  for (size_t j = 0; j < times.size(); ++j) {
    const double t = batch.grid.snapped[j];
    const double emp = wp_all(batch.X[j], batch.Y[j], batch.d, 1.0);
    const double bound = (2.0 / rate.phi_min) * std::exp(-rate.lambda * t) * r0;
    const double se = stats::bootstrap_stderr(
        [&](std::span<const uint64_t> idx) {
          return wp_rows(batch.X[j], batch.Y[j], batch.d, 1.0, idx);
        },
        n, kBootstrapB, rng::word(cfg.seed, rng::kSaltBootstrap, 0x700 + j));
    res.series.push_back({t, emp, bound, se});
    worst.offer(one_sided_margin(emp, bound, se), emp, bound, se, fmt(t));
  }
  worst.commit(res, "worst_time");
  finalize(res);
  return res;
}

namespace {

std::vector<double> coupling_tail(const sde::CoupledBatch& batch,
                                  const std::vector<double>& times) {
  std::vector<double> tail(times.size(), 0.0);
  for (size_t j = 0; j < times.size(); ++j) {
    size_t cnt = 0;
    for (double tc : batch.coupling_time)
      if (tc > batch.grid.snapped[j]) ++cnt;
    tail[j] = static_cast<double>(cnt) / batch.coupling_time.size();
  }
  return tail;
}

double tail_bootstrap(const sde::CoupledBatch& batch, double t, size_t n, uint64_t seed) {
  return stats::bootstrap_stderr(
      [&](std::span<const uint64_t> idx) {
        size_t cnt = 0;
        for (auto i : idx)
          if (batch.coupling_time[i] > t) ++cnt;
        return static_cast<double>(cnt) / idx.size();
      },
      n, kBootstrapB, seed);
}

}  // namespace

CheckResult check_coupling_time_exact(const model::DiffusionSpec& spec,
                                      const std::vector<double>& x, const std::vector<double>& y,
                                      const std::vector<double>& times,
                                      const sde::IntegratorConfig& cfg) {
  const auto batch = sde::couple_reflection(spec, x, y, cfg, times);
  const double r0 = diff_norm(x, y);
  const auto tail = coupling_tail(batch, times);

  CheckResult res;
  res.name = "coupling_time_exact";
  res.rule = PassRule::TwoSided;
  base_provenance(res, cfg);
  res.provenance["spec"] = spec.name;
  res.provenance["r0"] = fmt(r0);
  res.provenance["target"] = "2 Phi(r/(2 sqrt t)) - 1";
  res.provenance["merge_threshold"] = fmt(batch.merge_threshold);

  Worst worst;
  for (size_t j = 0; j < times.size(); ++j) {
    const double t = batch.grid.snapped[j];
    const double target = 2.0 * stats::normal_cdf(r0 / (2.0 * std::sqrt(t))) - 1.0;
    const double se = tail_bootstrap(batch, t, cfg.n_paths,
                                     rng::word(cfg.seed, rng::kSaltBootstrap, 0x800 + j));
    res.series.push_back({t, tail[j], target, se});
    const double dev = se > 0.0 ? kDefaultSigmas - std::abs(tail[j] - target) / se
                                : (std::abs(tail[j] - target) < 1e-12 ? kMarginCap : -kMarginCap);
    worst.offer(dev, tail[j], target, se, fmt(t));
  }
  worst.commit(res, "worst_time");
  finalize(res);
  return res;
}

CheckResult check_coupling_time_tail(const model::DiffusionSpec& spec,
                                     const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& times,
                                     const sde::IntegratorConfig& cfg,
                                     std::optional<double> ou_lambda) {
  const auto batch = sde::couple_reflection(spec, x, y, cfg, times);
  const double r0 = diff_norm(x, y);
  const auto tail = coupling_tail(batch, times);

  CheckResult res;
  res.name = ou_lambda ? "coupling_time_tail_ou" : "coupling_time_tail";
  res.rule = PassRule::UpperBound;
  base_provenance(res, cfg);
  res.provenance["spec"] = spec.name;
  res.provenance["r0"] = fmt(r0);
  res.provenance["merge_threshold"] = fmt(batch.merge_threshold);
  if (ou_lambda) res.provenance["ou_lambda"] = fmt(*ou_lambda);

  Worst worst;
  for (size_t j = 0; j < times.size(); ++j) {
    const double t = batch.grid.snapped[j];
    constants::DecayParams p;
    p.r = r0;
    p.t = t;
    double bound;
    if (ou_lambda) {
      p.lambda = *ou_lambda;
      bound = constants::decay_bound(constants::DecayKind::OuHitting, p);
    } else {
      bound = r0 / std::sqrt(2.0 * kPi * t);
    }
    const double se = tail_bootstrap(batch, t, cfg.n_paths,
                                     rng::word(cfg.seed, rng::kSaltBootstrap, 0x900 + j));
    res.series.push_back({t, tail[j], bound, se});
    worst.offer(one_sided_margin(tail[j], bound, se), tail[j], bound, se, fmt(t));
  }
  worst.commit(res, "worst_time");
  finalize(res);
  return res;
}

CheckResult check_mckean_contraction(const model::McKeanSpec& mv, const sde::InitSampler& init1,
                                     const sde::InitSampler& init2,
                                     const std::vector<double>& times,
                                     const sde::IntegratorConfig& cfg, bool matched_means_V0) {
  require(times.size() >= 2, "check_mckean_contraction: need at least two times");
  require(mv.meta.K_V.has_value() && mv.meta.K_W.has_value(),
          "check_mckean_contraction: analytic K_V/K_W metadata required");
  const double rate2 =
      constants::mckean_rate(*mv.meta.K_V, *mv.meta.K_W, std::nullopt, matched_means_V0);

  CheckResult res;
  res.name = "mckean_contraction";
  res.rule = PassRule::LowerBound;
  base_provenance(res, cfg);
  res.provenance["spec"] = mv.name;
  res.provenance["K_V"] = fmt(*mv.meta.K_V);
  res.provenance["K_W"] = fmt(*mv.meta.K_W);
  res.provenance["branch"] = matched_means_V0 ? "matched-means-V0" : "general";

  if (rate2 <= 0.0) {
    res.provenance["status"] = "not-applicable (rate <= 0)";
    res.bound = 0.0;
    res.empirical = 0.0;
    res.passed = true;
    return res;
  }

  const auto pc = sde::simulate_mckean_paired(mv, init1, init2, cfg, times);
  const size_t n = cfg.n_paths;
  const int d = mv.d;

  std::vector<double> ts(times.size()), w(times.size());
  for (size_t j = 0; j < times.size(); ++j) {
    ts[j] = pc.first[j].t;
    w[j] = wp_all(pc.first[j].pts, pc.second[j].pts, d, 2.0);
  }
  const double fitted = stats::fit_exp_rate(ts, w);
  const double bound = rate2 / 2.0;  // W2 itself, not squared

  const double se = stats::bootstrap_stderr(
      [&](std::span<const uint64_t> idx) {
        // Independent resampling of both clouds (they are independent samples).
        std::vector<double> wr(times.size());
        std::vector<uint64_t> idx2(idx.size());
        for (size_t k = 0; k < idx.size(); ++k)
          idx2[k] = rng::index(rng::salted(cfg.seed, rng::kSaltBootstrap ^ 0xA17ULL),
                               idx[k] + 13, k, n);
        transport::Cloud A, B;
        A.d = B.d = d;
        A.pts.resize(idx.size() * d);
        B.pts.resize(idx.size() * d);
        for (size_t j = 0; j < times.size(); ++j) {
          for (size_t k = 0; k < idx.size(); ++k)
            for (int c = 0; c < d; ++c) {
              A.pts[k * d + c] = pc.first[j].pts[idx[k] * d + c];
              B.pts[k * d + c] = pc.second[j].pts[idx2[k] * d + c];
            }
          wr[j] = transport::wasserstein(A, B, 2.0).value;
        }
        return stats::fit_exp_rate(ts, wr);
      },
      n, kBootstrapB, rng::word(cfg.seed, rng::kSaltBootstrap, 0xA00));

  res.empirical = fitted;
  res.bound = bound;
  res.stderr_value = se;
  for (size_t j = 0; j < times.size(); ++j)
    res.series.push_back({ts[j], w[j], w[0] * std::exp(-bound * (ts[j] - ts[0])), 0.0});
  finalize(res);
  return res;
}

CheckResult check_convolution(constants::IneqKind kind, double var1, double var2,
                              double lambda) {
  require(kind == constants::IneqKind::Poincare || kind == constants::IneqKind::LogSobolev,
          "check_convolution: Poincare or log-Sobolev kinds only");
  const double factor = kind == constants::IneqKind::Poincare ? 1.0 : 2.0;
  const double CX = factor * var1, CY = factor * var2;
  const double vmix = lambda * var1 + (1.0 - lambda) * var2;
  const double Cmix = factor * vmix;
  const auto cb = constants::convolution_constants(lambda, CX, CY, kind);

  CheckResult res;
  res.name = "convolution";
  res.rule = PassRule::UpperBound;
  res.provenance["kind"] = to_string(kind);
  res.provenance["var1"] = fmt(var1);
  res.provenance["var2"] = fmt(var2);
  res.provenance["lambda"] = fmt(lambda);
  res.provenance["note"] = "exact Gaussian arithmetic, no Monte Carlo";

  Worst worst;
  // Upper bound: C(sqrt(l) X + sqrt(1-l) Y) <= l C_X + (1-l) C_Y (Gaussian
  // equality).
  worst.offer(one_sided_margin(Cmix, cb.upper, 0.0), Cmix, cb.upper, 0.0, "upper");
  res.series.push_back({0.0, Cmix, cb.upper, 0.0});
  // Symmetric lower bound on the mix constant.
  worst.offer(one_sided_margin(cb.lower_given_symmetric, Cmix, 0.0),
              cb.lower_given_symmetric, Cmix, 0.0, "lower");
  res.series.push_back({1.0, cb.lower_given_symmetric, Cmix, 0.0});
  // Regularization specialization: C(Z) <= C(Z + alpha G) + factor alpha^2.
  if (lambda > 0.0 && lambda < 1.0) {
    const double alpha2 = 1.0 - lambda;
    const double lhs = factor * var1;
    const double rhs = factor * (var1 + alpha2) + factor * alpha2;
    worst.offer(one_sided_margin(lhs, rhs, 0.0), lhs, rhs, 0.0, "regularization");
    res.series.push_back({2.0, lhs, rhs, 0.0});
  }
  worst.commit(res, "worst_relation");
  res.stderr_value = 0.0;
  finalize(res);
  return res;
}

}  // namespace sld::verify
