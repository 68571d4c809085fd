#include "sld/constants.hpp"

#include <algorithm>
#include <cmath>

#include "sld/numerics.hpp"

namespace sld::constants {

const char* to_string(IneqKind k) {
  switch (k) {
    case IneqKind::Poincare: return "poincare";
    case IneqKind::LogSobolev: return "log-sobolev";
    case IneqKind::T2: return "t2";
    case IneqKind::WI: return "wi";
    case IneqKind::Beckner: return "beckner";
    case IneqKind::WeakW2I: return "weak-w2i";
    case IneqKind::WeakPoincare: return "weak-poincare";
  }
  return "?";
}

const char* to_string(Convention c) {
  return c == Convention::PaperHalf ? "paper-half" : "standard";
}

// ---------------------------------------------------------------------------
// Flow constants

double poincare_flow(double K, double M, double T, double C_P0) {
  require(M > 0.0, "poincare_flow: M > 0");
  require(T >= 0.0, "poincare_flow: T >= 0");
  if (std::isinf(T)) {
    require(K > 0.0, "poincare_flow: T=inf needs K > 0");
    return M / K;
  }
  return std::exp(-K * T) * C_P0 + M * T * num::expm1_ratio(K * T);
}

double logsobolev_flow(double K, double T, double C_LS0) {
  require(T >= 0.0, "logsobolev_flow: T >= 0");
  if (std::isinf(T)) {
    require(K > 0.0, "logsobolev_flow: T=inf needs K > 0");
    return 2.0 / K;
  }
  return std::exp(-K * T) * C_LS0 + 2.0 * T * num::expm1_ratio(K * T);
}

double t2_constant(double K, double T) {
  require(T >= 0.0, "t2_constant: T >= 0");
  if (std::isinf(T)) {
    require(K > 0.0, "t2_constant: T=inf needs K > 0");
    return 2.0 / K;
  }
  if (K > 0.0) return std::min(2.0 / K, 2.0 * T * num::expm1_ratio(0.5 * K * T));
  if (K == 0.0) return 2.0 * T;
  // K < 0 branch: 4[(1-e^{-KT/2})/K - (1-e^{-KT/2})^2/K], written so the
  // K -> 0 limit is reached smoothly through the series ratio.
  const double E = -std::expm1(-0.5 * K * T);
  return 4.0 * (0.5 * T * num::expm1_ratio(0.5 * K * T)) * (1.0 - E);
}

double t2_flow(double K, double T, double C_W0, double lambda) {
  require(T >= 0.0, "t2_flow: T >= 0");
  if (K > 0.0) {
    require(lambda > 0.0 && lambda < K, "t2_flow: need 0 < lambda < K");
    const double decay = std::isinf(T) ? 0.0 : std::exp(-(K - lambda) * T);
    return decay * C_W0 + 2.0 / lambda;
  }
  require(!std::isinf(T), "t2_flow: T=inf needs K > 0");
  const double B_T = 1.0 + std::sqrt(2.0) * T * num::expm1_ratio(K * T) +
                     2.0 * std::expm1(-K * T);
  return t2_constant(K, T) + std::sqrt(2.0) / 2.0 + B_T * C_W0;
}

double wi_constant(double K, double lambda, double T, double D0) {
  require(lambda > 0.0, "wi_constant: lambda > 0");
  require(T >= 0.0, "wi_constant: T >= 0");
  const double A = K - 2.0 * lambda;
  if (std::isinf(T)) {
    require(A > 0.0, "wi_constant: T=inf needs K - 2 lambda > 0");
    return 2.0 / (A * lambda);
  }
  return std::exp(-A * T) * D0 + (2.0 / lambda) * T * num::expm1_ratio(A * T);
}

double beckner_constant(double m, double M, double K, double t) {
  require(m >= 2.0, "beckner_constant: m >= 2");
  require(t >= 0.0 && !std::isinf(t), "beckner_constant: finite t >= 0");
  // (e^{2Kt/m} - 1)/K = (2t/m) * (1-e^{-x})/x at x = -2Kt/m.
  return M * ((m + 2.0) / m) * (2.0 * t / m) * num::expm1_ratio(-2.0 * K * t / m);
}

// ---------------------------------------------------------------------------
// Reflection-coupling rate

namespace {

struct KappaScan {
  double R0 = 0.0;
  bool no_rate = false;
  std::vector<double> grid;      // radii, increasing
  std::vector<double> kappa_v;   // kappa at grid
  std::vector<double> suffix_min;
};

// Build a log grid, locate the last sign change of kappa (-> R0) and the
// suffix minima used for the inner infimum in the R1 condition.
KappaScan scan_kappa(const std::function<double(double)>& kappa) {
  KappaScan s;
  double rmax = 64.0;
  const int n = 6000;
  for (int attempt = 0; attempt < 8; ++attempt) {
    s.grid.resize(n);
    s.kappa_v.resize(n);
    const double lo = std::log(1e-6), hi = std::log(rmax);
    for (int i = 0; i < n; ++i) {
      s.grid[i] = std::exp(lo + (hi - lo) * i / (n - 1.0));
      s.kappa_v[i] = kappa(s.grid[i]);
      require(std::isfinite(s.kappa_v[i]), "eberle_rate: kappa not finite");
    }
    // need a strictly positive tail for a finite R1
    const double tail = *std::min_element(s.kappa_v.end() - n / 8, s.kappa_v.end());
    if (tail > 0.0) break;
    rmax *= 8.0;
    if (rmax > 1e9) {
      s.no_rate = true;
      return s;
    }
  }
  s.suffix_min.assign(n, 0.0);
  double run = kInf;
  for (int i = n - 1; i >= 0; --i) {
    run = std::min(run, s.kappa_v[i]);
    s.suffix_min[i] = run;
  }
  int last_neg = -1;
  for (int i = 0; i < n; ++i)
    if (s.kappa_v[i] < 0.0) last_neg = i;
  if (last_neg < 0) {
    s.R0 = 0.0;
  } else if (last_neg == n - 1) {
    s.no_rate = true;
  } else {
    s.R0 = num::bisect(kappa, s.grid[last_neg], s.grid[last_neg + 1], 1e-14);
  }
  return s;
}

double inner_inf(const KappaScan& s, const std::function<double(double)>& kappa,
                 double R) {
  const auto it = std::lower_bound(s.grid.begin(), s.grid.end(), R);
  double m = kappa(R);
  if (it != s.grid.end())
    m = std::min(m, s.suffix_min[static_cast<size_t>(it - s.grid.begin())]);
  return m;
}

// Prefix integrals over [0, end] split at known integrand kinks, so the
// nested quadratures below stay a single smooth cell deep. With no kinks the
// partition is the single cell [0, end] and evaluation reduces to one plain
// adaptive integral, reproducing the un-partitioned result.
struct PrefixTable {
  std::vector<double> x;
  std::vector<double> acc;
};

PrefixTable build_prefix(const std::function<double(double)>& f, double end,
                         const std::vector<double>& kinks) {
  PrefixTable t;
  t.x.push_back(0.0);
  for (double k : kinks)
    if (k > 0.0 && k < end && k > t.x.back()) t.x.push_back(k);
  t.x.push_back(end);
  t.acc.assign(t.x.size(), 0.0);
  for (size_t i = 1; i < t.x.size(); ++i)
    t.acc[i] = t.acc[i - 1] + num::integrate(f, t.x[i - 1], t.x[i]);
  return t;
}

double eval_prefix(const PrefixTable& t, const std::function<double(double)>& f,
                   double r) {
  if (r <= 0.0) return 0.0;
  const auto it = std::upper_bound(t.x.begin(), t.x.end(), r);
  const size_t j = static_cast<size_t>(it - t.x.begin()) - 1;
  return t.acc[j] + num::integrate(f, t.x[j], std::min(r, t.x.back()));
}

// Adaptive integral of f over [a, b] split at the kink list.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& kinks, double tol) {
  double total = 0.0;
  double left = a;
  for (double k : kinks) {
    if (k <= left || k >= b) continue;
    total += num::integrate(f, left, k, tol);
    left = k;
  }
  return total + num::integrate(f, left, b, tol);
}

EberleRate eberle_rate_impl(const std::function<double(double)>& kappa,
                            std::optional<GeneralSigmaBounds> general,
                            const std::vector<double>& kinks) {
  EberleRate out;
  out.general = general.has_value();
  double c_exp = 0.25;
  if (general) {
    const double denom = 2.0 / general->N_inv - general->Lambda;
    out.positivity_ok = denom > 0.0;
    if (!out.positivity_ok) {
      out.no_rate = true;
      return out;
    }
    c_exp = 1.0 / denom;
  }

  const KappaScan scan = scan_kappa(kappa);
  if (scan.no_rate) {
    out.no_rate = true;
    return out;
  }
  out.R0 = scan.R0;

  // R1: first R >= R0 with inf_{r >= R} kappa(r) >= 8/(R(R-R0)).
  auto cond = [&](double R) {
    return inner_inf(scan, kappa, R) - 8.0 / (R * (R - scan.R0));
  };
  double lo = scan.R0 + 1e-12 * (1.0 + scan.R0), hi = lo;
  double span = std::max(1e-6, 1e-3 * (1.0 + scan.R0));
  while (cond(hi) < 0.0) {
    hi = scan.R0 + span;
    span *= 1.5;
    require(span < 1e12, "eberle_rate: R1 search failed to bracket");
  }
  out.R1 = (cond(lo) >= 0.0) ? lo : num::bisect(cond, lo, hi, 1e-14);

  // phi(r) = exp(-c int_0^r s kappa^-(s) ds); kappa^- vanishes past R0,
  // so phi is the constant phi_min beyond R0 and all outer integrals over
  // [R0, R1] are closed-form. Each head integral over [0, R0] is backed by a
  // kink-split prefix table so that tabulated profiles stay tractable.
  std::function<double(double)> neg_part = [&](double ss) {
    // Profiles of the K - M/r type diverge at 0 while s kappa^-(s) stays
    // bounded; evaluate just off the origin so the quadrature sees the limit.
    const double s_eval = std::max(ss, 1e-12);
    return s_eval * std::max(0.0, -kappa(s_eval));
  };
  const PrefixTable neg_tab =
      scan.R0 > 0.0 ? build_prefix(neg_part, scan.R0, kinks) : PrefixTable{};
  const double I_R0 = scan.R0 > 0.0 ? neg_tab.acc.back() : 0.0;
  out.phi_min = std::exp(-c_exp * I_R0);
  std::function<double(double)> phi = [&](double r) {
    if (r >= scan.R0) return out.phi_min;
    return std::exp(-c_exp * eval_prefix(neg_tab, neg_part, r));
  };
  const PrefixTable phi_tab =
      scan.R0 > 0.0 ? build_prefix(phi, scan.R0, kinks) : PrefixTable{};
  auto Phi = [&](double r) {
    const double head = std::min(r, scan.R0);
    double v = head > 0.0 ? eval_prefix(phi_tab, phi, head) : 0.0;
    if (r > scan.R0) v += out.phi_min * (r - scan.R0);
    return v;
  };
  const double Phi_R0 = Phi(scan.R0);
  std::function<double(double)> ratio_integrand = [&](double ss) {
    return Phi(ss) / phi(ss);
  };
  const PrefixTable j_tab =
      scan.R0 > 0.0 ? build_prefix(ratio_integrand, scan.R0, kinks) : PrefixTable{};
  auto J = [&](double r) {  // int_0^r Phi/phi
    const double head = std::min(r, scan.R0);
    double v = head > 0.0 ? eval_prefix(j_tab, ratio_integrand, head) : 0.0;
    if (r > scan.R0) {
      const double u = r - scan.R0;
      v += (Phi_R0 / out.phi_min) * u + 0.5 * u * u;
    }
    return v;
  };
  const double J_R1 = J(out.R1);

  if (general) {
    out.lambda = 0.5 * out.phi_min / (out.R1 * out.R1);
  } else {
    out.lambda = 1.0 / J_R1;
  }
  out.prefactor = 2.0 / out.phi_min;

  auto g = [&](double r) { return 1.0 - 0.5 * J(std::min(r, out.R1)) / J_R1; };
  const int npts = 65;
  out.D.reserve(npts);
  double acc = 0.0, prev = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double r = 2.0 * out.R1 * i / (npts - 1.0);
    if (i > 0)
      acc += integrate_split([&](double ss) { return phi(ss) * g(ss); }, prev, r, kinks,
                             1e-10);
    out.D.emplace_back(r, acc);
    prev = r;
  }
  return out;
}

}  // namespace

EberleRate eberle_rate(const std::function<double(double)>& kappa,
                       std::optional<GeneralSigmaBounds> general) {
  return eberle_rate_impl(kappa, general, {});
}

EberleRate eberle_rate_profile(const std::vector<std::pair<double, double>>& prof,
                               std::optional<GeneralSigmaBounds> general) {
  require(prof.size() >= 2, "eberle_rate_profile: need >= 2 points");
  for (size_t i = 1; i < prof.size(); ++i)
    require(prof[i].first > prof[i - 1].first, "eberle_rate_profile: radii increasing");
  auto kappa = [prof](double r) {
    if (r <= prof.front().first) return prof.front().second;
    if (r >= prof.back().first) return prof.back().second;
    const auto it = std::lower_bound(
        prof.begin(), prof.end(), r,
        [](const std::pair<double, double>& p, double v) { return p.first < v; });
    const auto [r1, k1] = *it;
    const auto [r0, k0] = *(it - 1);
    return k0 + (k1 - k0) * (r - r0) / (r1 - r0);
  };
  std::vector<double> kinks;
  kinks.reserve(prof.size());
  for (const auto& [r,_] : prof) kinks.push_back(r);
  return eberle_rate_impl(kappa, general, kinks);
}

double eberle_poincare(const EberleRate& rate) {
  require(!rate.no_rate && rate.lambda > 0.0, "eberle_poincare: no positive rate");
  return 1.0 / (2.0 * rate.lambda);
}

double perturbation_cp_bound(double K, double M) {
  require(K > 0.0, "perturbation_cp_bound: K > 0");
  const double R1 = M / K + std::sqrt(8.0 / K);
  return R1 * R1 * std::exp(M * M / (8.0 * K));
}

// ---------------------------------------------------------------------------
// Super-convex potentials

double superconvex_Kbeta(double beta, int d) {
  require(beta >= 1.0, "superconvex_Kbeta: beta >= 1");
  require(d >= 1, "superconvex_Kbeta: d >= 1");
  if (d == 1) return 2.0 * beta * std::pow(2.0, 2.0 - 2.0 * beta);
  return 2.0 * beta * std::pow(2.0, 3.0 - 3.0 * beta);
}

CPCLSBounds superconvex_CP_CLS(double K, double beta) {
  require(K > 0.0 && beta >= 1.0, "superconvex_CP_CLS: K > 0, beta >= 1");
  const double base = std::pow(32.0 / (K * K), 1.0 / (2.0 * beta));
  const double cp = 4.0 * std::pow(36.0, (2.0 * beta - 1.0) / beta) * base;
  const double cls =
      base * (std::pow(4.0, (3.0 * beta - 2.0) / (2.0 * beta - 1.0)) *
                  std::pow(36.0, (beta - 1.0) / beta) +
              8.0 * std::pow(36.0, (2.0 * beta - 1.0) / beta));
  return {cp, cls};
}

CPCLSBounds lack_CP_CLS(double K, double beta) {
  require(K > 0.0 && beta >= 1.0, "lack_CP_CLS: K > 0, beta >= 1");
  const double base = std::pow(32.0 / (K * K), 1.0 / (2.0 * (beta + 1.0)));
  const double cp =
      std::max(32.0 / K, 4.0 * std::pow(36.0, (2.0 * beta + 1.0) / (beta + 1.0)) * base);
  const double cls = std::max(
      32.0 / K, base * (std::pow(4.0, (3.0 * beta + 1.0) / (2.0 * beta + 1.0)) *
                            std::pow(36.0, beta / (beta + 1.0)) +
                        8.0 * std::pow(36.0, (2.0 * beta + 1.0) / (beta + 1.0))));
  return {cp, cls};
}

WeakW2I weak_w2i(const std::function<double(double)>& alpha, double K, double I) {
  require(K > 0.0, "weak_w2i: K > 0");
  require(I >= 0.0, "weak_w2i: I >= 0");
  const double target = 8.0 * I / (K * K);
  auto G = [&](double eps) {
    const double a = alpha(eps);
    return eps * a * a;
  };
  double F = 0.0;
  if (target > 0.0) {
    double hi = 1.0;
    int guard = 0;
    while (G(hi) < target) {
      hi *= 2.0;
      require(++guard < 200, "weak_w2i: alpha degenerate, cannot invert");
    }
    F = num::bisect([&](double e) { return G(e) - target; }, 0.0, hi, 1e-13);
  }
  return {2.0 * F, 2.0 * std::sqrt(I * F)};
}

// ---------------------------------------------------------------------------
// Decay formulas

double decay_bound(DecayKind kind, const DecayParams& p) {
  switch (kind) {
    case DecayKind::PolynomialSuperconvex: {
      require(p.beta >= 1.0, "decay: beta >= 1");
      const double eta0 = p.r0 * p.r0;
      if (p.beta == 1.0) return eta0 * std::exp(-p.K * p.t);
      const double denom = 1.0 + p.K * (p.beta - 1.0) *
                                     std::pow(eta0, p.beta - 1.0) * p.t;
      return eta0 * std::pow(1.0 / denom, 1.0 / (p.beta - 1.0));
    }
    case DecayKind::AlphaEpsilon:
      return p.eta0 * std::exp(-p.K * p.alpha_eps * p.t) + p.eps;
    case DecayKind::ReverseGradient:
      require(p.t > 0.0, "decay: t > 0");
      return 2.0 / std::sqrt(2.0 * kPi * p.t) * p.f_sup;
    case DecayKind::OuHitting: {
      require(p.t > 0.0 && p.lambda > 0.0, "decay: t, lambda > 0");
      const double el = std::exp(-p.t * p.lambda);
      return std::sqrt(p.lambda) * std::exp(-0.5 * p.t * p.lambda) /
             (std::sqrt(2.0 * kPi) * std::sqrt(1.0 - el)) * p.r;
    }
    case DecayKind::VarianceDecay:
      require(p.K > 0.0, "decay: K > 0");
      return p.M / (2.0 * p.K) * std::exp(-p.K * p.t);
    case DecayKind::EntropyDecay:
      require(p.K > 0.0, "decay: K > 0");
      return p.c * p.M / p.K * std::exp(-p.K * p.t);
    case DecayKind::MixedCommutation: {
      require(p.q > 0.5 && p.phi_min > 0.0, "decay: q > 1/2, phi_min > 0");
      const double inv2q = 1.0 / (2.0 * p.q);
      return p.c_n * std::pow(2.0 / p.phi_min, inv2q) *
             std::exp(((1.0 - inv2q) * p.L - p.lambda * inv2q) * p.t);
    }
  }
  throw SldError("decay_bound: unknown kind");
}

// ---------------------------------------------------------------------------
// Time-dependent curvature

double nonhomogeneous_t2(const std::function<double(double)>& Kfun,
                         const std::function<double(double)>& lambda,
                         const std::function<double(double)>& lambda_prime,
                         double T, double C_T0) {
  require(T >= 0.0 && !std::isinf(T), "nonhomogeneous_t2: finite T >= 0");
  require(std::abs(Kfun(0.0)) < 1e-14 && std::abs(lambda(0.0)) < 1e-14,
          "nonhomogeneous_t2: K(0) = lambda(0) = 0 required");
  if (T == 0.0) return C_T0;
  for (int i = 1; i <= 8; ++i) {
    require(lambda_prime(T * i / 8.0) > 0.0, "nonhomogeneous_t2: lambda' must be > 0");
  }
  const double head = std::exp(-Kfun(T) + lambda(T));
  const double integral = num::integrate(
      [&](double s) { return std::exp(Kfun(s) - lambda(s)) / lambda_prime(s); }, 0.0, T);
  return 4.0 * head * integral + C_T0 * head;
}

std::function<double(double)> linear_lambda(double slope) {
  return [slope](double t) { return slope * t; };
}

// ---------------------------------------------------------------------------
// McKean-Vlasov / kinetic

double mckean_rate(double K_V, double K_W, std::optional<SigmaVariant> variant,
                   bool matched_means_V0) {
  if (matched_means_V0) return K_W;
  double rate = K_V + std::min(K_W, 0.0);
  if (variant) rate -= variant->r * (1.0 + 4.0 * variant->l * variant->l);
  return rate;
}

namespace {

// Decay rate of N under d/dt (dx, dv) = (dv, -H dx - dv): largest K with
// A^T P + P A <= -K P, i.e. -lambda_max of the P-pencil. P=[[a,b/2],[b/2,1]].
double kinetic_rate_for(double a, double b, double H) {
  // m = A^T P + P A for A = [[0,1],[-H,-1]]
  const double m00 = -b * H;
  const double m01 = a - 0.5 * b - H;
  const double m11 = b - 2.0;
  // generalized eigenvalues of (m, P): det(m - t P) = 0
  const double detP = a - 0.25 * b * b;
  if (detP <= 0.0) return -kInf;
  const double A2 = detP;
  const double B2 = -(m00 * 1.0 + m11 * a - 2.0 * m01 * 0.5 * b);
  const double C2 = m00 * m11 - m01 * m01;
  const double disc = std::max(0.0, B2 * B2 - 4.0 * A2 * C2);
  const double tmax = (-B2 + std::sqrt(disc)) / (2.0 * A2);
  return -tmax;
}

double kinetic_rate(double a, double b, double delta) {
  // the pencil eigenvalue is convex in the (affine-in-H) matrix, so the worst
  // Hessian is at an endpoint of [2-delta, 2+delta]
  return std::min(kinetic_rate_for(a, b, 2.0 - delta),
                  kinetic_rate_for(a, b, 2.0 + delta));
}

}  // namespace

KineticContraction kinetic_contraction_search(double delta) {
  require(delta >= 0.0, "kinetic_contraction_search: delta >= 0");
  KineticContraction best;
  best.K = -kInf;
  double a_lo = 0.1, a_hi = 10.0;
  double b_frac_lo = 0.0, b_frac_hi = 0.999;
  const int na = 49, nb = 33;
  for (int round = 0; round < 6; ++round) {
    double ba = best.a, bb = best.b;
    for (int i = 0; i < na; ++i) {
      const double a = a_lo * std::pow(a_hi / a_lo, i / (na - 1.0));
      for (int j = 0; j < nb; ++j) {
        const double frac = b_frac_lo + (b_frac_hi - b_frac_lo) * j / (nb - 1.0);
        const double b = frac * 2.0 * std::sqrt(a);  // keeps b^2 < 4a
        const double K = kinetic_rate(a, b, delta);
        if (K > best.K) {
          best = {a, b, K, K > 0.0};
        }
      }
    }
    if (round == 0 && !(best.K > -kInf)) break;
    // shrink the window around the current best
    const double fa = std::sqrt(a_hi / a_lo);
    a_lo = best.a / std::pow(fa, 0.5);
    a_hi = best.a * std::pow(fa, 0.5);
    const double bf = best.b / (2.0 * std::sqrt(best.a));
    const double w = 0.35 * (b_frac_hi - b_frac_lo);
    b_frac_lo = std::max(0.0, bf - w);
    b_frac_hi = std::min(0.999999, bf + w);
    (void)ba;
    (void)bb;
  }
  best.found = best.K > 0.0;
  if (!best.found) best = KineticContraction{};
  return best;
}

// ---------------------------------------------------------------------------
// Convolution / scaling

ConvolutionBounds convolution_constants(double lambda, double C_X, double C_Y,
                                        IneqKind kind) {
  require(lambda >= 0.0 && lambda <= 1.0, "convolution_constants: lambda in [0,1]");
  require(C_X >= 0.0 && C_Y >= 0.0, "convolution_constants: constants >= 0");
  require(kind == IneqKind::Poincare || kind == IneqKind::LogSobolev,
          "convolution_constants: kind P or LS");
  return {lambda * C_X + (1.0 - lambda) * C_Y,
          std::max(0.0, lambda * C_X - (1.0 - lambda) * C_Y)};
}

double prekopa_curvature(double K, double lambda) {
  const double denom = lambda + K * (1.0 - lambda);
  require(denom > 0.0, "prekopa_curvature: lambda + K(1-lambda) > 0");
  return K / denom;
}

double weak_poincare_alpha(const std::function<double(double)>& c, double s) {
  require(s > 0.0, "weak_poincare_alpha: s > 0");
  const double c0 = c(0.0);
  require(c0 > 0.0, "weak_poincare_alpha: c(0) > 0");
  auto c_inv = [&](double v) {
    if (v >= c0) return 0.0;
    double hi = 1.0;
    while (c(hi) > v) {
      hi *= 2.0;
      if (hi > 1e300) {
        // The inverse sits beyond the representable range: genuine stagnation
        // is an error, slow-but-real decay just drops out of the infimum.
        require(c(hi) < 0.5 * c0, "weak_poincare_alpha: c does not decay to 0");
        return kInf;
      }
    }
    return num::bisect([&](double t) { return c(t) - v; }, 0.0, hi, 1e-12);
  };
  auto h = [&](double log_u) {
    const double u = std::exp(log_u);
    // Evaluate the argument in log space; beyond the double range the
    // inverse is not representable, so exclude that tail from the infimum.
    const double log_v = log_u + 1.0 - u / s;
    if (log_v < -690.0) return kInf;
    return c_inv(std::exp(log_v)) / u;
  };
  // coarse bracket over log u, then golden-section inside it
  const double lo = std::log(1e-8 * std::min(1.0, s));
  const double hi = std::log(1e4 * std::max(1.0, s));
  const int n = 96;
  int ibest = 0;
  double fbest = kInf;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1.0);
    const double f = h(x);
    if (f < fbest) {
      fbest = f;
      ibest = i;
    }
  }
  const double step = (hi - lo) / (n - 1.0);
  const double a = lo + step * std::max(0, ibest - 1);
  const double b = lo + step * std::min(n - 1, ibest + 1);
  const double xmin = num::golden_min(h, a, b, 1e-12);
  return s * std::min(fbest, h(xmin));
}

}  // namespace sld::constants
