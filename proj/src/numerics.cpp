#include "sld/numerics.hpp"

#include <cmath>
#include <cstdlib>

#include "sld/common.hpp"

namespace sld::num {

namespace {

double simpson(double fa, double fm, double fb, double h6) {
  return h6 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa,
             double fm, double fb, double whole, double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  // A NaN/inf sample would fail every tolerance test and force full-depth
  // subdivision everywhere; fail loudly instead.
  require(std::isfinite(flm) && std::isfinite(frm), "integrate: non-finite integrand value");
  const double left = simpson(fa, flm, fm, (m - a) / 6.0);
  const double right = simpson(fm, frm, fb, (b - m) / 6.0);
  const double delta = left + right - whole;
  if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  require(std::isfinite(fa) && std::isfinite(fm) && std::isfinite(fb),
          "integrate: non-finite integrand value");
  const double whole = simpson(fa, fm, fb, (b - a) / 6.0);
  // Scale the absolute tolerance by a coarse magnitude estimate; floor keeps
  // integrals that are genuinely zero from demanding infinite refinement.
  const double scale = std::max({std::abs(whole), std::abs(b - a) * 1e-30, 1e-300});
  return adapt(f, a, b, fa, fm, fb, whole, rel_tol * scale, 0, max_depth);
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double x_tol, int max_iter) {
  double fa = f(a), fb = f(b);
  require(fa == 0.0 || fb == 0.0 || (fa < 0) != (fb < 0),
          "bisect: no sign change on bracket");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  for (int i = 0; i < max_iter && (b - a) > x_tol * (1.0 + std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double x_tol, int max_iter) {
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > x_tol * (1.0 + std::abs(a)); ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

double expm1_ratio(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x / 2.0 + x * x / 6.0;
  }
  return -std::expm1(-x) / x;
}

}  // namespace sld::num
