#pragma once

#include <functional>

namespace sld::num {

// Adaptive Simpson quadrature with absolute-plus-relative control; the
// tolerance is interpreted relative to the accumulated integral (rel 1e-10 by
// default to support 1e-8 acceptance checks on derived rates).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, int max_depth = 48);

// Root of f on [a,b] by bisection; requires a sign change. Tolerance on the
// bracket width.
double bisect(const std::function<double(double)>& f, double a, double b,
              double x_tol = 1e-13, int max_iter = 200);

// Minimize a unimodal-ish scalar function by golden-section; returns argmin.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double x_tol = 1e-11, int max_iter = 300);

// (1 - exp(-x)) / x with the series branch near 0 (used by every flow constant
// so that K -> 0 limits are exact replacements, not 0/0).
double expm1_ratio(double x);

}  // namespace sld::num
