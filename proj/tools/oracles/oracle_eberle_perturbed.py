#!/usr/bin/env python3
"""Independent scipy quadrature for the reflection-coupling rate of the
convex-outside-a-ball profile kappa(r) = K - M/r with K = M = 1.

Definitions (identity diffusion, exponent constant 1/4):
  R0 = inf{R: kappa(r) >= 0 for r >= R}
  R1 = inf{R >= R0: kappa(r) >= 8/(R(R-R0)) for r >= R}
  phi(r) = exp(-1/4 int_0^r s kappa^-(s) ds)
  Phi(r) = int_0^r phi
  1/lambda = int_0^{R1} Phi/phi
Frozen values: lambda and phi_min = phi(R0).
"""
import math

from scipy.integrate import quad
from scipy.optimize import brentq

K, M = 1.0, 1.0


def kappa(r):
    return K - M / max(r, 1e-300)


R0 = M / K  # kappa(R0) = 0

# kappa is increasing, so the binding constraint for R1 is at r = R:
# kappa(R) = 8 / (R (R - R0)).
R1 = brentq(lambda R: kappa(R) - 8.0 / (R * (R - R0)), R0 + 1e-9, 100.0, xtol=1e-13)


def neg_part_integral(r):
    # int_0^r s kappa^-(s) ds with kappa^-(s) = max(0, M/s - K) for s <= R0
    up = min(r, R0)
    val, _ = quad(lambda s: s * max(0.0, -kappa(s)), 0.0, up, epsabs=1e-14, epsrel=1e-13)
    return val


def phi(r):
    return math.exp(-0.25 * neg_part_integral(r))


phi_min = phi(R0)


def Phi(r):
    val, _ = quad(phi, 0.0, r, epsabs=1e-13, epsrel=1e-12)
    return val


inv_lambda, _ = quad(lambda r: Phi(r) / phi(r), 0.0, R1, epsabs=1e-12, epsrel=1e-11)
print(f"R0 = {R0:.17g}")
print(f"R1 = {R1:.17g}")
print(f"phi_min = {phi_min:.17g}")
print(f"lambda = {1.0 / inv_lambda:.17g}")
