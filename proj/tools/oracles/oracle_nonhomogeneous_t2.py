#!/usr/bin/env python3
"""Independent quadrature oracle for the time-dependent transport constant.

C(T) = 4 e^{-K(T)+lambda(T)} int_0^T e^{K(s)-lambda(s)} / lambda'(s) ds
       + C_T0 e^{-K(T)+lambda(T)}

with accumulated curvature K(t) (K(0)=0) and free function lambda.
Case frozen into tests/test_constants.cpp:
  K(t) = t + 0.5 sin t, lambda(t) = 0.5 t, T = 1, C_T0 = 0.5
"""
import math

from scipy.integrate import quad


def K(t):
    return t + 0.5 * math.sin(t)


def lam(t):
    return 0.5 * t


def lam_prime(_):
    return 0.5


T = 1.0
C_T0 = 0.5
head = math.exp(-K(T) + lam(T))
integral, err = quad(lambda s: math.exp(K(s) - lam(s)) / lam_prime(s), 0.0, T,
                     epsabs=1e-14, epsrel=1e-13)
value = 4.0 * head * integral + C_T0 * head
print(f"nonhomogeneous_t2(K=t+0.5 sin t, lambda=0.5t, T=1, C0=0.5) = {value:.17g}")
print(f"quadrature error estimate: {err:.3g}")
