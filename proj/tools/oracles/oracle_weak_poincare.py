#!/usr/bin/env python3
"""Dense-grid oracle for the weak Poincare rate

  alpha(s) = s inf_{u>0} (1/u) c^{-1}(u e^{1-u/s})

for decreasing decay functions c. Values of c above c(0) invert to 0.
Cases frozen into tests/test_constants.cpp:
  c(t) = e^{-t},  s in {0.5, 2}
  c(t) = (1+t)^{-2}, s = 1
"""
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar


def alpha(c, s):
    c0 = c(0.0)

    def c_inv(v):
        if v >= c0:
            return 0.0
        hi = 1.0
        while c(hi) > v:
            hi *= 2.0
        return brentq(lambda t: c(t) - v, 0.0, hi, xtol=1e-14)

    def h(log_u):
        u = math.exp(log_u)
        log_v = log_u + 1.0 - u / s
        if log_v < -690.0:  # argument under double range: excluded tail
            return math.inf
        return c_inv(math.exp(log_v)) / u

    grid = np.linspace(math.log(1e-9), math.log(1e6), 4001)
    vals = [h(x) for x in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(0, i - 2)], grid[min(len(grid) - 1, i + 2)]
    res = minimize_scalar(h, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13})
    return s * min(min(vals), res.fun)


for name, c, ss in [("exp(-t)", lambda t: math.exp(-t), [0.5, 2.0]),
                    ("(1+t)^-2", lambda t: (1.0 + t) ** -2, [1.0])]:
    for s in ss:
        print(f"alpha(c={name}, s={s}) = {alpha(c, s):.17g}")
