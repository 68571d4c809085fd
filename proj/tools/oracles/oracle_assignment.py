#!/usr/bin/env python3
"""scipy.optimize.linear_sum_assignment oracle for the exact-assignment solver.

Reproduces the library's counter-based generator bit-for-bit (three chained
SplitMix64-style rounds) so the C++ test can rebuild the identical cost
matrix: cost[i][j] = u01(seed=0x5eed, stream=i, counter=j), n = 64.
Frozen value: the optimal total cost.
"""
import numpy as np
from scipy.optimize import linear_sum_assignment

MASK = (1 << 64) - 1


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return (z ^ (z >> 31)) & MASK


def word(seed, stream, counter):
    z = mix64((seed + 0x9E3779B97F4A7C15 * (stream + 1)) & MASK)
    z = mix64((z + 0xD1B54A32D192ED03 * (counter + 1)) & MASK)
    return mix64(z ^ 0x8CB92BA72F3D8DD7)


def u01(seed, stream, counter):
    return (float(word(seed, stream, counter) >> 11) + 0.5) * 2.0 ** -53


n = 64
seed = 0x5EED
cost = np.array([[u01(seed, i, j) for j in range(n)] for i in range(n)])
rows, cols = linear_sum_assignment(cost)
total = cost[rows, cols].sum()
print(f"n={n} seed={seed:#x} optimal_total_cost = {total:.17g}")
