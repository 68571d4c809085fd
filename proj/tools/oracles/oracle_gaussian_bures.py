#!/usr/bin/env python3
"""Closed-form Gaussian W2 oracle via scipy's matrix square root.

W2^2 = |m1-m2|^2 + tr(C1) + tr(C2) - 2 tr( (C1^{1/2} C2 C1^{1/2})^{1/2} )

Case frozen into tests/test_transport.cpp (2-d, correlated):
  m1 = (0, 0),   C1 = [[2.0, 0.5], [0.5, 1.0]]
  m2 = (1, -1),  C2 = [[1.0, -0.3], [-0.3, 0.5]]
"""
import numpy as np
from scipy.linalg import sqrtm

m1 = np.array([0.0, 0.0])
C1 = np.array([[2.0, 0.5], [0.5, 1.0]])
m2 = np.array([1.0, -1.0])
C2 = np.array([[1.0, -0.3], [-0.3, 0.5]])

r1 = sqrtm(C1)
cross = sqrtm(r1 @ C2 @ r1)
w2sq = float(np.sum((m1 - m2) ** 2) + np.trace(C1) + np.trace(C2) - 2.0 * np.trace(cross))
print(f"W2(gaussian) = {np.sqrt(w2sq):.17g}")
