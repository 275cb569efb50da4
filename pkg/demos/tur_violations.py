"""
Where the standard TUR fails
============================

The standard bound var/mean^2 >= 2/<Sigma> is broken by these engines,
most strongly for qubits with a nearly infinite-temperature hot bath.
The relaxed bound with the extra -1 is never broken.
"""

import math

import numpy as np

from swapengine import analysis

y, ratio = analysis.strongest_violation(d=2, theta=math.pi / 2, x_a=1e-4)
print(f"strongest violation: ratio {ratio:.4f} at beta_b omega_b = {y:.4f}")

for d in (2, 3, 4, 6, 16, 64):
    n = analysis.violation_count(d, math.pi / 2, (200, 1e-2, 10.0))
    print(f"d = {d:3d}: {n:6d} of 40000 grid points violate the standard bound")

xs = np.geomspace(1e-3, 1e2, 200)
for d in (2, 8, 32):
    print(f"d = {d:2d}: min (y - x) f(x, y, d) = {analysis.f_bound_scan(d, xs, xs):.10f}")
