"""
Sampling the two-point measurement
==================================

Draw a million TPM trajectories and compare with the closed forms.
"""

import math

import swapengine as se

p = se.EngineParams(4, 1.0, 0.6, 0.5, 1.0, math.pi / 3)
stats = se.sample(p, 1_000_000, seed=20240601)
exact = se.joint_distribution(p).prob
z = stats.lattice_z_scores(exact)
print("largest |z| over the lattice:", abs(z).max())

for name in ("W", "Q_H", "Sigma", "exp(-Sigma)"):
    mean, err = stats.estimate(name)
    print(f"<{name}> = {mean:.5f} +- {err:.5f}")
print("off-antidiagonal outcomes:", stats.off_antidiagonal_count)
