"""
Finite-time thermalisation
==========================

Partial thermalisation shrinks the occupation gap. Power is maximal for
vanishing strokes unless the work stroke itself takes time, and the work
SNR degrades as the strokes get shorter.
"""

import math

import numpy as np

from swapengine import finite_time as ft

for tau_w in (0.0, 0.1, 1.0, 10.0):
    opt = ft.optimal_scaled_power(1.0, 1.0, tau_w)
    where = "tau_q -> 0" if opt.boundary else f"tau_q = {opt.tau_q:.4f}"
    print(f"tau_w = {tau_w:5.1f}: max scaled power {opt.power_scaled:.4f} at {where}")

base = ft.params_from_occupations(9, 3.0, 2.0)
for alpha_tau in (math.inf, 3.0, 2.0, 1.0):
    ftp = ft.FiniteTimeParams(base, 1.0, 1.0, alpha_tau)
    print(f"alpha tau_q = {alpha_tau}: SNR {1 / ft.steady_inverse_snr(ftp):.5f}")

# the cycle map converges to the closed-form limit cycle
ftp = ft.FiniteTimeParams(base, 0.7, 1.3, 0.4)
n = ft.ideal_occupations(base)
for _ in range(200):
    n = ft.recursion_step(ftp, *n)
print("iterated:", n, "closed form:", ft.steady_occupations(ftp), np.allclose(n, ft.steady_occupations(ftp)))
