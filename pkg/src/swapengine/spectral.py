"""Characteristic function, higher moments and the exact work/heat law.

Every stochastic quantity of the cycle is a function of one integer: the
number ``k`` of excitation quanta that the swap moves from A to B. With
probability ``cos^2(theta)`` nothing moves (``k = 0``); otherwise
``k = n - m`` with ``n``, ``m`` drawn from the two Gibbs states. Then

    Q_H = k * omega_a,   W = -k * (omega_a - omega_b),   Q_C = -k * omega_b.

The lattice index used throughout is this ``k`` (so ``Q_H = k omega_a``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    EngineParams,
    MomentSet,
    entropy_production,
    mean_heat_hot,
    occupation_gap,
    mean_work,
    occupation_variance,
    partition_function,
)

__all__ = [
    "PROB_FLOOR",
    "CountingPoint",
    "FluctuationCheck",
    "WorkHeatDistribution",
    "characteristic_function",
    "characteristic_function_sinh",
    "efficiency_is_nonfluctuating",
    "excitation_second_moment",
    "joint_distribution",
    "moment_set",
    "moments_from_chi",
    "second_moment_work",
    "second_moment_work_coth",
    "snr_f",
    "snr_f_coth",
    "snr_identity_rhs",
    "verify_detailed_ft",
]

PROB_FLOOR = 1e-300
MAX_MOMENT_ORDER = 4


@dataclass(frozen=True)
class CountingPoint:
    """Counting parameters for work (``lam``) and hot-bath heat (``mu``)."""

    lam: complex
    mu: complex

    def xi(self, params: EngineParams) -> complex:
        return (params.omega_a - params.omega_b) * self.lam - params.omega_a * self.mu


def _geometric_sum(z, d):
    """sum_{n<d} exp(-n z) for complex z, continuous through z = 2 pi i k."""
    z = np.asarray(z, dtype=complex)
    den = np.expm1(-z)
    near = np.abs(den) < 1e-6
    safe = np.where(near, 1.0, den)
    out = np.expm1(-d * z) / safe
    if np.any(near):
        n = np.arange(d)
        zn = z[near]
        out[near] = np.exp(-np.multiply.outer(zn, n)).sum(axis=-1)
    return out


def characteristic_function(params: EngineParams, lam, mu):
    """chi(lam, mu) = <exp(i lam W + i mu Q_H)>.

    Accepts complex (and array) arguments, which is what the fluctuation
    identities need. Uses the geometric-sum form, so there are no removable
    singularities to step around.
    """
    xi = (params.omega_a - params.omega_b) * np.asarray(lam, dtype=complex) - params.omega_a * np.asarray(
        mu, dtype=complex
    )
    d = params.d
    za = params.x_a + 1j * xi
    zb = params.x_b - 1j * xi
    zz = partition_function(params.x_a, d) * partition_function(params.x_b, d)
    out = params.cos2 + params.sin2 * _geometric_sum(za, d) * _geometric_sum(zb, d) / zz
    return out[()]


def characteristic_function_sinh(params: EngineParams, lam, mu):
    """The same function as a ratio of hyperbolic sines (cross-check path)."""
    xi = (params.omega_a - params.omega_b) * np.asarray(lam, dtype=complex) - params.omega_a * np.asarray(
        mu, dtype=complex
    )
    d, xa, xb = params.d, params.x_a, params.x_b
    num = np.sinh(xa / 2) * np.sinh(xb / 2) * np.sinh(d / 2 * (xa + 1j * xi)) * np.sinh(d / 2 * (xb - 1j * xi))
    den = np.sinh(d * xa / 2) * np.sinh(d * xb / 2) * np.sinh((xa + 1j * xi) / 2) * np.sinh((xb - 1j * xi) / 2)
    return (params.cos2 + params.sin2 * num / den)[()]


def excitation_second_moment(x_a, x_b, d):
    """E[(n - m)^2] for independent Gibbs excitation numbers n, m.

    Written ``var_A + var_B + (N_A - N_B)^2``; multiplied by
    ``sin^2(theta) (omega_b - omega_a)^2`` it gives <W^2>.
    """
    dn = occupation_gap(x_a, x_b, d)
    return occupation_variance(x_a, d) + occupation_variance(x_b, d) + dn * dn


def second_moment_work(params: EngineParams) -> float:
    """<W^2> = sin^2(theta) (omega_b - omega_a)^2 E[(n - m)^2]."""
    s = excitation_second_moment(params.x_a, params.x_b, params.d)
    return float(params.sin2 * (params.omega_b - params.omega_a) ** 2 * s)


def _coth_braces(x, y, d):
    a, b = 1 / np.tanh(x / 2), 1 / np.tanh(y / 2)
    A, B = 1 / np.tanh(d * x / 2), 1 / np.tanh(d * y / 2)
    return d * d - 1 + a * a + b * b - a * b - d * (a - b) * (A - B) - d * d * A * B


def second_moment_work_coth(params: EngineParams) -> float:
    """<W^2> in the expanded hyperbolic-cotangent form.

    Loses precision when beta*omega is small (the coth^2 terms cancel);
    kept as an independent cross-check of :func:`second_moment_work`.
    """
    braces = _coth_braces(params.x_a, params.x_b, params.d)
    return float(0.5 * params.sin2 * (params.omega_b - params.omega_a) ** 2 * braces)


def snr_f(x, y, d):
    """The function f(x, y, d) entering the exact inverse-SNR identity.

    ``var(W)/<W>^2 = (y - x) f(x, y, d) / <Sigma> - 1`` with x = beta_a
    omega_a and y = beta_b omega_b. Evaluated as E[(n-m)^2] / (N_A - N_B),
    which is the coth expression with its common factor 2 cancelled.
    """
    dn = occupation_gap(x, y, d)
    return excitation_second_moment(x, y, d) / dn


def snr_f_coth(x, y, d):
    a, b = 1 / np.tanh(x / 2), 1 / np.tanh(y / 2)
    A, B = 1 / np.tanh(d * x / 2), 1 / np.tanh(d * y / 2)
    return _coth_braces(x, y, d) / (a - b - d * (A - B))


def snr_identity_rhs(params: EngineParams) -> float:
    """(beta_b omega_b - beta_a omega_a) f / <Sigma> - 1, i.e. var(W)/<W>^2."""
    sigma = entropy_production(params)
    if sigma == 0 or mean_work(params) == 0:
        raise ZeroDivisionError("inverse SNR undefined: <W> = 0")
    return float((params.x_b - params.x_a) * snr_f(params.x_a, params.x_b, params.d) / sigma - 1)


def moment_set(params: EngineParams) -> MomentSet:
    d, xa, xb = params.d, params.x_a, params.x_b
    dn = float(occupation_gap(xa, xb, d))
    k_mean = params.sin2 * dn
    # var(k) for k = (swap ? n - m : 0), written without cancellation
    var_k = float(
        params.sin2 * (occupation_variance(xa, d) + occupation_variance(xb, d)) + params.sin2 * params.cos2 * dn * dn
    )
    dw = params.omega_a - params.omega_b
    # same expressions as mean_work, mean_heat_* and entropy_production
    return MomentSet(
        mean_w=float(params.sin2 * (params.omega_b - params.omega_a) * dn),
        mean_qh=params.omega_a * k_mean,
        mean_qc=-params.omega_b * k_mean,
        var_w=dw * dw * var_k,
        var_qh=params.omega_a**2 * var_k,
        cov_w_qh=-dw * params.omega_a * var_k,
        entropy_production=float((xb - xa) * k_mean),
    )


@dataclass(frozen=True)
class WorkHeatDistribution:
    """Exact law of the lattice index k, Q_H = k omega_a, W = -k (omega_a - omega_b).

    The joint law of (W, Q_H) is supported on the anti-diagonal, so this
    one-dimensional array is the whole joint distribution.
    """

    params: EngineParams
    support: np.ndarray
    prob: np.ndarray = field(repr=False)

    @property
    def work(self) -> np.ndarray:
        return -self.support * (self.params.omega_a - self.params.omega_b)

    @property
    def heat_hot(self) -> np.ndarray:
        return self.support * self.params.omega_a

    @property
    def heat_cold(self) -> np.ndarray:
        return -self.support * self.params.omega_b

    def p(self, k: int) -> float:
        d = self.params.d
        if abs(k) > d - 1:
            return 0.0
        return float(self.prob[k + d - 1])

    def joint(self, m: int, n: int) -> float:
        """p[W = m (omega_a - omega_b), Q_H = n omega_a]."""
        return self.p(n) if m == -n else 0.0

    def expect(self, values) -> float:
        return float(np.dot(self.prob, values))

    def moment(self, l: int, s: int) -> float:
        """<W^l Q_H^s> by direct summation."""
        return self.expect(self.work.astype(float) ** l * self.heat_hot.astype(float) ** s)

    def mean_var(self, values) -> tuple[float, float]:
        values = np.asarray(values, dtype=float)
        mean = self.expect(values)
        return mean, self.expect((values - mean) ** 2)


def joint_distribution(params: EngineParams) -> WorkHeatDistribution:
    """Closed-form probability of each lattice point k in [-(d-1), d-1].

    p(k) = delta_{k0} cos^2(theta) + sin^2(theta)/(Z_A Z_B) *
    (1 - e^{-(d-|k|)(x+y)})/(1 - e^{-(x+y)}) * (e^{-x k} if k >= 0 else e^{-y|k|})
    """
    d, x, y = params.d, params.x_a, params.x_b
    k = np.arange(-(d - 1), d)
    ak = np.abs(k)
    s = x + y
    tail = np.expm1(-(d - ak) * s) / np.expm1(-s)
    boltz = np.where(k >= 0, np.exp(-x * ak), np.exp(-y * ak))
    zz = partition_function(x, d) * partition_function(y, d)
    prob = params.sin2 * tail * boltz / zz
    prob[d - 1] += params.cos2
    prob.setflags(write=False)
    k.setflags(write=False)
    return WorkHeatDistribution(params=params, support=k, prob=prob)


def moments_from_chi(params: EngineParams, l: int, s: int) -> float:
    """<W^l Q_H^s> for l + s <= 4.

    Orders up to two come from closed forms; three and four are summed over
    the exact distribution. No numerical differentiation.
    """
    if l < 0 or s < 0:
        raise ValueError("moment orders must be non-negative")
    order = l + s
    if order > MAX_MOMENT_ORDER:
        raise OverflowError(f"moment order {order} exceeds {MAX_MOMENT_ORDER}")
    if order == 0:
        return 1.0
    wa = params.omega_a
    dw = params.omega_b - params.omega_a  # W = dw * k
    if order == 1:
        return mean_work(params) if l == 1 else mean_heat_hot(params)
    if order == 2:
        k2 = params.sin2 * float(excitation_second_moment(params.x_a, params.x_b, params.d))
        return dw**l * wa**s * k2
    return joint_distribution(params).moment(l, s)


@dataclass(frozen=True)
class FluctuationCheck:
    max_deviation: float
    slope: float
    checked: tuple
    skipped: tuple

    @property
    def underflow(self) -> bool:
        return bool(self.skipped)


def verify_detailed_ft(params: EngineParams, floor: float = PROB_FLOOR) -> FluctuationCheck:
    """Largest residual of ln[p(k)/p(-k)] - (beta_b omega_b - beta_a omega_a) k.

    Lattice points where either probability is below ``floor`` are skipped
    and reported rather than compared.
    """
    dist = joint_distribution(params)
    slope = params.x_b - params.x_a
    worst = 0.0
    checked, skipped = [], []
    for k in range(1, params.d):
        p_plus, p_minus = dist.p(k), dist.p(-k)
        if p_plus <= floor or p_minus <= floor:
            skipped.append(k)
            continue
        checked.append(k)
        worst = max(worst, abs(math.log(p_plus / p_minus) - slope * k))
    return FluctuationCheck(max_deviation=worst, slope=slope, checked=tuple(checked), skipped=tuple(skipped))


def efficiency_is_nonfluctuating(params: EngineParams, rtol: float = 1e-12) -> bool:
    """True when -W/Q_H takes the single value 1 - omega_b/omega_a on the support."""
    dist = joint_distribution(params)
    nz = (dist.support != 0) & (dist.prob > 0)
    if not np.any(nz):
        return True
    ratio = -dist.work[nz] / dist.heat_hot[nz]
    target = 1 - params.omega_b / params.omega_a
    return bool(np.all(np.abs(ratio - target) <= rtol * max(1.0, abs(target))))
