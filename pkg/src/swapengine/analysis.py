"""Uncertainty relations, efficiency bounds and maximum-work searches.

Most functions here work directly in the dimensionless products
``x = beta_a omega_a`` and ``y = beta_b omega_b``: the inverse
signal-to-noise ratio of the work and the entropy production depend on the
level spacings only through them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._golden import golden_section
from .engine import (
    EngineParams,
    Regime,
    carnot_efficiency,
    classify_regime,
    curzon_ahlborn_efficiency,
    occupation_gap,
    occupation_variance,
)
from .spectral import moment_set, second_moment_work, snr_f

__all__ = [
    "VIOLATION_GRID",
    "MaxWorkResult",
    "TurCheck",
    "TurScanResult",
    "efficiency_at_max_work",
    "efficiency_bound_check",
    "f_bound_scan",
    "inverse_snr",
    "iter_tur_grid",
    "strongest_violation",
    "tur_bound_check",
    "tur_ratio",
    "tur_scan",
    "ultimate_snr_limit",
    "violation_count",
    "work_per_cold_temperature",
]

# points, lower and upper limit of the log-grid used to measure the
# standard-TUR violation region
VIOLATION_GRID = (400, 1e-2, 1e1)


def inverse_snr(x, y, d, theta):
    """var(W)/<W>^2 as a function of (x, y, d, theta); broadcasts."""
    s = np.sin(theta) ** 2
    c = np.cos(theta) ** 2
    dn = occupation_gap(x, y, d)
    v = occupation_variance(x, d) + occupation_variance(y, d)
    return v / (s * dn * dn) + c / s


def tur_ratio(x, y, d, theta):
    """var(W) <Sigma> / <W>^2; the standard TUR asks for >= 2. Broadcasts."""
    c = np.cos(theta) ** 2
    dn = occupation_gap(x, y, d)
    v = occupation_variance(x, d) + occupation_variance(y, d)
    return (np.asarray(y) - np.asarray(x)) * (v / dn + c * dn)


@dataclass(frozen=True)
class TurCheck:
    lhs: float
    """var(W)/<W>^2"""
    rhs: float
    """2/<Sigma> - 1"""
    standard_violation: bool
    ratio: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - 1e-10 * max(1.0, abs(self.rhs))


def tur_bound_check(params: EngineParams) -> TurCheck:
    """Compare var(W)/<W>^2 with 2/<Sigma> - 1 and with the standard 2/<Sigma>."""
    ms = moment_set(params)
    if ms.mean_w == 0 or ms.entropy_production == 0:
        raise ZeroDivisionError("TUR undefined at zero average work")
    lhs = ms.var_w / ms.mean_w**2
    sigma = ms.entropy_production
    return TurCheck(lhs=lhs, rhs=2 / sigma - 1, standard_violation=lhs < 2 / sigma, ratio=lhs * sigma)


@dataclass(frozen=True)
class TurScanResult:
    d: int
    theta: float
    xs: np.ndarray
    ys: np.ndarray
    violation_count: int
    min_ratio: float
    argmin: tuple
    bound_failures: int
    """Points where the relaxed bound var/<W>^2 >= 2/<Sigma> - 1 fails."""


def iter_tur_grid(d, theta, xs, ys) -> Iterator[dict]:
    """Yield one row of the (x, y) grid at a time, x fixed per row."""
    ys = np.asarray(ys, dtype=float)
    s = math.sin(theta) ** 2
    for x in xs:
        dn = occupation_gap(x, ys, d)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = tur_ratio(x, ys, d, theta)
            sigma = (ys - x) * s * dn
            snr = 1 / inverse_snr(x, ys, d, theta)
        yield {"x": float(x), "y": ys, "ratio": ratio, "sigma": sigma, "snr": snr}


def tur_scan(d: int, theta: float, xs, ys) -> TurScanResult:
    """Standard-TUR violations (ratio < 2) on a grid; x == y points are skipped."""
    count = 0
    failures = 0
    best = (math.inf, None)
    for row in iter_tur_grid(d, theta, xs, ys):
        ok = row["y"] != row["x"]
        ratio = row["ratio"][ok]
        count += int(np.count_nonzero(ratio < 2))
        # relaxed bound multiplied through by <Sigma> > 0: ratio >= 2 - Sigma
        failures += int(np.count_nonzero(ratio < 2 - row["sigma"][ok] - 1e-10 * np.maximum(1, ratio)))
        if ratio.size:
            i = int(np.argmin(ratio))
            if ratio[i] < best[0]:
                best = (float(ratio[i]), (row["x"], float(row["y"][ok][i])))
    return TurScanResult(d, theta, np.asarray(xs), np.asarray(ys), count, best[0], best[1], failures)


def violation_count(d: int, theta: float, grid=VIOLATION_GRID) -> int:
    """Number of standard-TUR violating points on the fixed log-grid."""
    points, lo, hi = grid
    xs = np.geomspace(lo, hi, points)
    return tur_scan(d, theta, xs, xs).violation_count


def strongest_violation(d=2, theta=math.pi / 2, x_a=1e-4, bracket=(0.5, 5.0), rtol=1e-10):
    """Minimise the TUR ratio over y = beta_b omega_b at fixed x = beta_a omega_a.

    Returns ``(y_opt, ratio_min)``.
    """
    res = golden_section(lambda y: float(tur_ratio(x_a, y, d, theta)), *bracket, rtol=rtol)
    return res.x, res.fun


def ultimate_snr_limit(d: int, theta: float) -> float:
    """Limit of var(W)/<W>^2 for x -> 0 and y -> infinity."""
    s = math.sin(theta) ** 2
    if d < 2:
        raise ValueError("d must be >= 2")
    if s < 1e-300:
        raise ZeroDivisionError("theta is a multiple of pi")
    c = math.cos(theta) ** 2
    return (d + 1 + 3 * (d - 1) * c) / (3 * (d - 1) * s)


def f_bound_scan(d: int, xs, ys) -> float:
    """Smallest (y - x) f(x, y, d) over a grid, x == y excluded."""
    lowest = math.inf
    ys = np.asarray(ys, dtype=float)
    for x in xs:
        y = ys[ys != x]
        if y.size:
            lowest = min(lowest, float(np.min((y - x) * snr_f(x, y, d))))
    return lowest


def efficiency_bound_check(params: EngineParams) -> tuple[float, float]:
    """Otto efficiency and the upper bound eta_C / (1 + 2 T_B <-W> / <W^2>)."""
    regime = classify_regime(params)
    if regime not in (Regime.HEAT_ENGINE, Regime.BOUNDARY):
        raise ValueError(f"efficiency bound needs a heat engine, got {regime.value}")
    eta = 1 - params.omega_b / params.omega_a
    w2 = second_moment_work(params)
    if w2 == 0:
        return eta, carnot_efficiency(params)
    extracted = -moment_set(params).mean_w
    return eta, carnot_efficiency(params) / (1 + 2 * extracted / (params.beta_b * w2))


# ---------------------------------------------------------------- max work

def work_per_cold_temperature(eta, x, d, tb_over_ta, theta=math.pi / 2):
    """|<W>|/T_B at Otto efficiency ``eta`` and ``x = beta_b omega_b / 2``.

    With T_B = 1: omega_b = 2x, omega_a = 2x/(1 - eta), beta_a = T_B/T_A.
    """
    eta = np.asarray(eta, dtype=float)
    x = np.asarray(x, dtype=float)
    y = 2 * x
    xa = y * tb_over_ta / (1 - eta)
    gap = occupation_gap(xa, y, d)
    return math.sin(theta) ** 2 * y * eta / (1 - eta) * gap


@dataclass(frozen=True)
class MaxWorkResult:
    d: int
    tb_over_ta: float
    theta: float
    eta_m: float
    eta_ca: float
    eta_c: float
    x_opt: float
    """beta_b omega_b / 2 at the optimum"""
    work_max: float
    """|<W>| at the optimum in units of T_B"""
    converged: bool
    at_bound: bool


def efficiency_at_max_work(
    d: int,
    tb_over_ta: float,
    theta: float = math.pi / 2,
    x_range=(1e-6, 50.0),
    grid: int = 200,
    rtol: float = 1e-8,
) -> MaxWorkResult:
    """Otto efficiency at which |<W>| is largest for fixed bath temperatures.

    A ``grid x grid`` pre-scan over (eta, log x) locates the basin; nested
    golden-section searches (eta outside, log x inside) then refine it.
    """
    if not 0 < tb_over_ta < 1:
        raise ValueError("tb_over_ta must lie in (0, 1)")
    eta_c = 1 - tb_over_ta
    lx_lo, lx_hi = math.log(x_range[0]), math.log(x_range[1])
    etas = np.linspace(0, eta_c, grid + 2)[1:-1]
    lxs = np.linspace(lx_lo, lx_hi, grid)

    def inner(eta):
        vals = work_per_cold_temperature(eta, np.exp(lxs), d, tb_over_ta, theta)
        j = int(np.argmax(vals))
        a, b = lxs[max(j - 1, 0)], lxs[min(j + 1, grid - 1)]
        res = golden_section(
            lambda lx: float(work_per_cold_temperature(eta, math.exp(lx), d, tb_over_ta, theta)),
            a,
            b,
            rtol=rtol,
            atol=rtol,
            maximize=True,
        )
        return res

    table = work_per_cold_temperature(etas[:, None], np.exp(lxs)[None, :], d, tb_over_ta, theta)
    i = int(np.unravel_index(np.argmax(table), table.shape)[0])
    lo = etas[i - 1] if i > 0 else etas[0] / 2
    hi = etas[i + 1] if i < grid - 1 else (etas[-1] + eta_c) / 2
    outer = golden_section(lambda e: inner(e).fun, lo, hi, rtol=rtol, maximize=True)
    best = inner(outer.x)
    x_opt = math.exp(best.x)
    at_bound = best.x - lx_lo < 1e-6 or lx_hi - best.x < 1e-6
    return MaxWorkResult(
        d=d,
        tb_over_ta=tb_over_ta,
        theta=theta,
        eta_m=float(outer.x),
        eta_ca=curzon_ahlborn_efficiency(tb_over_ta),
        eta_c=eta_c,
        x_opt=x_opt,
        work_max=float(best.fun),
        converged=outer.converged and best.converged,
        at_bound=bool(at_bound),
    )
