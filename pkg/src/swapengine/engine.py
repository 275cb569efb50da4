"""Two-qudit swap engine: parameters and first-order (average) quantities.

Units are natural (hbar = k_B = 1). Qudit ``A`` is coupled to the bath at
inverse temperature ``beta_a`` (the hot bath by convention) and qudit ``B``
to the bath at ``beta_b``. Both have ``d`` equally spaced levels with
spacings ``omega_a`` and ``omega_b``. The work stroke is the partial swap
``cos(theta) I - i sin(theta) E``.

All averages here reduce to the mean occupations of the two Gibbs states,
so most of the numerical care lives in :func:`mean_occupation`.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "ConventionWarning",
    "EngineParams",
    "MomentSet",
    "Regime",
    "RegimeWarning",
    "carnot_efficiency",
    "classify_regime",
    "cop",
    "curzon_ahlborn_efficiency",
    "entropy_production",
    "entropy_production_ratio_form",
    "log_partition_function",
    "mean_heat_cold",
    "mean_heat_hot",
    "mean_occupation",
    "mean_occupation_inverse",
    "mean_work",
    "mean_work_coth",
    "occupation_gap",
    "occupation_variance",
    "otto_efficiency",
    "partition_function",
]

# d*x below _SERIES_CUTOFF uses the Bernoulli series; up to _SINH_CUTOFF the
# coth/sinh differences are summed as same-sign Taylor series; above it the
# exponential (Bose) form has no cancellation left.
_SERIES_CUTOFF = 1e-2
_SINH_CUTOFF = 4.0
_SINH_TERMS = 30
REGIME_TOL = 1e-9


class ConventionWarning(UserWarning):
    """Bath A is colder than bath B (formulas stay valid)."""


class RegimeWarning(UserWarning):
    """A figure of merit was requested outside the regime it belongs to."""


@dataclass(frozen=True)
class EngineParams:
    """Static description of one engine cycle."""

    d: int
    omega_a: float
    omega_b: float
    beta_a: float
    beta_b: float
    theta: float

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d:
            raise ValueError(f"d must be an integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        for name in ("omega_a", "omega_b", "beta_a", "beta_b"):
            value = float(getattr(self, name))
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise ValueError(f"theta must be finite, got {theta!r}")
        object.__setattr__(self, "theta", theta)
        if self.beta_a > self.beta_b:
            warnings.warn(
                "T_A < T_B: bath A is the cold one; results remain valid",
                ConventionWarning,
                stacklevel=3,
            )

    @property
    def x_a(self) -> float:
        """beta_a * omega_a."""
        return self.beta_a * self.omega_a

    @property
    def x_b(self) -> float:
        """beta_b * omega_b."""
        return self.beta_b * self.omega_b

    @property
    def sin2(self) -> float:
        return math.sin(self.theta) ** 2

    @property
    def cos2(self) -> float:
        return math.cos(self.theta) ** 2

    @property
    def hot_is_a(self) -> bool:
        return self.beta_a <= self.beta_b

    def replace(self, **changes) -> "EngineParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class MomentSet:
    """First and second order statistics of one cycle."""

    mean_w: float
    mean_qh: float
    mean_qc: float
    var_w: float
    var_qh: float
    cov_w_qh: float
    entropy_production: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


class Regime(str, enum.Enum):
    HEAT_ENGINE = "heat-engine"
    REFRIGERATOR = "refrigerator"
    THERMAL_ACCELERATOR = "thermal-accelerator"
    BOUNDARY = "boundary"


def _check_domain(x, d):
    x = np.asarray(x, dtype=float)
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d!r}")
    if np.any(~(x > 0)):
        raise ValueError("x = beta*omega must be > 0")
    return x, int(d)


def partition_function(x, d):
    """Z = sum_{n<d} exp(-n x) = (1 - e^{-d x}) / (1 - e^{-x})."""
    x, d = _check_domain(x, d)
    out = np.expm1(-d * x) / np.expm1(-x)
    return out[()]


def log_partition_function(x, d):
    x, d = _check_domain(x, d)
    return (np.log(-np.expm1(-d * x)) - np.log(-np.expm1(-x)))[()]


def _bose(x):
    # 1/(e^x - 1), overflow-free for large x
    e = np.exp(-x)
    return e / -np.expm1(-x)


def mean_occupation(x, d):
    """Mean excitation number g(x) of a d-level Gibbs state at x = beta*omega.

    ``g(x) = [d - 1 + coth(x/2) - d coth(d x/2)] / 2``, decreasing from
    ``(d-1)/2`` at x -> 0 to 0 at x -> infinity.
    """
    x, d = _check_domain(x, d)
    dx = d * x
    out = np.empty_like(x)

    small = dx < _SERIES_CUTOFF
    mid = ~small & (dx < _SINH_CUTOFF)
    big = dx >= _SINH_CUTOFF

    xs = x[small]
    out[small] = (
        (d - 1) / 2
        - (d**2 - 1) * xs / 12
        + (d**4 - 1) * xs**3 / 720
        - (d**6 - 1) * xs**5 / 30240
    )
    if mid.any():
        u = x[mid] / 2
        # coth(u) - d coth(du) = [cosh u sinh du - d cosh du sinh u] / (sinh u sinh du);
        # the numerator's Taylor terms all share one sign, so nothing cancels
        num = np.zeros_like(u)
        hi = (d + 1) * u
        log_ratio = math.log1p(-2 / (d + 1))  # log((d-1)/(d+1))
        fact = 1.0
        for k in range(1, _SINH_TERMS):
            fact *= (2 * k) * (2 * k + 1)
            # (d-1)^2k u^2k - (d+1)^2k u^2k without cancellation at large d
            num += hi ** (2 * k) * math.expm1(2 * k * log_ratio) / fact
        num *= 0.5 * (d * d - 1) * u
        out[mid] = 0.5 * (d - 1 + num / (np.sinh(u) * np.sinh(d * u)))
    xb = x[big]
    out[big] = _bose(xb) - d * _bose(d * xb)
    return out[()]


def occupation_variance(x, d):
    """Variance of the excitation number of a d-level Gibbs state.

    Equals ``1/(4 sinh^2(x/2)) - d^2/(4 sinh^2(d x/2))``; evaluated by series
    for small ``d x`` where the two terms nearly cancel.
    """
    x, d = _check_domain(x, d)
    dx = d * x
    out = np.empty_like(x)

    small = dx < _SERIES_CUTOFF
    xs = x[small]
    out[small] = (
        (d**2 - 1) / 12
        - (d**4 - 1) * xs**2 / 240
        + (d**6 - 1) * xs**4 / 6048
    )
    mid = ~small & (dx < _SINH_CUTOFF)
    if mid.any():
        u = x[mid] / 2
        # (sinh du - d sinh u)(sinh du + d sinh u) / (4 sinh^2 u sinh^2 du), with
        # sinh du - d sinh u summed as a positive series
        gap = np.zeros_like(u)
        fact = 1.0
        for k in range(1, _SINH_TERMS):
            fact *= (2 * k) * (2 * k + 1)
            gap += ((d * u) ** (2 * k) - u ** (2 * k)) / fact
        gap *= d * u
        su, sv = np.sinh(u), np.sinh(d * u)
        out[mid] = gap * (sv + d * su) / (4 * su * su * sv * sv)
    xl = x[dx >= _SINH_CUTOFF]
    # e^{-y}/(1-e^{-y})^2 == 1/(4 sinh^2(y/2)), safe for large y
    out[dx >= _SINH_CUTOFF] = np.exp(-xl) / np.expm1(-xl) ** 2 - d**2 * np.exp(-d * xl) / np.expm1(-d * xl) ** 2
    return out[()]


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def occupation_gap(x, y, d):
    """g(x) - g(y), accurate even when x and y nearly coincide.

    Plain subtraction loses digits in proportion to g/(g(x) - g(y)). Close
    pairs are instead handled by a factored series (tiny d*x) or by
    Gauss-Legendre quadrature of g' = -variance over [x, y], which is exact
    to rounding when the interval is short next to the distance to the
    poles of the variance (t = 2 pi i k / d; the variance is regular at 0).
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    _check_domain(x, d)
    _check_domain(y, d)
    out = np.asarray(mean_occupation(x, d) - mean_occupation(y, d), dtype=float).copy().reshape(x.shape)
    h = y - x
    lo = np.minimum(x, y)
    series = (d * np.maximum(x, y) < _SERIES_CUTOFF)
    # lower bound on the distance from [x, y] to the nearest pole
    reach = np.minimum(2 * math.pi, np.maximum(lo, 2 * math.pi / d))
    quad = ~series & (np.abs(h) <= 0.25 * reach)
    if np.any(series):
        a, b = x[series], y[series]
        dif = a - b
        out[series] = dif * (
            -(d**2 - 1) / 12
            + (d**4 - 1) * (a * a + a * b + b * b) / 720
            - (d**6 - 1) * (a**4 + a**3 * b + a * a * b * b + a * b**3 + b**4) / 30240
        )
    if np.any(quad):
        a, hq = x[quad], h[quad]
        t = a[:, None] + 0.5 * hq[:, None] * (1 + _GL_NODES[None, :])
        v = occupation_variance(t.ravel(), d).reshape(t.shape)
        out[quad] = 0.5 * hq * (v @ _GL_WEIGHTS)
    return out[()]


def mean_occupation_inverse(n_target, d):
    """Solve ``mean_occupation(x, d) == n_target`` for x > 0."""
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d!r}")
    upper = (d - 1) / 2
    if not (0 < n_target < upper):
        raise ValueError(f"n_target must lie in (0, {upper}), got {n_target!r}")

    def h(x):
        return float(mean_occupation(x, d)) - n_target

    lo, hi = 1e-3, 1.0
    while h(lo) < 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise ValueError("n_target too close to (d-1)/2 to invert")
    while h(hi) > 0:
        hi *= 2.0
    # bracketed root; relative tolerance only, so tiny and huge x both converge
    return brentq(h, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def mean_work(params: EngineParams) -> float:
    """<W> = sin^2(theta) (omega_b - omega_a) (N_A - N_B)."""
    gap = occupation_gap(params.x_a, params.x_b, params.d)
    return float(params.sin2 * (params.omega_b - params.omega_a) * gap)


def mean_work_coth(params: EngineParams) -> float:
    """<W> written directly with hyperbolic cotangents.

    Independent of :func:`mean_occupation` and used to cross-check it. The
    coth differences cancel for small beta*omega or nearly equal baths, so
    agreement with :func:`mean_work` is only to about 1e-9 relative there.
    """
    d = params.d

    def gap(x):
        return 1 / math.tanh(x / 2) - d / math.tanh(d * x / 2)

    return 0.5 * params.sin2 * (params.omega_b - params.omega_a) * (gap(params.x_a) - gap(params.x_b))


def _swap_excitation_mean(params: EngineParams) -> float:
    # mean of k = n - m, the number of quanta moved from A to B
    return float(params.sin2 * occupation_gap(params.x_a, params.x_b, params.d))


def mean_heat_hot(params: EngineParams) -> float:
    """Heat released by bath A, <Q_H> = omega_a sin^2(theta) (N_A - N_B).

    Equal to ``omega_a/(omega_b - omega_a) <W>`` but free of the 0/0 at
    omega_a == omega_b.
    """
    return params.omega_a * _swap_excitation_mean(params)


def mean_heat_cold(params: EngineParams) -> float:
    """Heat released by bath B; the first law fixes it to -omega_b/omega_a <Q_H>."""
    return -params.omega_b * _swap_excitation_mean(params)


def entropy_production(params: EngineParams) -> float:
    """<Sigma> = -beta_a <Q_H> - beta_b <Q_C> (never negative)."""
    return float((params.x_b - params.x_a) * _swap_excitation_mean(params))


def entropy_production_ratio_form(params: EngineParams) -> float:
    """(beta_a omega_a - beta_b omega_b)/(omega_a - omega_b) * <W>."""
    if params.omega_a == params.omega_b:
        raise ZeroDivisionError("ratio form undefined for omega_a == omega_b")
    return (params.x_a - params.x_b) / (params.omega_a - params.omega_b) * mean_work(params)


def classify_regime(params: EngineParams, tol: float = REGIME_TOL) -> Regime:
    """Operating regime from the level-spacing and temperature ratios.

    With A hot: heat engine for 1 < omega_a/omega_b < T_A/T_B, refrigerator
    above T_A/T_B, thermal accelerator below 1. With B hot the roles of the
    two qudits are exchanged.
    """
    if params.hot_is_a:
        r = params.omega_a / params.omega_b
        t = params.beta_b / params.beta_a
    else:
        r = params.omega_b / params.omega_a
        t = params.beta_a / params.beta_b
    if abs(r - 1) < tol or abs(r - t) < tol * t:
        return Regime.BOUNDARY
    if r < 1:
        return Regime.THERMAL_ACCELERATOR
    if r > t:
        return Regime.REFRIGERATOR
    return Regime.HEAT_ENGINE


def carnot_efficiency(params: EngineParams) -> float:
    return 1 - params.beta_a / params.beta_b


def curzon_ahlborn_efficiency(tb_over_ta: float) -> float:
    return 1 - math.sqrt(tb_over_ta)


def otto_efficiency(params: EngineParams) -> float:
    """eta = 1 - omega_b/omega_a; warns if the machine is not a heat engine."""
    if classify_regime(params) is not Regime.HEAT_ENGINE:
        warnings.warn("otto_efficiency outside the heat-engine regime", RegimeWarning, stacklevel=2)
    return 1 - params.omega_b / params.omega_a


def cop(params: EngineParams) -> float:
    """Refrigerator coefficient of performance omega_b/(omega_a - omega_b)."""
    if classify_regime(params) is not Regime.REFRIGERATOR:
        warnings.warn("cop outside the refrigerator regime", RegimeWarning, stacklevel=2)
    return params.omega_b / (params.omega_a - params.omega_b)
