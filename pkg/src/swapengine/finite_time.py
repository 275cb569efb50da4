"""Perfect-swap cycles with thermal strokes of finite duration.

Each qudit relaxes exponentially towards its bath occupation,
``dN_X/dt = -alpha_X (N_X(t) - N_X)``, for a time ``tau_q``; the full swap
then exchanges the two (still Gibbsian) states. After the transient the
cycle repeats with steady occupations ``N_A*``, ``N_B*``; all statistics
follow from the ideal-cycle formulas at effective inverse temperatures
``beta_X* = g^{-1}(N_X*) / omega_X``. Entropy production is charged at the
bath temperatures.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._golden import golden_section
from .engine import ConventionWarning, EngineParams, MomentSet, mean_occupation, mean_occupation_inverse
from .spectral import moment_set, snr_f

__all__ = [
    "BETA_CAP",
    "FiniteTimeParams",
    "FiniteTimeState",
    "PowerOptimum",
    "ideal_occupations",
    "gap_factor",
    "optimal_power",
    "optimal_scaled_power",
    "params_from_occupations",
    "power",
    "power_scaled",
    "recursion_step",
    "scaled_power",
    "steady_inverse_snr",
    "steady_moments",
    "steady_occupations",
    "steady_state",
]

BETA_CAP = 1e-12
_THETA_TOL = 1e-9


@dataclass(frozen=True)
class FiniteTimeParams:
    base: EngineParams
    alpha_a: float
    alpha_b: float
    tau_q: float
    tau_w: float = 0.0

    def __post_init__(self):
        r = math.remainder(self.base.theta - math.pi / 2, math.pi)
        if abs(r) > _THETA_TOL:
            raise ValueError("finite-time cycles require a perfect swap, theta = pi/2 (mod pi)")
        if not (self.alpha_a > 0 and self.alpha_b > 0):
            raise ValueError("relaxation rates must be positive")
        if not (self.tau_q >= 0 and self.tau_w >= 0):
            raise ValueError("stroke durations must be non-negative")

    def with_tau_q(self, tau_q: float) -> "FiniteTimeParams":
        return FiniteTimeParams(self.base, self.alpha_a, self.alpha_b, tau_q, self.tau_w)


@dataclass(frozen=True)
class FiniteTimeState:
    n_a_star: float
    n_b_star: float
    beta_a_star: float
    beta_b_star: float
    power: float
    flags: tuple = field(default=())


def ideal_occupations(base: EngineParams) -> tuple[float, float]:
    return float(mean_occupation(base.x_a, base.d)), float(mean_occupation(base.x_b, base.d))


def recursion_step(ftp: FiniteTimeParams, n_a: float, n_b: float) -> tuple[float, float]:
    """Swap, then relax for tau_q: one application of the cycle map."""
    eq_a, eq_b = ideal_occupations(ftp.base)
    ka = math.exp(-ftp.alpha_a * ftp.tau_q)
    kb = math.exp(-ftp.alpha_b * ftp.tau_q)
    return (n_b - eq_a) * ka + eq_a, (n_a - eq_b) * kb + eq_b


def steady_occupations(ftp: FiniteTimeParams) -> tuple[float, float]:
    """Fixed point (N_A*, N_B*) of :func:`recursion_step`."""
    eq_a, eq_b = ideal_occupations(ftp.base)
    if math.isinf(ftp.tau_q):
        return eq_a, eq_b
    if ftp.tau_q == 0:
        # rates-weighted limit of the closed form; both occupations coincide
        w = (ftp.alpha_a * eq_a + ftp.alpha_b * eq_b) / (ftp.alpha_a + ftp.alpha_b)
        return w, w
    ca = -math.expm1(-ftp.alpha_a * ftp.tau_q)
    cb = -math.expm1(-ftp.alpha_b * ftp.tau_q)
    ea = math.exp(-ftp.alpha_a * ftp.tau_q)
    eb = math.exp(-ftp.alpha_b * ftp.tau_q)
    den = -math.expm1(-(ftp.alpha_a + ftp.alpha_b) * ftp.tau_q)
    n_a = (eq_a * ca + eq_b * cb * ea) / den
    n_b = (eq_b * cb + eq_a * ca * eb) / den
    return n_a, n_b


def gap_factor(alpha_a: float, alpha_b: float, tau_q: float) -> float:
    """(N_A* - N_B*) / (N_A - N_B); tends to alpha_a alpha_b/(alpha_a + alpha_b) * tau_q."""
    if math.isinf(tau_q):
        return 1.0
    if tau_q == 0:
        return 0.0
    return math.expm1(-alpha_a * tau_q) * math.expm1(-alpha_b * tau_q) / -math.expm1(-(alpha_a + alpha_b) * tau_q)


def _effective_beta(n_star: float, omega: float, d: int, flags: list, label: str) -> float:
    upper = (d - 1) / 2
    if not n_star < upper:
        flags.append(f"{label}:infinite-temperature")
        return BETA_CAP
    x = mean_occupation_inverse(n_star, d)
    if x / omega < BETA_CAP:
        flags.append(f"{label}:capped")
        return BETA_CAP
    return x / omega


def power(ftp: FiniteTimeParams) -> float:
    """Output power <-W>/(tau_q + tau_w).

    At tau_q = tau_w = 0 returns the finite tau_q -> 0 limit
    ``alpha_a alpha_b/(alpha_a + alpha_b) (omega_a - omega_b)(N_A - N_B)``.
    """
    eq_a, eq_b = ideal_occupations(ftp.base)
    scale = (ftp.base.omega_a - ftp.base.omega_b) * (eq_a - eq_b)
    return scale * power_scaled(ftp)


def power_scaled(ftp: FiniteTimeParams) -> float:
    """Power in units of (omega_a - omega_b)(N_A - N_B)."""
    return scaled_power(ftp.alpha_a, ftp.alpha_b, ftp.tau_q, ftp.tau_w)


def scaled_power(alpha_a: float, alpha_b: float, tau_q: float, tau_w: float = 0.0) -> float:
    """Power per unit (omega_a - omega_b)(N_A - N_B); needs only the rates."""
    if math.isinf(tau_q):
        return 0.0
    if tau_q == 0:
        return alpha_a * alpha_b / (alpha_a + alpha_b) if tau_w == 0 else 0.0
    return gap_factor(alpha_a, alpha_b, tau_q) / (tau_q + tau_w)


def steady_state(ftp: FiniteTimeParams) -> FiniteTimeState:
    flags: list = []
    n_a, n_b = steady_occupations(ftp)
    if ftp.tau_q == 0:
        flags.append("degenerate:tau_q=0")
    base = ftp.base
    return FiniteTimeState(
        n_a_star=n_a,
        n_b_star=n_b,
        beta_a_star=_effective_beta(n_a, base.omega_a, base.d, flags, "A"),
        beta_b_star=_effective_beta(n_b, base.omega_b, base.d, flags, "B"),
        power=power(ftp),
        flags=tuple(flags),
    )


def _effective_params(ftp: FiniteTimeParams, state: FiniteTimeState) -> EngineParams:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConventionWarning)
        return ftp.base.replace(beta_a=state.beta_a_star, beta_b=state.beta_b_star)


def steady_moments(ftp: FiniteTimeParams) -> MomentSet:
    """Moments of the limit cycle; entropy production uses the bath betas."""
    state = steady_state(ftp)
    base = ftp.base
    sigma = (base.x_b - base.x_a) * (state.n_a_star - state.n_b_star)
    if ftp.tau_q == 0:
        return MomentSet(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    ms = moment_set(_effective_params(ftp, state))
    # first moments straight from the steady occupations (exact, no inversion)
    dn = state.n_a_star - state.n_b_star
    return MomentSet(
        mean_w=(base.omega_b - base.omega_a) * dn,
        mean_qh=base.omega_a * dn,
        mean_qc=-base.omega_b * dn,
        var_w=ms.var_w,
        var_qh=ms.var_qh,
        cov_w_qh=ms.cov_w_qh,
        entropy_production=sigma,
    )


def steady_inverse_snr(ftp: FiniteTimeParams) -> float:
    """var(W)/<W>^2 in the limit cycle via (y - x) f(x*, y*, d)/<Sigma> - 1."""
    state = steady_state(ftp)
    base = ftp.base
    sigma = (base.x_b - base.x_a) * (state.n_a_star - state.n_b_star)
    f_star = snr_f(state.beta_a_star * base.omega_a, state.beta_b_star * base.omega_b, base.d)
    return float((base.x_b - base.x_a) * f_star / sigma - 1)


@dataclass(frozen=True)
class PowerOptimum:
    tau_q: float
    power_scaled: float
    boundary: bool
    converged: bool


def optimal_power(ftp: FiniteTimeParams, rtol: float = 1e-10) -> PowerOptimum:
    """Maximise power over tau_q in (0, 50/alpha] at the given tau_w.

    With tau_w = 0 the supremum sits at tau_q -> 0 and is returned flagged
    as a boundary solution.
    """
    return optimal_scaled_power(ftp.alpha_a, ftp.alpha_b, ftp.tau_w, rtol=rtol)


def optimal_scaled_power(alpha_a: float, alpha_b: float, tau_w: float, rtol: float = 1e-10) -> PowerOptimum:
    if tau_w == 0:
        return PowerOptimum(0.0, scaled_power(alpha_a, alpha_b, 0.0), True, True)
    hi = 50 / min(alpha_a, alpha_b)
    lo = 1e-9 * hi

    def objective(log_t):
        return scaled_power(alpha_a, alpha_b, math.exp(log_t), tau_w)

    # unimodal in log tau_q; a coarse scan picks the bracket
    grid = np.linspace(math.log(lo), math.log(hi), 200)
    j = int(np.argmax([objective(g) for g in grid]))
    res = golden_section(objective, grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)], rtol=rtol, atol=1e-12, maximize=True)
    return PowerOptimum(math.exp(res.x), res.fun, j in (0, len(grid) - 1), res.converged)


def params_from_occupations(d, n_a, n_b, theta=math.pi / 2, omega_a=1.0, omega_b=1.0) -> EngineParams:
    """Engine whose baths produce the mean occupations (n_a, n_b)."""
    return EngineParams(
        d=d,
        omega_a=omega_a,
        omega_b=omega_b,
        beta_a=mean_occupation_inverse(n_a, d) / omega_a,
        beta_b=mean_occupation_inverse(n_b, d) / omega_b,
        theta=theta,
    )
