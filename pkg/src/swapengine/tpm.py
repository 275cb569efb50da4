"""Two-point measurement protocol, simulated without any closed form.

Both free Hamiltonians are measured before the work stroke (outcomes n on A,
m on B, drawn from the product Gibbs state) and after it (outcomes l, s).
A realization carries

    W = omega_a (l - n) + omega_b (s - m),   Q_H = omega_a (n - l).

Outcomes are stored as excitation changes ``dA = l - n`` and ``dB = s - m``
so the oracle does not presuppose that the swap conserves total excitation.

The free evolution ``U_0`` only contributes phases that cancel in
``|<l s| U |n m>|^2``, so transition probabilities use ``V_theta`` alone.

Random numbers come from :class:`numpy.random.Generator` on ``PCG64``
seeded through :class:`numpy.random.SeedSequence`. Sampling is split into
fixed-size chunks, each with its own spawned child seed, so the output
depends on ``seed`` only and not on how many workers ran the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .engine import EngineParams

__all__ = [
    "CHUNK_SIZE",
    "MAX_ENUM_D",
    "EmpiricalStats",
    "ExactJoint",
    "TpmOutcome",
    "enumerate_joint",
    "gibbs_weights",
    "sample",
    "transition_probability",
    "two_sample_chi2",
]

MAX_ENUM_D = 64
CHUNK_SIZE = 1 << 17


@dataclass(frozen=True)
class TpmOutcome:
    n: int
    m: int
    l: int
    s: int
    work: float
    heat_hot: float

    @classmethod
    def from_indices(cls, params: EngineParams, n, m, l, s) -> "TpmOutcome":
        work = params.omega_a * (l - n) + params.omega_b * (s - m)
        return cls(n, m, l, s, work, params.omega_a * (n - l))


def gibbs_weights(x: float, d: int) -> np.ndarray:
    """Normalised Boltzmann weights exp(-n x)/Z by direct summation."""
    w = np.exp(-x * np.arange(d))
    return w / w.sum()


def _amplitude(theta, n, m, l, s):
    # <l s| (cos I - i sin E) |n m>
    ident = (l == n) & (s == m)
    swap = (l == m) & (s == n)
    return math.cos(theta) * ident - 1j * math.sin(theta) * swap


def transition_probability(params: EngineParams, n, m, l, s):
    """q(l, s | n, m) = |<l|<s| V_theta |n>|m>|^2."""
    idx = [np.asarray(v) for v in (n, m, l, s)]
    for v in idx:
        if np.any((v < 0) | (v >= params.d)):
            raise IndexError(f"level index outside [0, {params.d - 1}]")
    amp = _amplitude(params.theta, *idx)
    return (np.abs(amp) ** 2)[()]


@dataclass(frozen=True)
class ExactJoint:
    """Exact joint law over excitation changes (dA, dB) in [-(d-1), d-1]^2."""

    params: EngineParams
    prob: np.ndarray = field(repr=False)

    @property
    def offsets(self) -> np.ndarray:
        d = self.params.d
        return np.arange(-(d - 1), d)

    def p(self, d_a: int, d_b: int) -> float:
        d = self.params.d
        if max(abs(d_a), abs(d_b)) > d - 1:
            return 0.0
        return float(self.prob[d_a + d - 1, d_b + d - 1])

    def off_antidiagonal_mass(self) -> float:
        d_a, d_b = np.meshgrid(self.offsets, self.offsets, indexing="ij")
        return float(self.prob[d_a != -d_b].sum())

    def heat_lattice(self) -> np.ndarray:
        """Probability of Q_H = k omega_a for k = -(d-1)..d-1 (k = -dA)."""
        return self.prob.sum(axis=1)[::-1].copy()

    def expect(self, fn) -> float:
        """E[fn(W, Q_H)] over the joint law."""
        d_a, d_b = np.meshgrid(self.offsets, self.offsets, indexing="ij")
        work = self.params.omega_a * d_a + self.params.omega_b * d_b
        heat = -self.params.omega_a * d_a
        return float((self.prob * fn(work, heat)).sum())


def enumerate_joint(params: EngineParams) -> ExactJoint:
    """Sum p_{n,m} q(l,s|n,m) over all initial pairs and their reachable outcomes.

    Only (l, s) = (n, m) and (m, n) have non-zero amplitude, so the cost is
    O(d^2) instead of O(d^4).
    """
    d = params.d
    if d > MAX_ENUM_D:
        raise ValueError(f"enumeration capped at d <= {MAX_ENUM_D}, got {d}")
    pa = gibbs_weights(params.x_a, d)
    pb = gibbs_weights(params.x_b, d)
    n, m = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    p_nm = np.outer(pa, pb)

    prob = np.zeros((2 * d - 1, 2 * d - 1))
    stay = transition_probability(params, n, m, n, m)
    np.add.at(prob, (d - 1, d - 1), (p_nm * stay).sum())
    # for n == m the swapped outcome is the same state; count it once
    off = n != m
    moved = transition_probability(params, n, m, m, n) * off
    np.add.at(prob, ((m - n) + d - 1, (n - m) + d - 1), p_nm * moved)
    return ExactJoint(params=params, prob=prob)


@dataclass
class EmpiricalStats:
    """Counts and moment estimates from Monte Carlo TPM runs."""

    params: EngineParams
    sample_count: int
    counts: np.ndarray = field(repr=False)
    """Counts over (dA, dB), shape (2d-1, 2d-1)."""

    @property
    def histogram(self) -> np.ndarray:
        """Counts of Q_H = k omega_a, k = -(d-1)..d-1."""
        return self.counts.sum(axis=1)[::-1].copy()

    @property
    def off_antidiagonal_count(self) -> int:
        d = self.params.d
        off = np.arange(-(d - 1), d)
        d_a, d_b = np.meshgrid(off, off, indexing="ij")
        return int(self.counts[d_a != -d_b].sum())

    def _values(self):
        d = self.params.d
        off = np.arange(-(d - 1), d)
        d_a, d_b = np.meshgrid(off, off, indexing="ij")
        p = self.params
        work = p.omega_a * d_a + p.omega_b * d_b
        heat_hot = -p.omega_a * d_a
        heat_cold = -p.omega_b * d_b
        sigma = -p.beta_a * heat_hot - p.beta_b * heat_cold
        return {
            "W": work,
            "Q_H": heat_hot,
            "Q_C": heat_cold,
            "W^2": work**2,
            "Q_H^2": heat_hot**2,
            "W*Q_H": work * heat_hot,
            "Sigma": sigma,
            "exp(-Sigma)": np.exp(-sigma),
        }

    def estimate(self, name: str) -> tuple[float, float]:
        """Sample mean of a per-realization quantity and its standard error."""
        v = self._values()[name]
        n = self.sample_count
        mean = float((self.counts * v).sum() / n)
        if n < 2:
            return mean, math.inf
        var = float((self.counts * (v - mean) ** 2).sum() / (n - 1))
        return mean, math.sqrt(var / n)

    def estimates(self) -> dict[str, tuple[float, float]]:
        return {name: self.estimate(name) for name in self._values()}

    def lattice_z_scores(self, exact_prob) -> np.ndarray:
        """(p_hat - p)/se per lattice point; se from the exact p, 0 where p in {0, 1}."""
        exact_prob = np.asarray(exact_prob, dtype=float)
        n = self.sample_count
        p_hat = self.histogram / n
        se = np.sqrt(exact_prob * (1 - exact_prob) / n)
        diff = p_hat - exact_prob
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(se > 0, diff / se, np.where(diff == 0, 0.0, np.inf))
        return z

    def merge(self, other: "EmpiricalStats") -> "EmpiricalStats":
        if other.params != self.params:
            raise ValueError("cannot merge samples of different engines")
        return EmpiricalStats(self.params, self.sample_count + other.sample_count, self.counts + other.counts)


def _inverse_cdf(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(weights) - 1)


def _sample_chunk(params: EngineParams, count: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    d = params.d
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    u = rng.random((3, count))
    n = _inverse_cdf(gibbs_weights(params.x_a, d), u[0])
    m = _inverse_cdf(gibbs_weights(params.x_b, d), u[1])
    # final outcome (m, n) with probability q(m, n | n, m); otherwise (n, m)
    q_swap = transition_probability(params, n, m, m, n)
    swapped = (u[2] < q_swap) & (n != m)
    l = np.where(swapped, m, n)
    s = np.where(swapped, n, m)
    counts = np.zeros((2 * d - 1, 2 * d - 1), dtype=np.int64)
    np.add.at(counts, (l - n + d - 1, s - m + d - 1), 1)
    return counts


def sample(params: EngineParams, count: int, seed: int, jobs: int = 1) -> EmpiricalStats:
    """Monte Carlo realizations of the measurement protocol.

    ``seed`` is a 64-bit integer; identical (params, count, seed) always give
    identical counts, for any ``jobs``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not (0 <= int(seed) < 2**64):
        raise ValueError("seed must be a 64-bit unsigned integer")
    n_chunks = -(-count // CHUNK_SIZE)
    sizes = [CHUNK_SIZE] * (n_chunks - 1) + [count - CHUNK_SIZE * (n_chunks - 1)]
    children = np.random.SeedSequence(int(seed)).spawn(n_chunks)
    if jobs > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda a: _sample_chunk(params, *a), zip(sizes, children)))
    else:
        parts = [_sample_chunk(params, c, ss) for c, ss in zip(sizes, children)]
    return EmpiricalStats(params, count, np.sum(parts, axis=0))


def two_sample_chi2(hist_a, hist_b) -> float:
    """p-value of a chi-square homogeneity test between two histograms."""
    table = np.vstack([hist_a, hist_b])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(table, correction=False).pvalue)
