"""Golden-section search on a bracket."""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

INV_PHI = (math.sqrt(5) - 1) / 2


class SearchResult(NamedTuple):
    x: float
    fun: float
    converged: bool
    iterations: int


def golden_section(
    fun: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = 1e-8,
    atol: float = 0.0,
    maximize: bool = False,
    maxiter: int = 500,
) -> SearchResult:
    """Minimise (or maximise) a unimodal ``fun`` on ``[a, b]``.

    Stops once the bracket is narrower than ``atol + rtol * |x|``.
    """
    sign = -1.0 if maximize else 1.0

    def f(x):
        return sign * fun(x)

    c = b - INV_PHI * (b - a)
    e = a + INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    it = 0
    converged = False
    while it < maxiter:
        if abs(b - a) <= atol + rtol * max(abs(c), abs(e)):
            converged = True
            break
        it += 1
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + INV_PHI * (b - a)
            fe = f(e)
    x, fx = (c, fc) if fc < fe else (e, fe)
    return SearchResult(x, sign * fx, converged, it)
