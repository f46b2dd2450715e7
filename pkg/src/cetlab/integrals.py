"""Deterministic panel quadrature with explicit divergence flagging.

Integrals of nonnegative weights over (0, inf) are computed as a core
region resolved by fixed-order Gauss-Legendre panels plus dyadic slabs
marching toward 0 and toward infinity.  A slab sequence whose
contributions stop decaying geometrically is declared divergent and the
integral is reported as +inf instead of a silently truncated number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_GL_ORDER = 32
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)

# Slab contributions whose successive ratios stay above this are treated
# as non-decaying (log-divergent or worse).
_DIVERGENCE_RATIO = 0.97
_DIVERGENCE_RUN = 4


def gauss_panel(f, a: float, b: float) -> float:
    """Fixed-order Gauss-Legendre integral of vectorized f over [a, b]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return float(half * np.dot(_GL_W, f(mid + half * _GL_X)))


def gauss_panels(f, edges) -> float:
    edges = np.asarray(edges, dtype=float)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = mids[:, None] + halfs[:, None] * _GL_X[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return float(np.sum(halfs * (vals @ _GL_W)))


@dataclass(frozen=True)
class FlaggedIntegral:
    value: float            # math.inf when divergence was detected
    error_estimate: float
    converged: bool
    slabs_used: int


def _march(f, start: float, factor: float, accum: float, tol: float,
           budget: int) -> tuple[float, bool, bool, int]:
    """Sum dyadic slabs from `start`, shrinking (factor<1) or growing.

    Returns (sum, diverged, converged, slabs).  Divergence means the slab
    contributions failed to decay; the caller maps that to +inf.
    """
    total = 0.0
    prev = None
    high_ratio_run = 0
    small_run = 0
    edge = start
    for k in range(budget):
        nxt = edge * factor
        lo, hi = (nxt, edge) if factor < 1.0 else (edge, nxt)
        slab = gauss_panel(f, lo, hi)
        total += slab
        scale = max(abs(accum) + abs(total), 1e-300)
        if prev is not None and prev > 0.0:
            ratio = slab / prev
            if ratio > _DIVERGENCE_RATIO and slab > tol * scale:
                high_ratio_run += 1
            else:
                high_ratio_run = 0
            if high_ratio_run >= _DIVERGENCE_RUN:
                return total, True, False, k + 1
        if slab <= tol * scale:
            small_run += 1
            if small_run >= 2:
                return total, False, True, k + 1
        else:
            small_run = 0
        prev = slab
        edge = nxt
    return total, False, False, budget


def flagged_integral(f, core_edges, tol: float = 1e-10,
                     ir_budget: int = 160, uv_budget: int = 400,
                     ir: bool = True, uv: bool = True) -> FlaggedIntegral:
    """Integrate nonnegative f over (0, inf) with divergence detection.

    `core_edges` must bracket any interior structure (peaks, kinks); the
    dyadic marches only see the monotone-ish tails.
    """
    core_edges = np.asarray(core_edges, dtype=float)
    core = gauss_panels(f, core_edges)
    total = core
    slabs = 0

    if ir:
        s, diverged, converged, k = _march(f, float(core_edges[0]), 0.5,
                                           total, tol, ir_budget)
        slabs += k
        if diverged:
            return FlaggedIntegral(math.inf, math.inf, True, slabs)
        if not converged:
            from .errors import QuadratureBudgetError
            raise QuadratureBudgetError(
                "quadrature-budget-exceeded: infrared march did not settle",
                achieved_error=s, slabs=k)
        total += s

    if uv:
        s, diverged, converged, k = _march(f, float(core_edges[-1]), 2.0,
                                           total, tol, uv_budget)
        slabs += k
        if diverged:
            return FlaggedIntegral(math.inf, math.inf, True, slabs)
        if not converged:
            from .errors import QuadratureBudgetError
            raise QuadratureBudgetError(
                "quadrature-budget-exceeded: ultraviolet march did not settle",
                achieved_error=s, slabs=k)
        total += s

    return FlaggedIntegral(total, abs(total) * tol, True, slabs)


def trapezoid_oracle(f, a: float, b: float, panels: int = 1_000_000) -> float:
    """Brute-force trapezoid reference, independent of the panel machinery."""
    x = np.linspace(a, b, panels + 1)
    return float(np.trapezoid(f(x), x))
