"""Discretization of rho(mu) dmu into positive nodes and weights.

The node set turns the retarded memory operator into a finite sum of
massive mode responses.  Power-law densities get a generalized
Gauss-Laguerre rule built from recurrence coefficients (tridiagonal
eigenvalue form); Lorentzians get composite Gauss-Legendre panels in the
arctan variable, which clusters nodes at the peak and makes the
truncated mass analytic; atomic densities pass through exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import QuadratureConstructionError, ValidationError
from .spectral import (BreitWigner, DiracComb, PowerLawExp, SpectralConstants,
                       SpectralDensity, spectral_constants)

DEFAULT_N_NODES = 32


@dataclass(frozen=True)
class MassQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    source_family: str
    moment_report: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValidationError("nodes and weights must be 1-d and matched")
        if nodes.size and (np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0)):
            raise QuadratureConstructionError(
                "quadrature-construction-failed: nodes not positive ascending")
        if np.any(weights <= 0):
            raise QuadratureConstructionError(
                "quadrature-construction-failed: nonpositive weight")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    def moment(self, p: float) -> float:
        return float(np.sum(self.weights * self.nodes ** p))

    def scaled(self, c: float) -> "MassQuadrature":
        return MassQuadrature(self.nodes, c * self.weights,
                              self.source_family, dict(self.moment_report))


def gauss_laguerre_generalized(n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for weight x**beta * exp(-x) on (0, inf).

    Nodes are eigenvalues of the Jacobi matrix with recurrence
    a_k = 2k + 1 + beta, b_k = k (k + beta), zeroth moment Gamma(beta+1).
    Weights come from the Christoffel sum over the orthonormal recurrence
    (the eigenvector route underflows for the outermost nodes).
    """
    k = np.arange(n, dtype=float)
    diag = 2.0 * k + 1.0 + beta
    off = np.sqrt((k[1:]) * (k[1:] + beta))
    try:
        x = eigh_tridiagonal(diag, off, eigvals_only=True)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise QuadratureConstructionError(
            "quadrature-construction-failed: eigenvalue solve failed") from exc
    x = np.sort(x)
    mu0 = math.gamma(beta + 1.0)
    # Christoffel weights w_i = 1 / sum_k p_k(x_i)^2 over the orthonormal
    # recurrence; outer nodes overflow the kernel sum and come back 0/NaN,
    # which the caller drops (their true weights underflow double range).
    with np.errstate(over="ignore", invalid="ignore"):
        p_prev = np.zeros_like(x)
        p_cur = np.full_like(x, 1.0 / math.sqrt(mu0))
        total = p_cur ** 2
        for j in range(n - 1):
            b_next = math.sqrt((j + 1.0) * (j + 1.0 + beta))
            b_prev = math.sqrt(j * (j + beta)) if j > 0 else 0.0
            p_next = ((x - diag[j]) * p_cur - b_prev * p_prev) / b_next
            total += p_next ** 2
            p_prev, p_cur = p_cur, p_next
        w = 1.0 / total
    w = np.where(np.isfinite(w), w, 0.0)
    return x, w


def _build_powerlaw(rho: PowerLawExp, n: int) -> tuple[np.ndarray, np.ndarray, int]:
    x, w = gauss_laguerre_generalized(n, rho.beta)
    nodes = rho.lam * x
    weights = rho.alpha * rho.lam ** (rho.beta + 1.0) * w
    # Outermost weights can underflow to exact zero for large n; such
    # nodes contribute nothing to any sum and are dropped, with a count
    # recorded in the moment report.
    keep = weights > 0.0
    return nodes[keep], weights[keep], int(np.sum(~keep))


def _build_breitwigner(rho: BreitWigner, n: int,
                       tol: float) -> tuple[np.ndarray, np.ndarray]:
    # Truncate (0, inf) so the excluded spectral mass is below tol * l1,
    # half on each side, using the exact arctan mass profile.
    l1 = rho.total_mass
    cut = 0.5 * tol * l1 / rho.alpha
    theta_lo = math.atan(-rho.mu0 / rho.gamma) + cut
    theta_hi = math.pi / 2 - cut
    if not theta_lo < theta_hi:
        raise QuadratureConstructionError(
            "quadrature-construction-failed: empty truncated domain")
    # In theta = arctan((mu-mu0)/gamma) the density integrates flat:
    # int f rho dmu = alpha * int f(mu(theta)) dtheta.
    n_panels = max(1, n // 8)
    sizes = np.full(n_panels, n // n_panels)
    sizes[: n % n_panels] += 1
    edges = np.linspace(theta_lo, theta_hi, n_panels + 1)
    nodes, weights = [], []
    for p in range(n_panels):
        x, w = np.polynomial.legendre.leggauss(int(sizes[p]))
        mid = 0.5 * (edges[p] + edges[p + 1])
        half = 0.5 * (edges[p + 1] - edges[p])
        theta = mid + half * x
        nodes.append(rho.mu0 + rho.gamma * np.tan(theta))
        weights.append(rho.alpha * half * w)
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def build_quadrature(rho: SpectralDensity, n_nodes: int = DEFAULT_N_NODES,
                     tol: float = 1e-10) -> MassQuadrature:
    """Discretize rho(mu) dmu into at most 512 positive nodes."""
    if not (1 <= n_nodes <= 512):
        raise ValidationError("n_nodes must lie in [1, 512]")
    dropped = 0
    if isinstance(rho, DiracComb):
        quad = MassQuadrature(rho.masses, rho.weights, rho.family)
    elif isinstance(rho, PowerLawExp):
        nodes, weights, dropped = _build_powerlaw(rho, n_nodes)
        quad = MassQuadrature(nodes, weights, rho.family)
    elif isinstance(rho, BreitWigner):
        nodes, weights = _build_breitwigner(rho, n_nodes, tol)
        quad = MassQuadrature(nodes, weights, rho.family)
    else:
        raise ValidationError(f"unknown density {type(rho).__name__}")
    consts = spectral_constants(rho, min(tol, 1e-10) if tol <= 1e-4 else 1e-10)
    report = validate_moments(quad, consts)
    if dropped:
        report["dropped_underflow_nodes"] = dropped
    quad.moment_report.update(report)
    return quad


def validate_moments(quad: MassQuadrature,
                     consts: SpectralConstants) -> dict:
    """Relative errors of the p = -1, 0, 1 moments against the constants.

    Moments whose exact value is flagged infinite (or undefined) are
    reported as "moment-undefined" rather than a number.
    """
    exact = {-1: consts.c_m1, 0: consts.l1, 1: consts.c_p1}
    report = {}
    for p, ref in exact.items():
        key = f"p{p:+d}"
        if ref is None or not math.isfinite(ref):
            report[key] = "moment-undefined"
            continue
        approx = quad.moment(p)
        report[key] = abs(approx - ref) / abs(ref)
    return report
