"""Spectral densities rho(mu), their defining integrals, and admissibility.

Three families are supported: a power law with exponential cutoff
``alpha * mu**beta * exp(-mu/lam)``, a Lorentzian (Breit-Wigner) bump,
and a finite list of point masses.  The five constants

    l1      = int rho dmu
    c_m1    = int rho / mu dmu          (infrared moment)
    c_p1    = int mu * rho dmu          (ultraviolet moment)
    c_prime = int |rho'| dmu            (total variation)
    c_mhalf = int rho / sqrt(mu) dmu

are computed in closed form where one exists and by flagged adaptive
quadrature otherwise; divergent integrals come back as +inf, never as a
silently truncated number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import gamma as gamma_fn
from typing import Union

import numpy as np

from .errors import NotPointwiseEvaluableError, ValidationError
from .integrals import flagged_integral

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class PowerLawExp:
    """rho(mu) = alpha * mu**beta * exp(-mu / lam), defined for mu > 0.

    beta = 0 is admitted only as the sharpness case for the infrared
    moment (c_m1 diverges there); construction emits a warning.
    """

    alpha: float
    beta: float
    lam: float
    family = "powerlaw"

    def __post_init__(self):
        if not (self.alpha > 0 and self.lam > 0):
            raise ValidationError("powerlaw requires alpha > 0 and lambda > 0")
        if self.beta < 0:
            raise ValidationError("powerlaw requires beta >= 0")
        if self.beta == 0:
            warnings.warn(
                "beta = 0 has a divergent infrared moment (c_m1 = +inf); "
                "admitted only as a sharpness case",
                stacklevel=2)

    def density(self, mu):
        mu = np.asarray(mu, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.alpha * mu ** self.beta * np.exp(-mu / self.lam)
        if self.beta == 0:
            out = np.where(mu >= 0, self.alpha * np.exp(-mu / self.lam), out)
        return np.where(mu < 0, 0.0, out)


@dataclass(frozen=True)
class BreitWigner:
    """rho(mu) = alpha * gamma / ((mu - mu0)**2 + gamma**2) on mu > 0."""

    alpha: float
    gamma: float
    mu0: float
    family = "breitwigner"

    def __post_init__(self):
        if not (self.alpha > 0 and self.gamma > 0 and self.mu0 > 0):
            raise ValidationError("breitwigner requires positive parameters")
        if not self.mu0 > self.gamma:
            raise ValidationError("breitwigner requires mu0 > gamma")

    def density(self, mu):
        mu = np.asarray(mu, dtype=float)
        out = self.alpha * self.gamma / ((mu - self.mu0) ** 2 + self.gamma ** 2)
        return np.where(mu < 0, 0.0, out)

    def mass_below(self, mu: float) -> float:
        """Exact integral of the density over (0, mu]."""
        a = math.atan((mu - self.mu0) / self.gamma)
        b = math.atan(-self.mu0 / self.gamma)
        return self.alpha * (a - b)

    @property
    def total_mass(self) -> float:
        return self.alpha * (math.pi / 2 + math.atan(self.mu0 / self.gamma))


@dataclass(frozen=True)
class DiracComb:
    """Finite atom list [(alpha_j, mu_j)], mu_j strictly increasing."""

    atoms: tuple
    family = "diraccomb"

    def __post_init__(self):
        atoms = tuple((float(a), float(m)) for a, m in self.atoms)
        if not atoms:
            raise ValidationError("diraccomb requires at least one atom")
        for a, m in atoms:
            if not (a > 0 and m > 0):
                raise ValidationError("atom weights and masses must be positive")
        masses = [m for _, m in atoms]
        if any(m2 <= m1 for m1, m2 in zip(masses, masses[1:])):
            raise ValidationError("atom masses must be strictly increasing")
        object.__setattr__(self, "atoms", atoms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a for a, _ in self.atoms])

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms])


SpectralDensity = Union[PowerLawExp, BreitWigner, DiracComb]


def eval_density(rho: SpectralDensity, mu: float) -> float:
    """Pointwise rho(mu) for the continuous families."""
    if isinstance(rho, DiracComb):
        raise NotPointwiseEvaluableError(
            "not-pointwise-evaluable: atomic density; use the atoms accessor")
    if mu <= 0:
        raise ValidationError("mu must be positive")
    return float(rho.density(mu))


def density_at_zero(rho: SpectralDensity) -> float:
    """Boundary value rho(0+); needed by the averaging bound."""
    if isinstance(rho, PowerLawExp):
        return rho.alpha if rho.beta == 0 else 0.0
    if isinstance(rho, BreitWigner):
        return rho.alpha * rho.gamma / (rho.mu0 ** 2 + rho.gamma ** 2)
    raise NotPointwiseEvaluableError("not-pointwise-evaluable: atomic density")


@dataclass(frozen=True)
class SpectralConstants:
    """The tuple of defining integrals; +inf marks divergence.

    c_prime is None for atomic densities (total variation undefined).
    """

    l1: float
    c_m1: float
    c_p1: float
    c_prime: float | None
    c_mhalf: float

    def finite(self, name: str) -> bool:
        v = getattr(self, name)
        return v is not None and math.isfinite(v)

    def as_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            return "inf" if math.isinf(v) else v
        return {k: enc(getattr(self, k))
                for k in ("l1", "c_m1", "c_p1", "c_prime", "c_mhalf")}


def _powerlaw_closed(rho: PowerLawExp) -> SpectralConstants:
    a, b, lam = rho.alpha, rho.beta, rho.lam
    l1 = a * lam ** (b + 1) * gamma_fn(b + 1)
    c_m1 = math.inf if b == 0 else a * lam ** b * gamma_fn(b)
    c_p1 = a * lam ** (b + 2) * gamma_fn(b + 2)
    c_mhalf = a * lam ** (b + 0.5) * gamma_fn(b + 0.5)
    # |rho'| integrates to 2*rho(peak) - rho(0+); the peak sits at mu = b*lam.
    peak = a * (b * lam) ** b * math.exp(-b) if b > 0 else a
    c_prime = 2.0 * peak - (a if b == 0 else 0.0)
    return SpectralConstants(l1, c_m1, c_p1, c_prime, c_mhalf)


def _powerlaw_core_edges(rho: PowerLawExp, extra: tuple = ()) -> np.ndarray:
    lo = rho.lam * 1e-3
    hi = rho.lam * 80.0
    edges = set(np.geomspace(lo, hi, 48))
    edges.update(e for e in extra if lo < e < hi)
    edges.update((lo, hi))
    return np.array(sorted(edges))


def _bw_core_edges(rho: BreitWigner) -> np.ndarray:
    g, m0 = rho.gamma, rho.mu0
    lo = max(m0 / 64.0, 1e-6 * g)
    hi = m0 + 512.0 * g
    edges = {lo, hi, m0}
    j = -2.0
    while g * 2.0 ** j < hi - m0:
        for s in (-1.0, 1.0):
            e = m0 + s * g * 2.0 ** j
            if lo < e < hi:
                edges.add(e)
        j += 1.0
    return np.array(sorted(edges))


def _constants_adaptive(rho: SpectralDensity, tol: float) -> SpectralConstants:
    if isinstance(rho, PowerLawExp):
        kink = rho.beta * rho.lam
        edges = _powerlaw_core_edges(rho, extra=(kink,) if kink > 0 else ())
        d = rho.density
        dprime_abs = (lambda mu: np.abs(
            rho.alpha * np.exp(-mu / rho.lam)
            * (rho.beta * mu ** (rho.beta - 1.0) - mu ** rho.beta / rho.lam)))
    elif isinstance(rho, BreitWigner):
        edges = _bw_core_edges(rho)
        d = rho.density

        def dprime_abs(mu):
            g, m0 = rho.gamma, rho.mu0
            return np.abs(-2.0 * rho.alpha * g * (mu - m0)
                          / ((mu - m0) ** 2 + g ** 2) ** 2)
    else:
        raise ValidationError("adaptive constants need a continuous family")

    def moment(p):
        return flagged_integral(lambda mu: d(mu) * mu ** p, edges, tol)

    l1 = moment(0.0)
    c_m1 = moment(-1.0)
    c_p1 = moment(1.0)
    c_mh = moment(-0.5)
    c_pr = flagged_integral(dprime_abs, edges, tol)
    vals = [f.value for f in (l1, c_m1, c_p1, c_pr, c_mh)]
    return SpectralConstants(vals[0], vals[1], vals[2], vals[3], vals[4])


def spectral_constants(rho: SpectralDensity, tol: float = DEFAULT_TOL,
                       method: str = "auto") -> SpectralConstants:
    """Compute (l1, c_m1, c_p1, c_prime, c_mhalf) for a spectral density.

    method: "auto" uses closed forms when available, "adaptive" forces
    the flagged-quadrature path (for cross-checks).
    """
    if not (0.0 < tol <= 1e-4):
        raise ValidationError("tol must lie in (0, 1e-4]")
    if isinstance(rho, DiracComb):
        w, m = rho.weights, rho.masses
        return SpectralConstants(
            l1=float(np.sum(w)),
            c_m1=float(np.sum(w / m)),
            c_p1=float(np.sum(w * m)),
            c_prime=None,
            c_mhalf=float(np.sum(w / np.sqrt(m))))
    if method == "auto" and isinstance(rho, PowerLawExp):
        return _powerlaw_closed(rho)
    return _constants_adaptive(rho, tol)


@dataclass(frozen=True)
class ConditionReport:
    """Verdicts for the five admissibility conditions plus diagnostics."""

    s1: bool
    s2: bool
    s3: bool
    s4: bool
    s5: bool
    messages: tuple
    decay_path: str  # "spectral-averaging" or "discrete-spectrum"

    @property
    def all_hold(self) -> bool:
        return self.s1 and self.s2 and self.s3 and self.s4 and self.s5

    def as_dict(self) -> dict:
        return {"s1": self.s1, "s2": self.s2, "s3": self.s3, "s4": self.s4,
                "s5": self.s5, "messages": list(self.messages),
                "decay_path": self.decay_path}


def check_conditions(rho: SpectralDensity,
                     consts: SpectralConstants) -> ConditionReport:
    """Decide S1..S5 from the computed constants.

    S1 (nonnegativity) is structural for every representable density.
    S5 additionally requires local absolute continuity, which atomic
    densities lack regardless of any total-variation number.
    """
    msgs = []
    s1 = True
    s2 = consts.finite("l1")
    s3 = consts.finite("c_m1")
    s4 = consts.finite("c_p1")
    continuous = not isinstance(rho, DiracComb)
    s5 = continuous and consts.finite("c_prime")
    if not s2:
        msgs.append("S2 fails: total spectral mass diverges")
    if not s3:
        msgs.append("S3 fails: infrared moment int rho/mu diverges "
                    "(density does not vanish fast enough at mu=0)")
    if not s4:
        msgs.append("S4 fails: ultraviolet moment int mu*rho diverges")
    if not s5:
        if continuous:
            msgs.append("S5 fails: |rho'| is not integrable")
        else:
            msgs.append("S5 fails: atomic density is not absolutely "
                        "continuous; mass-averaging decay is unavailable")
    path = "spectral-averaging" if s5 else "discrete-spectrum"
    return ConditionReport(s1, s2, s3, s4, s5, tuple(msgs), path)
