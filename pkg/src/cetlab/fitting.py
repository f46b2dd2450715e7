"""Log-log least squares shared by the decay-rate checks."""

from __future__ import annotations

import numpy as np


def fit_loglog(t, values, shift: float = 1.0) -> tuple[float, float, float]:
    """Fit values ~ amplitude * (shift+t)**exponent by least squares in logs.

    Returns (exponent, amplitude, r_squared).  Caller guarantees values > 0.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    x = np.log(shift + t)
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(np.exp(intercept)), r2
