"""Fitting the generic constants of bound shapes.

A bound ``q(h) <= C * rate(h)`` is checked by computing the minimal constant
``C_h = q(h) / rate(h)`` at every scanned ``h``.  The shape holds when the
constants do not drift upward: the log-log slope of ``C_h`` over the upper
half of the scan must stay below ``STABLE_SLOPE``.  Exponential bounds
``q(h) <= C exp(-gamma h**(2 eps))`` are fitted by least squares of
``log q`` on ``h**(2 eps)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STABLE_SLOPE = 0.1


@dataclass
class ShapeFit:
    constants: list[float]
    c_star: float
    slope: float
    stable: bool

    def as_dict(self) -> dict:
        return {"C_star": self.c_star, "upper_half_slope": self.slope, "stable": self.stable}


def upper_half(hs) -> slice:
    return slice(len(hs) // 2, len(hs))


def shape_fit(hs, values, rate) -> ShapeFit:
    hs = np.asarray(hs, dtype=float)
    c = np.asarray(values, dtype=float) / np.array([rate(h) for h in hs])
    sl = upper_half(hs)
    hu, cu = hs[sl], c[sl]
    if len(hu) >= 2 and np.all(cu > 0):
        slope = float(np.polyfit(np.log(hu), np.log(cu), 1)[0])
    else:
        slope = 0.0
    finite = bool(np.all(np.isfinite(c)))
    return ShapeFit(c.tolist(), float(c.max()) if len(c) else 0.0, slope,
                    finite and slope <= STABLE_SLOPE)


@dataclass
class ExpFit:
    gamma: float
    c: float
    n_used: int
    decaying: bool

    def as_dict(self) -> dict:
        return {"gamma": self.gamma, "C": self.c, "points_used": self.n_used,
                "decaying": self.decaying}


def exponential_fit(hs, values, eps: float) -> ExpFit:
    """Fit over the upper half of the scan.  Values that are exactly zero
    satisfy any exponential bound and are left out of the regression; if
    all of them are zero the decay is trivially confirmed."""
    hs = np.asarray(hs, dtype=float)
    q = np.asarray(values, dtype=float)
    sl = upper_half(hs)
    xs, qs = hs[sl] ** (2 * eps), q[sl]
    pos = qs > 0
    if pos.sum() == 0:
        return ExpFit(math.inf, 0.0, 0, True)
    if pos.sum() == 1:
        return ExpFit(float("nan"), float(qs[pos][0]), 1, False)
    slope, _ = np.polyfit(xs[pos], np.log(qs[pos]), 1)
    gamma = float(-slope)
    allx = hs ** (2 * eps)
    c = float(np.max(q * np.exp(gamma * allx))) if gamma < math.inf else 0.0
    return ExpFit(gamma, c, int(pos.sum()), gamma > 0)


def loglog_exponent(hs, values) -> float:
    hs = np.asarray(hs, dtype=float)
    v = np.asarray(values, dtype=float)
    return float(np.polyfit(np.log(hs), np.log(v), 1)[0])


def band(h: int, eps: float, minus: bool = False) -> list[int]:
    """Starts ``k >= 0`` with ``|h - 2k| <= h**(1/2 + eps)`` (or ``1/2 - eps``)."""
    w = h ** (0.5 - eps if minus else 0.5 + eps)
    return [k for k in range(0, h + 1) if abs(h - 2 * k) <= w]
