"""Goodness-of-fit tests with tail pooling, and small interval helpers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

MIN_EXPECTED = 5.0


@dataclass
class GofResult:
    observed: np.ndarray
    expected: np.ndarray
    statistic: float
    dof: int
    p_value: float
    pooling: str
    n: int

    def passes(self, alpha: float) -> bool:
        return self.p_value >= alpha


def _pool(obs: np.ndarray, exp: np.ndarray, min_expected: float):
    """Accumulate cells left to right until each pooled expected count
    reaches ``min_expected``; a short remainder joins the last cell."""
    po, pe = [], []
    co = ce = 0.0
    for o, e in zip(obs, exp):
        co += o
        ce += e
        if ce >= min_expected:
            po.append(co)
            pe.append(ce)
            co = ce = 0.0
    if ce > 0 or co > 0:
        if pe:
            po[-1] += co
            pe[-1] += ce
        else:
            po.append(co)
            pe.append(ce)
    return np.array(po), np.array(pe), len(obs) - len(pe)


def goodness_of_fit(samples, probs, censored: float = 0.0,
                    min_expected: float = MIN_EXPECTED) -> GofResult:
    """Chi-square test of integer ``samples`` against a law on 0..len(probs)-1.

    ``probs`` may be Fractions.  Mass beyond the table (``censored`` plus
    whatever the table misses) forms an overflow cell holding every sample
    >= len(probs).
    """
    samples = np.asarray(samples, dtype=np.int64)
    n = len(samples)
    if n == 0:
        raise ValueError("no samples")
    p = np.array([float(x) for x in probs])
    if p.size == 0 or p.sum() <= 0:
        raise ValueError("empty support")
    if samples.min() < 0:
        raise ValueError("samples must be non-negative integers")
    over = max(1.0 - p.sum(), 0.0) + float(censored)
    counts = np.bincount(np.minimum(samples, len(p)), minlength=len(p) + 1).astype(float)
    exp = np.append(p, over) * n
    return gof_counts(counts, exp, min_expected)


def gof_counts(observed, expected, min_expected: float = MIN_EXPECTED) -> GofResult:
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    n = int(round(obs.sum()))
    # cells the law forbids must be empty
    if np.any((exp == 0) & (obs > 0)):
        return GofResult(obs, exp, float("inf"), 0, 0.0, "impossible cell hit", n)
    keep = exp > 0
    po, pe, merges = _pool(obs[keep], exp[keep], min_expected)
    if len(pe) <= 1:
        return GofResult(po, pe, 0.0, 0, 1.0, f"degenerate after {merges} merges", n)
    stat = float(((po - pe) ** 2 / pe).sum())
    dof = len(pe) - 1
    return GofResult(po, pe, stat, dof, float(stats.chi2.sf(stat, dof)),
                     f"{merges} merges", n)


def two_sample(a, b, min_expected: float = MIN_EXPECTED) -> GofResult:
    """Chi-square homogeneity test of two integer samples."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    top = int(max(a.max(initial=0), b.max(initial=0))) + 1
    ca = np.bincount(a, minlength=top).astype(float)
    cb = np.bincount(b, minlength=top).astype(float)
    return two_sample_counts(ca, cb, min_expected)


def two_sample_counts(ca, cb, min_expected: float = MIN_EXPECTED) -> GofResult:
    ca = np.asarray(ca, dtype=float)
    cb = np.asarray(cb, dtype=float)
    na, nb = ca.sum(), cb.sum()
    tot = ca + cb
    keep = tot > 0
    ca, cb, tot = ca[keep], cb[keep], tot[keep]
    # pool on the smaller expected count of the two rows
    ea = tot * na / (na + nb)
    eb = tot * nb / (na + nb)
    emin = np.minimum(ea, eb)
    cells = []
    cur = np.zeros(3)
    for x, y, e in zip(ca, cb, emin):
        cur += (x, y, e)
        if cur[2] >= min_expected:
            cells.append(cur.copy())
            cur[:] = 0
    if cur[2] > 0:
        if cells:
            cells[-1] += cur
        else:
            cells.append(cur.copy())
    c = np.array(cells)
    n = int(na + nb)
    if len(c) <= 1:
        return GofResult(c[:, :2], c[:, :2], 0.0, 0, 1.0, "single cell", n)
    table = c[:, :2].T
    stat, p, dof, exp = stats.chi2_contingency(table, correction=False)
    return GofResult(table, exp, float(stat), int(dof), float(p),
                     f"{len(ca) - len(c)} merges", n)


def bonferroni(p_values, alpha: float) -> tuple[bool, float]:
    """(all pass, per-test threshold) at family level ``alpha``."""
    p = list(p_values)
    if not p:
        return True, alpha
    thr = alpha / len(p)
    return all(x >= thr for x in p), thr


def proportion_se(p: float, n: int) -> float:
    return float(np.sqrt(max(p * (1 - p), 0.0) / n)) if n else float("inf")


def wilson_interval(k: int, n: int, z: float = 3.0) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + z * z / n
    c = (p + z * z / (2 * n)) / den
    h = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, c - h), min(1.0, c + h)


def mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return float(x.mean()) if len(x) else float("nan"), float("inf")
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(len(x)))


def as_fraction_list(probs) -> list[Fraction]:
    return [Fraction(p) for p in probs]
