"""Jitted Monte Carlo kernels for the branching chains.

Every sample ``p`` draws from replica stream ``first + p`` of ``master``, so a
batch can be split across workers in any way without changing a single draw.
``n_geo_extra`` is 0 for the Y chain (kernel pi) and 1 for Z (kernel rho).
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .rng import negbin, seed_replica

OUTCOME_ABSORBED = 0
OUTCOME_CROSSED = 1
OUTCOME_CENSORED = 2


@njit(cache=True)
def offspring_batch(st, n_geo, n):
    out = np.empty(n, dtype=np.int64)
    for p in range(n):
        out[p] = negbin(st, n_geo)
    return out


@njit(cache=True)
def offspring_replicas(master, first, n, n_geo):
    st = np.zeros(6, dtype=np.uint64)
    out = np.empty(n, dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        out[p] = negbin(st, n_geo)
    return out


@njit(cache=True)
def race_batch(master, first, n, extra, k, h, cap):
    """Run from ``k`` to the first value >= h, or to 0 when ``extra == 0``.

    Rows: (outcome, steps, value at stop, value before stop, sum of values at
    times 0..steps-1, largest |jump| up to the stop).
    """
    st = np.zeros(6, dtype=np.uint64)
    out = np.zeros((n, 6), dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        v = k
        prev = k
        t = 0
        total = 0
        jump = 0
        outcome = OUTCOME_CENSORED
        while True:
            if v >= h:
                outcome = OUTCOME_CROSSED
                break
            if extra == 0 and v == 0:
                outcome = OUTCOME_ABSORBED
                break
            if t >= cap:
                break
            prev = v
            total += v
            v = negbin(st, v + extra)
            t += 1
            d = v - prev
            if d < 0:
                d = -d
            if d > jump:
                jump = d
        out[p, 0] = outcome
        out[p, 1] = t
        out[p, 2] = v
        out[p, 3] = prev
        out[p, 4] = total
        out[p, 5] = jump
    return out


@njit(cache=True)
def fixed_horizon_batch(master, first, n, extra, k, t_end):
    """Chain value at time ``t_end`` and the running sum of values before it."""
    st = np.zeros(6, dtype=np.uint64)
    out = np.zeros((n, 2), dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        v = k
        total = 0
        for _ in range(t_end):
            total += v
            v = negbin(st, v + extra)
        out[p, 0] = v
        out[p, 1] = total
    return out


@njit(cache=True)
def tilde_y_batch(master, first, n, k, h, p_max, cap):
    """Classify the tilde sums Y_t + Y_{t-1}, t >= 1, of a Y chain from ``k``.

    Returns per sample: p in 0..p_max when the maximum is h with exactly p
    hits (p = 0: the maximum stays below h), -1 when some tilde value exceeds
    h, p_max + 1 when there are more than p_max hits, -2 when censored.
    """
    st = np.zeros(6, dtype=np.uint64)
    out = np.zeros(n, dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        v = k
        hits = 0
        res = -2
        t = 0
        while t < cap:
            prev = v
            v = negbin(st, v)
            t += 1
            s = v + prev
            if s > h:
                res = -1
                break
            if s == h:
                hits += 1
                if hits > p_max:
                    res = p_max + 1
                    break
            if v == 0 and prev == 0:
                res = hits
                break
            if v == 0:
                # next tilde value is 0 + 0; nothing more can happen
                res = hits
                break
        out[p] = res
    return out


@njit(cache=True)
def tilde_z_batch(master, first, n, k, h, p_max, cap):
    """Per-sample counts of horizons x behind the sums over x of the
    tilde-Z events with exactly p hits at level h, p = 0..p_max.

    Column p holds (time of hit p+1) - (time of hit p) when the first p hits
    of Z_t + Z_{t-1} + 1 >= h all equal h, else 0; hit 0 is time 0.  The
    last column flags censoring.
    """
    st = np.zeros(6, dtype=np.uint64)
    out = np.zeros((n, p_max + 2), dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        v = k
        t = 0
        last = 0
        hits = 0
        exact = True
        while True:
            if t >= cap:
                out[p, p_max + 1] = 1
                break
            prev = v
            v = negbin(st, v + 1)
            t += 1
            s = v + prev + 1
            if s >= h:
                if exact:
                    out[p, hits] = t - last
                last = t
                if s != h:
                    exact = False
                hits += 1
                if hits > p_max or not exact:
                    break
    return out


@njit(cache=True)
def kolmogorov_batch(master, first, n, n_steps):
    """max over j <= n_steps of |sum_{i<=j} (xi_i - 1)|, xi geometric(1/2)."""
    st = np.zeros(6, dtype=np.uint64)
    out = np.zeros(n, dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        s = 0
        m = 0
        for _ in range(n_steps):
            s += negbin(st, 1) - 1
            a = s if s >= 0 else -s
            if a > m:
                m = a
        out[p] = m
    return out
