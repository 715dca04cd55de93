"""Jitted samplers for patched branching profiles and for the matching walk
ledgers at an upcrossing inverse local time.

Profile draws consume the replica stream in the order: Z chain, right Y
chain, left Y' chain.  ``adjusted`` selects the first left step kernel
(``rho`` when true, ``pi`` otherwise).
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .rng import negbin, next_bit, seed_replica


@njit(cache=True)
def profile_window_batch(master, first, n, x, k, adjusted, lo, hi):
    """Delta(y) for y in [lo, hi] (lo <= 0, hi >= x - 1) for each replica."""
    st = np.zeros(6, dtype=np.uint64)
    w = hi - lo + 1
    out = np.zeros((n, w), dtype=np.int64)
    z = np.zeros(x, dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        z[0] = k
        for t in range(1, x):
            z[t] = negbin(st, z[t - 1] + 1)
        for y in range(max(lo, 0), min(hi, x - 1) + 1):
            out[p, y - lo] = z[x - 1 - y]
        v = k
        for y in range(x, hi + 1):
            v = negbin(st, v)
            out[p, y - lo] = v
        v = z[x - 1]
        for y in range(-1, lo - 1, -1):
            if y == -1 and adjusted:
                v = negbin(st, v + 1)
            else:
                v = negbin(st, v)
            out[p, y - lo] = v
    return out


@njit(cache=True)
def walk_window_batch(master, first, n, x, k_up, lo, hi, compress, cap):
    """Down-crossing counts D(T, y), y in [lo, hi], at T = T_U(k_up, x).

    With ``compress`` the walk never leaves [lo, hi]: a step above ``hi``
    is an excursion that must come back (the stop site is inside), and it
    is replaced by its only in-window trace, one down-crossing into ``hi``;
    a step below ``lo`` leaves no trace in the window at all.  Rows end
    with a censoring flag (cap on consumed bits).
    """
    st = np.zeros(6, dtype=np.uint64)
    w = hi - lo + 1
    out = np.zeros((n, w + 1), dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        s = 0
        ups = 0
        t = 0
        while True:
            if t >= cap:
                out[p, w] = 1
                break
            b = next_bit(st)
            t += 1
            if b == 1:
                if compress and s == hi:
                    out[p, hi - lo] += 1
                    continue
                s += 1
                if s == x:
                    ups += 1
                    if ups == k_up:
                        break
            else:
                if compress and s == lo:
                    continue
                s -= 1
                if lo <= s <= hi:
                    out[p, s - lo] += 1
    return out


@njit(cache=True)
def profile_favourite_batch(master, first, n, x, k, adjusted, r_target, cap):
    """Favourite structure of Lambda for profiles (x, k).

    Rows: (event, ties, x_is_max, censored) where ``event`` means x attains
    the maximum and exactly ``r_target`` sites attain it.  Chains are cut as
    soon as the outcome is decided: any site above Lambda(x) rules x out,
    and more than ``r_target`` ties rules the event out.  ``ties`` is exact
    only when the run was not cut early.
    """
    st = np.zeros(6, dtype=np.uint64)
    out = np.zeros((n, 4), dtype=np.int64)
    z = np.zeros(x, dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        z[0] = k
        for t in range(1, x):
            z[t] = negbin(st, z[t - 1] + 1)
        # right chain: Delta(x-1) = k, Delta(x) = Y_0
        right = negbin(st, k)
        hx = right + k + 1
        ties = 1
        alive = True
        # sites 1 .. x-1: Lambda(y) = Delta(y) + Delta(y-1) + 1
        for y in range(1, x):
            lam = z[x - 1 - y] + z[x - y] + 1
            if lam > hx:
                alive = False
                break
            if lam == hx:
                ties += 1
        steps = 0
        censored = False
        prev = right
        while alive and prev > 0:
            if steps >= cap:
                censored = True
                break
            nxt = negbin(st, prev)
            steps += 1
            lam = nxt + prev
            if lam > hx:
                alive = False
            elif lam == hx:
                ties += 1
            if ties > r_target:
                break
            prev = nxt
        if alive and not censored and ties <= r_target:
            # left side: Lambda(0) = Delta(0) + Delta(-1), then further left
            prev = z[x - 1]
            first_left = True
            while True:
                if steps >= cap:
                    censored = True
                    break
                if first_left and adjusted:
                    nxt = negbin(st, prev + 1)
                else:
                    nxt = negbin(st, prev)
                first_left = False
                steps += 1
                lam = nxt + prev
                if lam > hx:
                    alive = False
                    break
                if lam == hx:
                    ties += 1
                    if ties > r_target:
                        break
                if nxt == 0:
                    break
                prev = nxt
        out[p, 0] = 1 if (alive and not censored and ties == r_target) else 0
        out[p, 1] = ties
        out[p, 2] = 1 if alive else 0
        out[p, 3] = 1 if censored else 0
    return out
