"""Array-backed walk kernels for bulk simulation.

Same update rule as :func:`favsites.walk_core.advance_step`, with the ledger
stored as offset arrays and the favourite set summarised by
``(max_local, n_fav)``.  Membership of a site is ``local[x] == max_local``.
All counters are integers.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .rng import next_bit, seed_replica

# violation slots reported by identity_suite
VIOLATION_NAMES = (
    "up_balance",
    "down_balance",
    "local_from_down",
    "local_from_up",
    "trichotomy",
    "favourite_recompute",
    "f_monotone",
)


@njit(inline="always", cache=True)
def _ind(c):
    return 1 if c else 0


@njit(cache=True)
def _check_site(up, down, off, x, s, viol):
    right = _ind(0 < x <= s) - _ind(s < x <= 0)
    left = _ind(s <= x < 0) - _ind(0 <= x < s)
    u = up[x + off]
    d = down[x + off]
    loc = u + d
    if u - down[x - 1 + off] != right:
        viol[0] += 1
    if d - up[x + 1 + off] != left:
        viol[1] += 1
    if loc != d + down[x - 1 + off] + right:
        viol[2] += 1
    if loc != u + up[x + 1 + off] + left:
        viol[3] += 1


@njit(cache=True)
def _checkpoint(up, down, off, lo, hi, s, max_local, n_fav, f, viol):
    for x in range(lo - 1, hi + 2):
        _check_site(up, down, off, x, s, viol)
    m = 0
    c = 0
    for x in range(lo, hi + 1):
        v = up[x + off] + down[x + off]
        if v > m:
            m = v
            c = 1
        elif v == m:
            c += 1
    if m != max_local or c != n_fav:
        viol[5] += 1
    for r in range(1, f.shape[0]):
        if f[r] > f[r - 1]:
            viol[6] += 1


@njit(cache=True)
def _identity_path(st, n_steps, up, down, off, f, checkpoint, viol):
    s = 0
    lo = 0
    hi = 0
    max_local = 0
    n_fav = 0
    r_max = f.shape[0]
    for t in range(1, n_steps + 1):
        b = next_bit(st)
        if b == 1:
            s += 1
            up[s + off] += 1
        else:
            s -= 1
            down[s + off] += 1
        if s < lo:
            lo = s
        if s > hi:
            hi = s
        loc = up[s + off] + down[s + off]
        # the step must fall in exactly one branch of the trichotomy
        if loc > max_local + 1:
            viol[4] += 1
        if loc > max_local:
            max_local = loc
            n_fav = 1
            if r_max >= 1:
                f[0] += 1
        elif loc == max_local:
            n_fav += 1
            if n_fav <= r_max:
                f[n_fav - 1] += 1
        if n_fav < 1:
            viol[4] += 1
        for x in range(s - 2, s + 3):
            _check_site(up, down, off, x, s, viol)
        if checkpoint > 0 and t % checkpoint == 0:
            _checkpoint(up, down, off, lo, hi, s, max_local, n_fav, f, viol)
    _checkpoint(up, down, off, lo, hi, s, max_local, n_fav, f, viol)
    for x in range(lo - 1, hi + 2):
        up[x + off] = 0
        down[x + off] = 0


@njit(cache=True)
def identity_suite_kernel(master, first, n, n_steps, r_max, checkpoint):
    """Run paths for replicas ``first .. first + n - 1``; returns
    (violations, summed f counters, per-path f counters)."""
    st = np.zeros(6, dtype=np.uint64)
    off = n_steps + 3
    up = np.zeros(2 * off + 1, dtype=np.int64)
    down = np.zeros(2 * off + 1, dtype=np.int64)
    viol = np.zeros(len(VIOLATION_NAMES), dtype=np.int64)
    f_all = np.zeros((n, r_max), dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        _identity_path(st, n_steps, up, down, off, f_all[p], checkpoint, viol)
    return viol, f_all.sum(axis=0), f_all


# histogram feature slots for fixed_time_histograms
FEATURES = ("n_fav", "on_fav_n", "max_local", "local_origin", "position", "f1", "f2", "f3", "f4")


@njit(cache=True)
def fixed_time_histograms(master, first, n, t_max):
    """Histograms over paths of path functionals at every t = 1..t_max.

    ``hist[t-1, feature, value]`` counts paths; the ``position`` feature is
    stored shifted by ``t_max``; ``on_fav_n`` is ``#K(t)`` when the walker
    stands on a favourite and 0 otherwise.
    """
    st = np.zeros(6, dtype=np.uint64)
    nv = 2 * t_max + 2
    hist = np.zeros((t_max, 9, nv), dtype=np.int64)
    off = t_max + 1
    loc = np.zeros(2 * off + 1, dtype=np.int64)
    f = np.zeros(4, dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        s = 0
        max_local = 0
        n_fav = 0
        f[:] = 0
        for t in range(1, t_max + 1):
            s += 2 * next_bit(st) - 1
            loc[s + off] += 1
            v = loc[s + off]
            on = 0
            if v > max_local:
                max_local = v
                n_fav = 1
                on = 1
            elif v == max_local:
                n_fav += 1
                on = n_fav
            if on > 0 and on <= 4:
                f[on - 1] += 1
            row = hist[t - 1]
            row[0, n_fav] += 1
            row[1, on] += 1
            row[2, max_local] += 1
            row[3, loc[off]] += 1
            row[4, s + t_max] += 1
            for r in range(4):
                row[5 + r, f[r]] += 1
        loc[:] = 0
    return hist


@njit(cache=True)
def _grow(arr, off):
    """Double an offset array around its centre; returns (new_arr, new_off)."""
    new_off = 2 * off
    out = np.zeros(2 * new_off + 1, dtype=arr.dtype)
    out[new_off - off:new_off + off + 1] = arr
    return out, new_off


@njit(cache=True)
def inverse_up_favourites(master, first, n, k, x, cap):
    """Walk each stream to T_U(k, x); report the favourite structure there.

    Returns int64 array rows ``(censored, n_fav, x_is_favourite, stop_time)``.
    """
    st = np.zeros(6, dtype=np.uint64)
    out = np.zeros((n, 4), dtype=np.int64)
    off0 = 256
    for p in range(n):
        seed_replica(master, first + p, st)
        off = off0
        loc = np.zeros(2 * off + 1, dtype=np.int64)
        s = 0
        ups = 0
        max_local = 0
        n_fav = 0
        t = 0
        done = False
        while t < cap:
            b = next_bit(st)
            t += 1
            if b == 1:
                s += 1
                if s == x:
                    ups += 1
            else:
                s -= 1
            if s >= off or s <= -off:
                loc, off = _grow(loc, off)
            loc[s + off] += 1
            v = loc[s + off]
            if v > max_local:
                max_local = v
                n_fav = 1
            elif v == max_local:
                n_fav += 1
            if b == 1 and s == x and ups == k:
                done = True
                break
        if done:
            out[p, 0] = 0
            out[p, 1] = n_fav
            out[p, 2] = 1 if loc[x + off] == max_local else 0
            out[p, 3] = t
        else:
            out[p, 0] = 1
            out[p, 3] = t
    return out


@njit(cache=True)
def longrun_windows(st, n_steps, r_max):
    """f-event counts of one walk split by dyadic windows [2**j, 2**(j+1)).

    Returns ``counts[j, r-1]`` for r = 1..r_max.
    """
    n_win = 1
    while (1 << n_win) <= n_steps:
        n_win += 1
    counts = np.zeros((n_win, r_max), dtype=np.int64)
    off = 1024
    loc = np.zeros(2 * off + 1, dtype=np.int64)
    s = 0
    max_local = 0
    n_fav = 0
    j = 0
    nxt = 2
    for t in range(1, n_steps + 1):
        if t == nxt:
            j += 1
            nxt <<= 1
        s += 2 * next_bit(st) - 1
        if s >= off or s <= -off:
            loc, off = _grow(loc, off)
        loc[s + off] += 1
        v = loc[s + off]
        if v > max_local:
            max_local = v
            n_fav = 1
            counts[j, 0] += 1
        elif v == max_local:
            n_fav += 1
            if n_fav <= r_max:
                counts[j, n_fav - 1] += 1
    return counts


@njit(cache=True)
def longrun_batch(master, first, n, n_steps, r_max):
    """:func:`longrun_windows` over replica streams; shape (n, windows, r_max)."""
    st = np.zeros(6, dtype=np.uint64)
    n_win = 1
    while (1 << n_win) <= n_steps:
        n_win += 1
    out = np.zeros((n, n_win, r_max), dtype=np.int64)
    for p in range(n):
        seed_replica(master, first + p, st)
        out[p] = longrun_windows(st, n_steps, r_max)
    return out
