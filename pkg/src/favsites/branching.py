"""Critical geometric branching chains, with and without one immigrant.

``pi(i, .)`` is the law of a sum of ``i`` independent geometric(1/2) variables
on {0, 1, ...} (negative binomial with ``i`` successes); ``rho(i, .)`` adds one
more summand, so ``rho(i, j) == pi(i + 1, j)``.  The Y chain moves by ``pi``
and is absorbed at 0; the Z chain moves by ``rho``.

Exact values are ``Fraction`` with power-of-two denominators.  Tails and
partial moments use closed forms through the binomial distribution, so a
truncated row can be checked against an independently computed residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Protocol

import numpy as np
from scipy import stats

from . import chain_kernels as ck
from .rng import BitStream, stream_state

EXACT_THRESHOLD = 64
KINDS = ("pi", "rho")
LN2 = math.log(2.0)


class BitSource(Protocol):
    def geometric(self) -> int: ...


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"kernel kind must be 'pi' or 'rho', got {kind!r}")


def _nb_size(kind: str, i: int) -> int:
    """Number of geometric summands behind a kernel row."""
    return i if kind == "pi" else i + 1


# --------------------------------------------------------------------------
# exact kernel values, tails and partial moments


def pi_exact(i: int, j: int) -> Fraction:
    if i < 0:
        raise ValueError("i must be non-negative")
    if j < 0:
        return Fraction(0)
    if i == 0:
        return Fraction(1 if j == 0 else 0)
    return Fraction(math.comb(i + j - 1, j), 1 << (i + j))


def rho_exact(i: int, j: int) -> Fraction:
    if i < 0:
        raise ValueError("i must be non-negative")
    if j < 0:
        return Fraction(0)
    return Fraction(math.comb(i + j, j), 1 << (i + j + 1))


def nb_tail_direct(n: int, m: int) -> Fraction:
    """P(NB(n) >= m) by summing the binomial from the bottom; slow but plain."""
    if m <= 0:
        return Fraction(1)
    if n == 0:
        return Fraction(0)
    trials = n + m - 1
    return Fraction(sum(math.comb(trials, r) for r in range(n)), 1 << trials)


def _binom_run(N: int, a: int, b: int) -> int:
    """sum of C(N, j) for a <= j <= b, by the multiplicative recurrence."""
    if a > b:
        return 0
    c = math.comb(N, a)
    tot = c
    for j in range(a, b):
        c = c * (N - j) // (j + 1)
        tot += c
    return tot


@lru_cache(maxsize=65536)
def nb_tail_exact(n: int, m: int) -> Fraction:
    """P(NB(n) >= m), NB(n) = sum of n geometric(1/2) on {0, 1, ...}.

    NB(n) >= m iff the first n + m - 1 fair coin flips hold at most n - 1
    successes.  The binomial sum starts from whichever end is closer: the
    bottom, or the centre (where the lower half is known by symmetry).
    """
    if m <= 0:
        return Fraction(1)
    if n == 0:
        return Fraction(0)
    N = n + m - 1
    r = n - 1
    mid = (N - 1) // 2
    if r + 1 <= abs(r - mid):
        return Fraction(_binom_run(N, 0, r), 1 << N)
    # 2**N * P(B <= mid)
    base = (1 << (N - 1)) if N % 2 else (1 << (N - 1)) - math.comb(N, N // 2) // 2
    if r >= mid:
        num = base + _binom_run(N, mid + 1, r)
    else:
        num = base - _binom_run(N, r + 1, mid)
    return Fraction(num, 1 << N)


def tail_exact(kind: str, i: int, m: int) -> Fraction:
    """Sum over j >= m of kernel(i, j)."""
    _check_kind(kind)
    return nb_tail_exact(_nb_size(kind, i), m)


def partial_moment_exact(kind: str, i: int, m: int, order: int = 1) -> Fraction:
    """E[X**order ; X >= m] for X ~ kernel(i, .), order 1 or 2.

    Uses j * NB(n)(j) = n * NB(n+1)(j-1) and its second-factorial analogue.
    """
    _check_kind(kind)
    n = _nb_size(kind, i)
    first = n * nb_tail_exact(n + 1, m - 1)
    if order == 1:
        return first
    if order == 2:
        return n * (n + 1) * nb_tail_exact(n + 2, m - 2) + first
    raise ValueError("order must be 1 or 2")


# --------------------------------------------------------------------------
# floating-point counterparts (scipy's negative binomial)


def log_kernel(kind: str, i: int, j: int) -> float:
    _check_kind(kind)
    n = _nb_size(kind, i)
    if j < 0 or (n == 0 and j > 0):
        return -math.inf
    if n == 0:
        return 0.0
    return (math.lgamma(n + j) - math.lgamma(n) - math.lgamma(j + 1)
            - (n + j) * LN2)


def kernel_pmf(kind: str, i: int, j) -> np.ndarray:
    """Vectorised float kernel row values."""
    n = _nb_size(kind, i)
    j = np.asarray(j)
    if n == 0:
        return (j == 0).astype(float)
    return stats.nbinom.pmf(j, n, 0.5)


def tail_float(kind: str, i: int, m) -> np.ndarray:
    n = _nb_size(kind, i)
    m = np.asarray(m)
    if n == 0:
        return (m <= 0).astype(float)
    return np.where(m <= 0, 1.0, stats.nbinom.sf(m - 1, n, 0.5))


def partial_moment_float(kind: str, i: int, m: int, order: int = 1) -> float:
    n = _nb_size(kind, i)
    first = n * float(tail_float("pi", n + 1, m - 1))
    if order == 1:
        return first
    return n * (n + 1) * float(tail_float("pi", n + 2, m - 2)) + first


def kernel_pi(i: int, j: int):
    """pi(i, j): a Fraction when i + j <= EXACT_THRESHOLD, else a float
    evaluated in log space."""
    if i < 0 or j < 0:
        raise ValueError("i and j must be non-negative")
    if i + j <= EXACT_THRESHOLD:
        return pi_exact(i, j)
    return math.exp(log_kernel("pi", i, j))


def kernel_rho(i: int, j: int):
    if i < 0 or j < 0:
        raise ValueError("i and j must be non-negative")
    if i + j <= EXACT_THRESHOLD:
        return rho_exact(i, j)
    return math.exp(log_kernel("rho", i, j))


# --------------------------------------------------------------------------
# truncated exact rows


@dataclass(frozen=True)
class KernelRow:
    kind: str
    source: int
    probs: tuple[Fraction, ...]
    residual: Fraction
    tail_mean: Fraction

    @property
    def truncation(self) -> int:
        return len(self.probs) - 1

    def mass(self) -> Fraction:
        return sum(self.probs, Fraction(0)) + self.residual

    def mean(self) -> Fraction:
        return sum((j * p for j, p in enumerate(self.probs)), Fraction(0)) + self.tail_mean


def kernel_row(kind: str, i: int, j_max: int | None = None) -> KernelRow:
    """Exact row ``kernel(i, 0..j_max)`` with the residual tail mass and the
    tail's contribution to the mean, both from closed forms."""
    _check_kind(kind)
    if i < 0:
        raise ValueError("i must be non-negative")
    if j_max is None:
        j_max = 4 * i + 128
    exact = pi_exact if kind == "pi" else rho_exact
    probs = tuple(exact(i, j) for j in range(j_max + 1))
    residual = tail_exact(kind, i, j_max + 1)
    tail_mean = partial_moment_exact(kind, i, j_max + 1)
    return KernelRow(kind, i, probs, residual, tail_mean)


# --------------------------------------------------------------------------
# sampling


def sample_offspring_sum(kind: str, i: int, rng: BitSource) -> int:
    """One step of the chain from state ``i``, by summing geometric draws."""
    _check_kind(kind)
    if i < 0:
        raise ValueError("i must be non-negative")
    return sum(rng.geometric() for _ in range(_nb_size(kind, i)))


def sample_offspring_batch(kind: str, i: int, n: int, seed: int = 0) -> np.ndarray:
    _check_kind(kind)
    st = stream_state(seed)
    return ck.offspring_batch(st, _nb_size(kind, i), n)


# --------------------------------------------------------------------------
# chain runs


@dataclass
class ChainState:
    """Chain value with the previous value carried along for tilde sums.

    ``prev`` is the value one index earlier (``None`` when the chain starts
    here).  For the Z chain the tilde value includes the immigrant.
    """

    kind: str
    value: int
    t: int = 0
    prev: int | None = None

    def __post_init__(self):
        if self.kind not in ("Y", "Z"):
            raise ValueError("chain kind must be 'Y' or 'Z'")
        if self.value < 0:
            raise ValueError("chain value must be non-negative")

    @property
    def kernel(self) -> str:
        return "pi" if self.kind == "Y" else "rho"

    def tilde(self) -> int | None:
        if self.prev is None:
            return None
        return self.value + self.prev + (1 if self.kind == "Z" else 0)


INF = math.inf


@dataclass
class StopRecord:
    """Stopping times and functionals of one chain run (``inf`` = never)."""

    kind: str
    h: int
    variant: str
    start: int
    sigma: float = INF          # first t >= 0 with value >= h
    omega: float = INF          # first t >= 0 with value == 0 (Y only)
    tilde_times: list[int] = field(default_factory=list)
    tilde_values: list[int] = field(default_factory=list)
    max_jump: int = 0           # largest |step| up to sigma (and omega for Y)
    steps: int = 0
    stop_value: int = 0
    pre_stop_value: int | None = None
    path_sum: int = 0           # sum of values at times 0..steps-1
    censored: bool = False

    @property
    def tau(self) -> float:
        """Z-chain name for the level crossing time."""
        return self.sigma

    @property
    def absorbed_first(self) -> bool:
        return self.omega < self.sigma


VARIANTS = ("plain", "tilde", "absorb-race")


def run_chain_to_stop(start: ChainState, h: int, variant: str, rng: BitSource,
                      cap: int = 10**7, n_cross: int = 1,
                      horizon: int | None = None) -> StopRecord:
    """Run one chain from ``start`` and record stopping times.

    ``absorb-race`` stops at the level crossing or absorption, whichever is
    first.  ``plain`` keeps a Y chain going to absorption so both times are
    known (Z stops at the crossing).  ``tilde`` collects the first
    ``n_cross`` times ``t > previous`` with tilde value >= h, stopping early
    on absorption (Y) or at ``horizon`` steps.
    """
    if h < 1:
        raise ValueError("level h must be at least 1")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    is_y = start.kind == "Y"
    rec = StopRecord(start.kind, h, variant, start.value)
    v = start.value
    if v >= h:
        rec.sigma = 0
    if is_y and v == 0:
        rec.omega = 0
    jump_open = rec.sigma == INF and rec.omega == INF
    prev = v
    t = 0

    def finished() -> bool:
        if variant == "absorb-race":
            return rec.sigma < INF or rec.omega < INF
        if variant == "plain":
            return rec.sigma < INF if not is_y else rec.omega < INF
        if len(rec.tilde_times) >= n_cross:
            return True
        if horizon is not None and t >= horizon:
            return True
        # an absorbed Y chain has tilde value 0 from two steps on
        return is_y and v == 0 and prev == 0 and t >= 1

    while not finished():
        if t >= cap:
            rec.censored = True
            break
        prev = v
        rec.path_sum += v
        v = sample_offspring_sum(start.kernel, v, rng)
        t += 1
        if jump_open:
            rec.max_jump = max(rec.max_jump, abs(v - prev))
        if v >= h and rec.sigma == INF:
            rec.sigma = t
        if is_y and v == 0 and rec.omega == INF:
            rec.omega = t
        if rec.sigma < INF or rec.omega < INF:
            jump_open = False
        tv = v + prev + (0 if is_y else 1)
        if tv >= h and variant == "tilde":
            rec.tilde_times.append(t)
            rec.tilde_values.append(tv)
    rec.steps = t
    rec.stop_value = v
    rec.pre_stop_value = prev if t > 0 else None
    return rec


# --------------------------------------------------------------------------
# first passage by linear algebra


def _solve_exact(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    """Solve ``a @ x = b`` over the rationals (Gauss-Jordan, a nonsingular)."""
    n = len(a)
    m = len(b[0]) if b else 0
    aug = [list(a[r]) + list(b[r]) for r in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                row_c = aug[c]
                aug[r] = [x - f * y for x, y in zip(aug[r], row_c)]
    return [row[n:n + m] for row in aug]


@dataclass
class PassageSolution:
    """First passage above level ``h`` for every start ``0 <= k < h``.

    Arrays are indexed by the start state.  ``green[k, l]`` is the expected
    number of visits to ``l`` before the chain stops; ``pre_cross[k, l]`` is
    P(value one step before crossing is l, crossing happens);
    ``cross_value[k, v - h]`` holds P(value at crossing is v) for
    ``h <= v < cap`` and ``overflow[k]`` the mass at ``v >= cap``.
    Moments of the crossing value are exact (closed-form tails), taken on the
    event of crossing (multiply, not condition).
    """

    kind: str
    h: int
    cap: int
    exact: bool
    green: object
    absorb_prob: object
    cross_prob: object
    pre_cross: object
    cross_value: object
    overflow: object
    mean_stop: object
    second_moment_stop: object
    cross_mean: object
    cross_second: object
    path_sum: object
    stop_times_cross: object
    tolerance: float = 1e-12

    @property
    def truncation_error(self) -> float:
        return float(max(self.overflow)) if len(self.overflow) else 0.0

    @property
    def flagged(self) -> bool:
        return self.truncation_error > self.tolerance

    def joint(self, k: int) -> np.ndarray:
        """P(pre-crossing value l, crossing value v) as ``[l, v - h]``."""
        kern = "pi" if self.kind == "Y" else "rho"
        vs = np.arange(self.h, self.cap)
        g = np.asarray([float(x) for x in self.green[k]])
        out = np.zeros((self.h, len(vs)))
        for l in range(self.h):
            if g[l]:
                out[l] = g[l] * kernel_pmf(kern, l, vs)
        return out


def default_cap(h: int) -> int:
    return h + max(200, int(10 * math.sqrt(h)))


def first_passage_dp(kind: str, h: int, cap: int | None = None, exact: bool = False,
                     tolerance: float = 1e-12) -> PassageSolution:
    """Exact first-passage laws of the Y (``pi``) or Z (``rho``) chain.

    Y stops at the first value >= h or at absorption in 0; Z stops at the
    first value >= h.  With ``exact=True`` everything is a ``Fraction``.
    """
    if kind not in ("Y", "Z"):
        raise ValueError("kind must be 'Y' or 'Z'")
    if h < 1:
        raise ValueError("h must be at least 1")
    cap = default_cap(h) if cap is None else cap
    if cap < h + 1:
        raise ValueError("cap must exceed h")
    kern = "pi" if kind == "Y" else "rho"
    first = 1 if kind == "Y" else 0
    trans = list(range(first, h))
    nt = len(trans)

    if exact:
        one, zero = Fraction(1), Fraction(0)
        pmf = pi_exact if kern == "pi" else rho_exact
        A = [[(one if a == b else zero) - pmf(i, j) for b, j in enumerate(trans)]
             for a, i in enumerate(trans)]
        # columns: identity (for N), ones (for N 1)
        rhs = [[one if a == b else zero for b in range(nt)] for a in range(nt)]
        N = _solve_exact(A, rhs) if nt else []
        G = [[zero] * h for _ in range(h)]
        for a, i in enumerate(trans):
            for b, j in enumerate(trans):
                G[i][j] = N[a][b]
        exit_up = [tail_exact(kern, l, h) for l in range(h)]
        m1 = [partial_moment_exact(kern, l, h, 1) for l in range(h)]
        m2 = [partial_moment_exact(kern, l, h, 2) for l in range(h)]
        absorb_step = [pmf(l, 0) if kind == "Y" else zero for l in range(h)]
        rowsum = lambda vec, k: sum((G[k][l] * vec[l] for l in range(h)), zero)
        ones = [one] * h
        mean_stop = [rowsum(ones, k) for k in range(h)]
        # E[T^2] = ((2N - I) N 1)_k ; E[T X_T] = (N^2 m1)_k
        second = [2 * rowsum(mean_stop, k) - mean_stop[k] for k in range(h)]
        cross_mean = [rowsum(m1, k) for k in range(h)]
        stop_cross = [rowsum(cross_mean, k) for k in range(h)]
        cross_prob = [rowsum(exit_up, k) for k in range(h)]
        absorb = [rowsum(absorb_step, k) for k in range(h)]
        if kind == "Y":
            absorb[0] = one
        pre = [[G[k][l] * exit_up[l] for l in range(h)] for k in range(h)]
        vals = [[rowsum([pmf(l, v) for l in range(h)], k) for v in range(h, cap)]
                for k in range(h)]
        over = [rowsum([tail_exact(kern, l, cap) for l in range(h)], k) for k in range(h)]
        return PassageSolution(
            kind, h, cap, True, G, absorb, cross_prob, pre, vals, over, mean_stop, second,
            cross_mean, [rowsum(m2, k) for k in range(h)],
            [rowsum(list(range(h)), k) for k in range(h)], stop_cross, tolerance)

    Q = np.zeros((nt, nt))
    for a, i in enumerate(trans):
        Q[a] = kernel_pmf(kern, i, np.asarray(trans))
    N = np.linalg.inv(np.eye(nt) - Q) if nt else np.zeros((0, 0))
    G = np.zeros((h, h))
    if nt:
        G[np.ix_(trans, trans)] = N
    exit_up = np.array([float(tail_float(kern, l, h)) for l in range(h)])
    m1 = np.array([partial_moment_float(kern, l, h, 1) for l in range(h)])
    m2 = np.array([partial_moment_float(kern, l, h, 2) for l in range(h)])
    absorb_step = np.array([float(kernel_pmf(kern, l, 0)) if kind == "Y" else 0.0
                            for l in range(h)])
    mean_stop = G.sum(axis=1)
    second = 2 * G @ mean_stop - mean_stop
    cross_mean = G @ m1
    absorb = G @ absorb_step
    if kind == "Y":
        absorb[0] = 1.0
    vs = np.arange(h, cap)
    rows = np.array([kernel_pmf(kern, l, vs) for l in range(h)])
    tails_cap = np.array([float(tail_float(kern, l, cap)) for l in range(h)])
    return PassageSolution(
        kind, h, cap, False, G, absorb, G @ exit_up, G * exit_up[None, :], G @ rows,
        G @ tails_cap, mean_stop, second, cross_mean, G @ m2, G @ np.arange(h),
        G @ cross_mean, tolerance)


# --------------------------------------------------------------------------
# tilde processes: hits of Y_t + Y_{t-1} (or Z_t + Z_{t-1} + 1) at level h


@dataclass
class TildePassage:
    """Exact first-hit structure of a tilde process at level ``h``.

    For starts ``0 <= k <= k_max``: ``hit_exact[k, l]`` is the probability
    that the first tilde value >= h equals h with the chain at ``l`` then;
    ``no_hit[k]`` the probability that no tilde value ever reaches h (Y);
    ``mean_time[k]`` the expected first hitting time (Z; the Y version is
    the expectation on the event of hitting, unused).
    """

    kind: str
    h: int
    hit_exact: np.ndarray
    hit_any: np.ndarray
    no_hit: np.ndarray
    mean_time: np.ndarray

    def layered(self, p_max: int) -> np.ndarray:
        """Iterate the first-hit kernel: row p is the quantity with exactly p
        hits at level h and nothing above it (Y: probability; Z: expected
        number of horizons)."""
        base = self.no_hit if self.kind == "Y" else self.mean_time
        out = np.zeros((p_max + 1, len(base)))
        out[0] = base
        H = self.hit_exact
        for p in range(1, p_max + 1):
            nxt = np.zeros(len(base))
            nxt[: H.shape[0]] = H @ out[p - 1][: H.shape[1]]
            out[p] = nxt
        return out


def tilde_passage_dp(kind: str, h: int, k_max: int | None = None) -> TildePassage:
    if kind not in ("Y", "Z"):
        raise ValueError("kind must be 'Y' or 'Z'")
    if h < 1:
        raise ValueError("h must be at least 1")
    k_max = h if k_max is None else k_max
    kern = "pi" if kind == "Y" else "rho"
    shift = 0 if kind == "Y" else 1
    # states that can sit strictly below the tilde level after a move
    lo = 1 if kind == "Y" else 0
    trans = [i for i in range(lo, h) if i + shift < h]
    nt = len(trans)
    idx = {s: a for a, s in enumerate(trans)}
    Q = np.zeros((nt, nt))
    for a, i in enumerate(trans):
        for b, j in enumerate(trans):
            if i + j + shift < h:
                Q[a, b] = kernel_pmf(kern, i, j)
    N = np.linalg.inv(np.eye(nt) - Q) if nt else np.zeros((0, 0))
    ls = np.arange(h + 1)
    # from transient i: hit exactly h at l = h - shift - i
    exact_from = np.zeros((nt, h + 1))
    for a, i in enumerate(trans):
        l = h - shift - i
        if 0 <= l <= h:
            exact_from[a, l] = kernel_pmf(kern, i, l)
    absorb_from = np.array([float(kernel_pmf(kern, i, 0)) if kind == "Y" else 0.0
                            for i in trans])
    hit_any_from = np.array([float(tail_float(kern, i, max(h - shift - i, 0))) for i in trans])
    NE = N @ exact_from if nt else np.zeros((0, h + 1))
    Nabs = N @ absorb_from if nt else np.zeros(0)
    Nhit = N @ hit_any_from if nt else np.zeros(0)
    N1 = N.sum(axis=1) if nt else np.zeros(0)

    K = k_max + 1
    hit_exact = np.zeros((K, h + 1))
    hit_any = np.zeros(K)
    no_hit = np.zeros(K)
    mean_time = np.zeros(K)
    for k in range(K):
        if kind == "Y" and k == 0:
            no_hit[k] = 1.0
            continue
        l0 = h - shift - k
        if 0 <= l0 <= h:
            hit_exact[k, l0] += kernel_pmf(kern, k, l0)
        hit_any[k] = float(tail_float(kern, k, max(l0, 0)))
        mean_time[k] = 1.0
        first = [j for j in trans if k + j + shift < h]
        if first:
            w = kernel_pmf(kern, k, np.asarray(first))
            rows = [idx[j] for j in first]
            hit_exact[k] += w @ NE[rows]
            hit_any[k] += w @ Nhit[rows]
            mean_time[k] += w @ N1[rows]
            if kind == "Y":
                no_hit[k] += w @ Nabs[rows]
        if kind == "Y" and k + shift < h:
            no_hit[k] += float(kernel_pmf(kern, k, 0))
    return TildePassage(kind, h, hit_exact, hit_any, no_hit, mean_time)


# --------------------------------------------------------------------------
# moment generating functions of a centred geometric step


def offspring_mgf(theta: float, sign: str = "+") -> float:
    """E exp(+-theta (xi - 1)) for xi geometric(1/2) on {0, 1, ...}."""
    if theta < 0:
        raise ValueError("theta must be non-negative")
    if sign == "+":
        if theta >= LN2:
            raise ValueError(f"theta={theta} is at or beyond the pole ln 2")
        return math.exp(-theta) / (2.0 - math.exp(theta))
    if sign == "-":
        return math.exp(2 * theta) / (2.0 * math.exp(theta) - 1.0)
    raise ValueError("sign must be '+' or '-'")


def offspring_mgf_series(theta: float, sign: str = "+", terms: int = 4000) -> float:
    """Truncated series for :func:`offspring_mgf`, summed smallest term first."""
    s = 1.0 if sign == "+" else -1.0
    ks = np.arange(terms, dtype=float)[::-1]
    return float(np.sum(np.exp(-(ks + 1) * LN2 + s * theta * (ks - 1))))


def kolmogorov_theta0(grid: int = 200000, upper: float = 0.69) -> float:
    """Largest theta such that both centred MGFs stay below exp(2 theta**2)
    on all of (0, theta]; found on a fine grid."""
    th = np.linspace(upper / grid, upper, grid)
    plus = np.exp(-th) / (2.0 - np.exp(th))
    minus = np.exp(2 * th) / (2.0 * np.exp(th) - 1.0)
    bound = np.exp(2 * th * th)
    bad = (plus >= bound) | (minus >= bound)
    if not bad.any():
        return float(upper)
    first = int(np.argmax(bad))
    return float(th[first - 1]) if first > 0 else 0.0


def python_stream(seed: int) -> BitStream:
    return BitStream(seed)
