"""Exact ground truth by enumeration and rational arithmetic.

Walk enumerations recompute everything from definitions (local time as a
visit count, favourites as the argmax of the local profile, f(r) by direct
count) instead of reusing the incremental update in :mod:`walk_core`, so
they can serve as an independent oracle for it.  All masses are
``Fraction`` with power-of-two denominators.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable

from .branching import pi_exact

T_MAX_CAP = 24
T_CAP_LIMIT = 30


def _enc(v):
    return list(map(_enc, v)) if isinstance(v, tuple) else v


def _dec(v):
    return tuple(map(_dec, v)) if isinstance(v, list) else v


@dataclass
class ExactDistribution:
    masses: dict = field(default_factory=dict)
    censored: Fraction = Fraction(0)

    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0)) + self.censored

    def prob(self, pred: Callable[[Hashable], bool] | Hashable) -> Fraction:
        if callable(pred):
            return sum((m for v, m in self.masses.items() if pred(v)), Fraction(0))
        return self.masses.get(pred, Fraction(0))

    def marginal(self, i: int) -> dict:
        out: dict = defaultdict(Fraction)
        for v, m in self.masses.items():
            out[v[i]] += m
        return dict(out)

    def mean(self) -> Fraction:
        return sum((v * m for v, m in self.masses.items()), Fraction(0))

    def to_json(self) -> str:
        items = sorted(([_enc(v), f"{m.numerator}/{m.denominator}"] for v, m in self.masses.items()),
                       key=lambda it: json.dumps(it[0]))
        return json.dumps({"masses": items,
                           "censored": f"{self.censored.numerator}/{self.censored.denominator}"})

    @classmethod
    def from_json(cls, text: str) -> "ExactDistribution":
        d = json.loads(text)
        return cls({_dec(v): Fraction(m) for v, m in d["masses"]}, Fraction(d["censored"]))


# --------------------------------------------------------------------------
# walk paths up to a fixed time


@dataclass
class PathView:
    """Read-only view of a path prefix handed to enumeration functionals."""

    t: int
    pos: int
    steps: tuple[int, ...]
    up: dict
    down: dict
    f: tuple[int, ...]

    def local(self, x: int) -> int:
        return self.up.get(x, 0) + self.down.get(x, 0)

    def favourites(self) -> tuple[int, set[int]]:
        prof = {x: self.local(x) for x in set(self.up) | set(self.down) if self.local(x) > 0}
        if not prof:
            return 0, set()
        m = max(prof.values())
        return m, {x for x, v in prof.items() if v == m}


def _walk_dfs(t_max: int, r_max: int, visit: Callable[[PathView], None]):
    up: dict = defaultdict(int)
    down: dict = defaultdict(int)
    steps: list[int] = []
    f = [0] * r_max

    def rec(pos: int):
        t = len(steps)
        if t == t_max:
            return
        for d in (1, -1):
            new = pos + d
            (up if d == 1 else down)[new] += 1
            steps.append(d)
            prof = {x: up[x] + down[x] for x in set(up) | set(down) if up[x] + down[x] > 0}
            m = max(prof.values())
            fav = [x for x, v in prof.items() if v == m]
            bumped = None
            if new in fav and len(fav) <= r_max:
                bumped = len(fav) - 1
                f[bumped] += 1
            visit(PathView(t + 1, new, tuple(steps), dict(up), dict(down), tuple(f)))
            rec(new)
            if bumped is not None:
                f[bumped] -= 1
            steps.pop()
            (up if d == 1 else down)[new] -= 1

    rec(0)


def enumerate_walk_functional(t_max: int, functional: Callable[[PathView], Hashable],
                              r_max: int = 6, cap: int = T_MAX_CAP) -> ExactDistribution:
    """Exact law of ``functional`` evaluated at time ``t_max``."""
    if t_max > cap:
        raise ValueError(f"t_max={t_max} exceeds the enumeration cap {cap}")
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    out: dict = defaultdict(int)
    if t_max == 0:
        out[functional(PathView(0, 0, (), {}, {}, tuple([0] * r_max)))] = 1
    else:
        def visit(pv: PathView):
            if pv.t == t_max:
                out[functional(pv)] += 1
        _walk_dfs(t_max, r_max, visit)
    den = 1 << t_max
    return ExactDistribution({v: Fraction(c, den) for v, c in out.items()})


FEATURES = ("n_fav", "on_fav_n", "max_local", "local_origin", "position", "f1", "f2", "f3", "f4")


def feature_values(pv: PathView) -> tuple[int, ...]:
    m, fav = pv.favourites()
    on = len(fav) if pv.pos in fav else 0
    return (len(fav), on, m, pv.local(0), pv.pos) + tuple(pv.f[:4])


def enumerate_feature_laws(t_max: int, cap: int = T_MAX_CAP) -> dict[int, dict[str, ExactDistribution]]:
    """Exact laws of every entry of :data:`FEATURES` at each t = 1..t_max,
    from a single depth-first pass."""
    if t_max > cap:
        raise ValueError(f"t_max={t_max} exceeds the enumeration cap {cap}")
    counts = {t: [defaultdict(int) for _ in FEATURES] for t in range(1, t_max + 1)}

    def visit(pv: PathView):
        for i, v in enumerate(feature_values(pv)):
            counts[pv.t][i][v] += 1

    _walk_dfs(t_max, 6, visit)
    return {t: {name: ExactDistribution({v: Fraction(c, 1 << t) for v, c in counts[t][i].items()})
                for i, name in enumerate(FEATURES)}
            for t in counts}


# --------------------------------------------------------------------------
# stopped paths


def enumerate_stopped_profile(spec, t_cap: int, sites=(-1, 0, 1), quantity: str = "both",
                              limit: int = T_CAP_LIMIT) -> ExactDistribution:
    """Exact joint law of down-crossing counts and/or local times on
    ``sites`` at the stop time of ``spec`` (a :class:`walk_core.StopSpec`).

    Paths are followed breadth first; paths whose tracked state agrees are
    merged and carried with an integer multiplicity, and a path leaves the
    frontier the moment its stop fires.  Values are tuples: down counts in
    ``sites`` order for ``down``, local times for ``local``, both (downs
    first) for ``both``.
    """
    if t_cap > limit:
        raise ValueError(f"T_cap={t_cap} exceeds the limit {limit}")
    if quantity not in ("down", "local", "both"):
        raise ValueError("quantity must be 'down', 'local' or 'both'")
    sites = tuple(sites)
    idx = {y: i for i, y in enumerate(sites)}
    ns = len(sites)
    kind = spec.kind
    if kind == "fixed_time":
        t_cap = min(t_cap, spec.t_max)

    def value(state):
        ups, downs = state[2], state[3]
        d = tuple(downs)
        loc = tuple(u + w for u, w in zip(ups, downs))
        return d if quantity == "down" else loc if quantity == "local" else d + loc

    # state: (pos, stop counter, ups on sites, downs on sites)
    frontier = {(0, 0, (0,) * ns, (0,) * ns): 1}
    done: dict = defaultdict(int)
    for t in range(1, t_cap + 1):
        nxt: dict = defaultdict(int)
        for (pos, cnt, ups, downs), c in frontier.items():
            for d in (1, -1):
                new = pos + d
                u, w = list(ups), list(downs)
                if new in idx:
                    (u if d == 1 else w)[idx[new]] += 1
                c2 = cnt
                if new == spec.x and ((kind == "inverse_up" and d == 1) or
                                      (kind == "inverse_down" and d == -1)):
                    c2 += 1
                st = (new, c2, tuple(u), tuple(w))
                stopped = (kind != "fixed_time" and c2 >= spec.k) or \
                          (kind == "fixed_time" and t == t_cap)
                if stopped:
                    done[value(st)] += c << (t_cap - t)
                else:
                    nxt[st] += c
        frontier = nxt
    den = 1 << t_cap
    censored = Fraction(sum(frontier.values()), den)
    return ExactDistribution({v: Fraction(m, den) for v, m in done.items()}, censored)


def stopped_marginal_check(dist: ExactDistribution, i: int, law: Callable[[int], Fraction],
                           support: int) -> tuple[bool, list]:
    """Sandwich ``enum(m) <= law(m) <= enum(m) + censored`` for m < support."""
    marg = dist.marginal(i)
    bad = []
    for m in range(support):
        e = marg.get(m, Fraction(0))
        if not (e <= law(m) <= e + dist.censored):
            bad.append((m, e, law(m)))
    return not bad, bad


# --------------------------------------------------------------------------
# kernel tails


@dataclass
class TailComputation:
    """``slack = bound - value``, kept even when negative."""

    query: str
    params: dict
    value: Fraction | float
    bound: Fraction | float | None
    slack: Fraction | float | None
    details: dict = field(default_factory=dict)


def _off_band(h: int, k: int, eps: float) -> bool:
    return abs(h - 2 * k) > h ** (0.5 + eps)


def offband_sum_exact(h: int, eps: float) -> Fraction:
    return sum((pi_exact(k, h - 1 - k) for k in range(0, h) if _off_band(h, k, eps)), Fraction(0))


def binomial_offband_exact(h: int, eps: float) -> Fraction:
    """Half the probability that a Bin(h-2, 1/2) variable is off band,
    summed over the binomial directly."""
    n = h - 2
    tot = sum(math.comb(n, l) for l in range(n + 1)
              if abs(2 * l - n) > (n + 2) ** (0.5 + eps))
    return Fraction(tot, 2 ** (n + 1))


def hit_ratio_exact(h: int, l: int) -> Fraction:
    """pi(l, h-l) over the tail sum of pi(l, .) from h-l."""
    from .branching import tail_exact
    if not 0 < l <= h:
        raise ValueError("need 0 < l <= h")
    return pi_exact(l, h - l) / tail_exact("pi", l, h - l)


def mgf_binomial_values(gamma: float, n_max: int) -> list[float]:
    """E exp(gamma (2B_n - n)^2 / n) for n = 1..n_max, by direct summation
    in log space."""
    out = []
    for n in range(1, n_max + 1):
        logs = [math.lgamma(n + 1) - math.lgamma(l + 1) - math.lgamma(n - l + 1)
                - n * math.log(2) + gamma * (2 * l - n) ** 2 / n for l in range(n + 1)]
        m = max(logs)
        out.append(math.exp(m) * math.fsum(math.exp(x - m) for x in logs))
    return out


def kernel_tail_exact(query: str, **params) -> TailComputation:
    """Exact tail quantities.

    ``offband`` (h, eps): the off-band sum of pi(k, h-1-k), checked
    against an independent binomial summation (bound = that value).
    ``band_total`` (h): sum over all k of pi(k, h-1-k), bound 1/2.
    ``mgf_sup`` (gamma, n_max): sup over n of the binomial exponential
    moment, bound = its Gaussian limit 1/sqrt(1 - 2 gamma).
    ``hit_ratio`` (h, l): the one-step exact-hit ratio; no bound.
    """
    if query == "offband":
        h, eps = params["h"], params["eps"]
        v = offband_sum_exact(h, eps)
        b = binomial_offband_exact(h, eps) if h >= 2 else None
        return TailComputation(query, params, v, b, None if b is None else b - v)
    if query == "band_total":
        h = params["h"]
        v = sum((pi_exact(k, h - 1 - k) for k in range(h)), Fraction(0))
        return TailComputation(query, params, v, Fraction(1, 2), Fraction(1, 2) - v)
    if query == "mgf_sup":
        g, n_max = params["gamma"], params["n_max"]
        if not 0 < g < 0.5:
            raise ValueError("gamma must lie in (0, 1/2)")
        vals = mgf_binomial_values(g, n_max)
        lim = 1 / math.sqrt(1 - 2 * g)
        return TailComputation(query, params, max(vals), lim, lim - max(vals),
                               {"values": vals, "argmax": int(max(range(n_max), key=vals.__getitem__)) + 1})
    if query == "hit_ratio":
        return TailComputation(query, params, hit_ratio_exact(params["h"], params["l"]), None, None)
    raise ValueError(f"unknown query {query!r}")


# --------------------------------------------------------------------------
# monotonicity facts, in integer arithmetic


@dataclass
class MonotonicityReport:
    ranges: dict
    checked: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    equality_cases: dict = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return sum(len(v) for v in self.violations.values())

    def ok(self) -> bool:
        return self.total_violations == 0

    def _add(self, name: str, good: bool, witness=None, equality: bool = False):
        self.checked[name] = self.checked.get(name, 0) + 1
        self.violations.setdefault(name, [])
        self.equality_cases.setdefault(name, 0)
        if equality:
            self.equality_cases[name] += 1
        if not good:
            self.violations[name].append(witness)


def _tails_scaled(l: int, u_max: int) -> list[int]:
    """S[u] = 2**(l + u_max) * P(NB(l) >= u) for u = 0..u_max + 1."""
    scale = 1 << (l + u_max)
    out = [scale]
    acc = 0
    for v in range(u_max + 1):
        term = (1 if v == 0 else 0) << u_max if l == 0 else math.comb(l + v - 1, v) << (u_max - v)
        acc += term
        out.append(scale - acc)
    return out


def ratio_monotonicity_check(i_max: int = 200, j_max: int = 500, l_max: int = 200,
                             v_max: int = 500, u_max: int = 500,
                             brute: tuple[int, int] = (12, 40)) -> MonotonicityReport:
    """Exact checks of the kernel ratio formulas, unimodality, the
    likelihood-ratio orderings and the tail orderings.

    Orderings over all pairs follow from adjacent checks by transitivity;
    a brute-force all-pairs pass over ``l <= brute[0]``, values up to
    ``brute[1]`` re-checks that reduction.  Points where the stated strict
    inequality is an identity (pi(0, .) is a point mass, or ``u = h``) are
    counted as equality cases, not violations.
    """
    rep = MonotonicityReport({"i_max": i_max, "j_max": j_max, "l_max": l_max,
                              "v_max": v_max, "u_max": u_max, "brute": list(brute)})
    C = math.comb
    # successive ratio formula and unimodality of pi(i, .)
    for i in range(1, i_max + 1):
        for j in range(j_max):
            a, b = C(i + j, j + 1), C(i + j - 1, j)
            rep._add("pi_step_ratio", a * (1 + j) == b * (i + j), (i, j))
            if i >= 2:
                # pi(i, j+1) vs pi(i, j)  <=>  a vs 2b
                if j <= i - 3:
                    rep._add("unimodal", a > 2 * b, (i, j, "rise"))
                elif j == i - 2:
                    rep._add("unimodal", a == 2 * b, (i, j, "flat"), equality=True)
                else:
                    rep._add("unimodal", a < 2 * b, (i, j, "fall"))
    # ratio in the first argument
    for l in range(0, l_max + 1):
        for v in range(v_max + 1):
            if l >= 1:
                # pi(l+1, v)/pi(l, v) = (l+v)/(2l)
                rep._add("pi_source_ratio", C(l + v, v) * l == C(l + v - 1, v) * (l + v), (l, v))
            # rho(l+1, v)/rho(l, v) = (l+v+1)/(2(l+1))
            rep._add("rho_source_ratio", C(l + 1 + v, v) * (l + 1) == C(l + v, v) * (l + v + 1), (l, v))
    # likelihood-ratio ordering, adjacent v
    for l in range(0, l_max + 1):
        for v in range(l + 1, v_max):
            if l == 0:
                lhs, rhs = pi_exact(1, v) * pi_exact(0, v + 1), pi_exact(0, v) * pi_exact(1, v + 1)
                rep._add("pi_lr_order", lhs == rhs, (l, v), equality=True)
            else:
                lhs = C(l + v, v) * C(l + v, v + 1)
                rhs = C(l + v - 1, v) * C(l + v + 1, v + 1)
                rep._add("pi_lr_order", lhs < rhs, (l, v))
            # rho(l, v) = C(l+v, v) 2^-(l+v+1)
            lhs = C(l + 1 + v, v) * C(l + v + 1, v + 1)
            rhs = C(l + v, v) * C(l + v + 2, v + 1)
            rep._add("rho_lr_order", lhs < rhs, (l, v))
    # tail ordering, adjacent u; rho tails are pi tails with one more source
    tails = [_tails_scaled(l, u_max) for l in range(l_max + 3)]
    for l in range(0, l_max + 1):
        for kern, a, b in (("pi_tail_order", l, l + 1), ("rho_tail_order", l + 1, l + 2)):
            Sa, Sb = tails[a], tails[b]
            for u in range(l + 1, u_max):
                if kern == "pi_tail_order" and l == 0:
                    rep._add(kern, Sb[u] * Sa[u + 1] == Sb[u + 1] * Sa[u], (l, u), equality=True)
                    continue
                rep._add(kern, Sb[u] * Sa[u + 1] < Sb[u + 1] * Sa[u], (l, u))
    # brute force over all pairs on a small range
    lb, vb = brute
    P = lambda i, j: pi_exact(i, j)
    R = lambda i, j: pi_exact(i + 1, j)
    for l in range(0, lb + 1):
        for v in range(l + 1, vb + 1):
            for w in range(v + 1, vb + 1):
                lhs, rhs = P(l + 1, v) * P(l, w), P(l, v) * P(l + 1, w)
                if l == 0:
                    rep._add("pi_lr_order_allpairs", lhs == rhs, (l, v, w), equality=True)
                else:
                    rep._add("pi_lr_order_allpairs", lhs < rhs, (l, v, w))
                rep._add("rho_lr_order_allpairs",
                         R(l + 1, v) * R(l, w) < R(l, v) * R(l + 1, w), (l, v, w))
        for h in range(l + 1, vb + 1):
            for u in range(h, vb + 1):
                for name, a, b in (("pi_tail_order_allpairs", l, l + 1),
                                   ("rho_tail_order_allpairs", l + 1, l + 2)):
                    Sa, Sb = tails[a], tails[b]
                    lhs, rhs = Sb[h] * Sa[u], Sa[h] * Sb[u]
                    if u == h or (name.startswith("pi") and l == 0):
                        rep._add(name, lhs == rhs, (l, h, u), equality=True)
                    else:
                        rep._add(name, lhs < rhs, (l, h, u))
    return rep


# --------------------------------------------------------------------------
# overshoot ratios: E[X^order ; X >= h] / P(X >= h) for X ~ kernel(h, .)


def nb_tail_mp(n: int, m: int, dps: int = 50):
    """High-precision P(NB(n) >= m) summed outward from the binomial centre."""
    import mpmath

    with mpmath.workdps(dps):
        if m <= 0:
            return mpmath.mpf(1)
        if n == 0:
            return mpmath.mpf(0)
        N = n + m - 1
        r = n - 1
        mid = (N - 1) // 2

        def run(a, b):
            if a > b:
                return mpmath.mpf(0)
            c = mpmath.binomial(N, a) / mpmath.mpf(2) ** N
            tot = c
            for j in range(a, b):
                c = c * (N - j) / (j + 1)
                tot += c
            return tot

        if r + 1 <= abs(r - mid):
            return run(0, r)
        half = mpmath.mpf(1) / 2
        base = half if N % 2 else half - mpmath.binomial(N, N // 2) / mpmath.mpf(2) ** (N + 1)
        return base + run(mid + 1, r) if r >= mid else base - run(r + 1, mid)


def overshoot_ratio(kind: str, h: int, order: int, exact: bool = True, dps: int = 50):
    """Mean (order 1) or second moment (order 2) of kernel(h, .) given the
    value is at least ``h``."""
    from .branching import partial_moment_exact, tail_exact

    if exact:
        return partial_moment_exact(kind, h, h, order) / tail_exact(kind, h, h)
    import mpmath

    n = h if kind == "pi" else h + 1
    with mpmath.workdps(dps):
        first = n * nb_tail_mp(n + 1, h - 1, dps)
        num = first if order == 1 else n * (n + 1) * nb_tail_mp(n + 2, h - 2, dps) + first
        return num / nb_tail_mp(n, h, dps)


def overshoot_excess(kind: str, h: int, order: int, exact: bool = True, dps: int = 50):
    """(ratio - h) / h**(1/2) for order 1, (ratio - h**2) / h**(3/2) for
    order 2.  Exact mode returns the square of the excess with its sign, as
    a Fraction, so no rounding enters."""
    r = overshoot_ratio(kind, h, order, exact, dps)
    if exact:
        d = r - (h if order == 1 else h * h)
        return (1 if d >= 0 else -1) * d * d / Fraction(h if order == 1 else h ** 3)
    import mpmath

    with mpmath.workdps(dps):
        return (r - h) / mpmath.sqrt(h) if order == 1 else (r - h * h) / mpmath.mpf(h) ** 1.5
