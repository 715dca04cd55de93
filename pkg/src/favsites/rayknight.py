"""Patched branching profiles and their comparison with walk local times.

For ``x >= 1`` and ``k >= 0`` the profile ``Delta`` glues three chains:
a Z chain (kernel rho) from ``Z_0 = k`` read right to left on sites
``x-1 .. 0``, a Y chain (kernel pi) from ``Y_{-1} = k`` on sites ``>= x-1``,
and a leftward chain from ``Delta(0) = Z_{x-1}`` on sites ``<= 0``.  Then
``Lambda(y) = Delta(y) + Delta(y-1) + [0 < y <= x]``.

The profile is compared with the walk stopped at its ``(k+1)``-th
upcrossing into ``x``: ``Delta`` against down-crossing counts, ``Lambda``
against local times.  How the leftward chain takes its first step is a
convention (:class:`PatchConvention`); the walk leaves the origin to the
left a geometric number of times per visit, including the start, so that
step should carry one extra source.  :func:`adjudicate_convention` decides
it against exact enumeration rather than taking it on trust.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import parallel
from .branching import pi_exact, rho_exact, sample_offspring_sum
from .report import AuditPoint, AuditReport
from .verify.stats import bonferroni, proportion_se, two_sample_counts

PROFILE_CAP_DEFAULT = 10**6


class PatchConvention(enum.Enum):
    LITERAL = "literal"
    ORIGIN_SOURCE_ADJUSTED = "origin_source_adjusted"

    @property
    def adjusted(self) -> bool:
        return self is PatchConvention.ORIGIN_SOURCE_ADJUSTED


def walk_to_profile_index(k_walk: int) -> int:
    """The walk stopped at its ``k_walk``-th upcrossing into ``x`` has the
    law of the profile with parameter ``k_walk - 1``."""
    if k_walk < 1:
        raise ValueError("an upcrossing count must be at least 1")
    return k_walk - 1


def profile_to_walk_index(k_profile: int) -> int:
    if k_profile < 0:
        raise ValueError("profile parameter must be non-negative")
    return k_profile + 1


@dataclass
class ProfilePair:
    """``delta[i]`` and ``lam[i]`` belong to site ``y_min + i``.

    ``clipped`` marks a profile whose window cut off a chain that was still
    alive, in which case sites outside the window are unknown.
    """

    x: int
    k: int
    y_min: int
    delta: np.ndarray
    lam: np.ndarray
    convention: PatchConvention
    clipped: bool = False

    @property
    def y_max(self) -> int:
        return self.y_min + len(self.delta) - 1

    def sites(self) -> range:
        return range(self.y_min, self.y_max + 1)

    def delta_at(self, y: int) -> int:
        i = y - self.y_min
        if 0 <= i < len(self.delta):
            return int(self.delta[i])
        if self.clipped:
            raise KeyError(f"site {y} outside a clipped window")
        return 0

    def lam_at(self, y: int) -> int:
        i = y - self.y_min
        if 0 <= i < len(self.lam):
            return int(self.lam[i])
        if self.clipped:
            raise KeyError(f"site {y} outside a clipped window")
        return 0


def lambda_from_delta(delta: np.ndarray, y_min: int, x: int) -> np.ndarray:
    """Lambda over the same window; ``delta`` must vanish just left of it."""
    d = np.asarray(delta, dtype=np.int64)
    prev = np.concatenate(([0], d[:-1]))
    ys = np.arange(y_min, y_min + len(d))
    return d + prev + ((ys > 0) & (ys <= x))


def sample_profile(x: int, k: int, convention: PatchConvention, rng,
                   window: tuple[int, int] | None = None,
                   cap: int = PROFILE_CAP_DEFAULT) -> ProfilePair:
    """One profile, outer chains run to extinction unless ``window`` clips
    them (then ``clipped`` is set if a chain was still alive at the edge).
    Draws go Z chain, right chain, left chain.
    """
    if x < 1 or k < 0:
        raise ValueError("need x >= 1 and k >= 0")
    lo_lim, hi_lim = window if window is not None else (-cap, cap)
    if lo_lim > 0 or hi_lim < x:
        raise ValueError("window must contain [0, x]")
    z = [k]
    for _ in range(1, x):
        z.append(sample_offspring_sum("rho", z[-1], rng))
    clipped = False
    right = [k]                      # Delta(x-1), Delta(x), ...
    while right[-1] > 0:
        if x - 1 + len(right) > hi_lim:
            clipped = True
            break
        right.append(sample_offspring_sum("pi", right[-1], rng))
    left = [z[-1]]                   # Delta(0), Delta(-1), ...
    while left[-1] > 0 or (len(left) == 1 and convention.adjusted):
        if -len(left) < lo_lim:
            clipped = True
            break
        kind = "rho" if (len(left) == 1 and convention.adjusted) else "pi"
        left.append(sample_offspring_sum(kind, left[-1], rng))
    y_min = -(len(left) - 1)
    y_max = max(x, x - 2 + len(right))
    delta = np.zeros(y_max - y_min + 1, dtype=np.int64)
    for i, v in enumerate(left):
        delta[-i - y_min] = v
    for y in range(0, x):
        delta[y - y_min] = z[x - 1 - y]
    for i, v in enumerate(right):
        delta[x - 1 + i - y_min] = v
    lam = lambda_from_delta(delta, y_min, x)
    return ProfilePair(x, k, y_min, delta, lam, convention, clipped)


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class EventClassification:
    """Tie structure of the maximum of ``Lambda``.

    ``p``, ``q``, ``r`` count maximal sites above ``x``, strictly between
    0 and ``x``, and at or below 0.
    """

    h: int
    ties: int
    x_is_max: bool
    p: int
    q: int
    r: int
    event: bool

    @property
    def region_total(self) -> int:
        return self.p + self.q + self.r + (1 if self.x_is_max else 0)


def classify_lambda(lam, y_min: int, x: int, r_target: int) -> EventClassification:
    lam = np.asarray(lam, dtype=np.int64)
    if lam.size == 0:
        raise ValueError("empty profile")
    h = int(lam.max())
    ys = np.arange(y_min, y_min + len(lam))
    at = ys[lam == h]
    x_max = bool(x in set(at.tolist()))
    p = int((at > x).sum())
    q = int(((at > 0) & (at < x)).sum())
    r = int((at <= 0).sum())
    ties = len(at)
    return EventClassification(h, ties, x_max, p, q, r, x_max and ties == r_target)


def classify_profile_event(profile: ProfilePair, r_target: int) -> EventClassification:
    if profile.clipped:
        raise ValueError("refusing to classify a clipped profile")
    return classify_lambda(profile.lam, profile.y_min, profile.x, r_target)


# --------------------------------------------------------------------------
# exact profile marginals


def _push(dist: list[Fraction], kernel, j_max: int) -> tuple[list[Fraction], Fraction]:
    out = [Fraction(0)] * (j_max + 1)
    for i, m in enumerate(dist):
        if m:
            for j in range(j_max + 1):
                out[j] += m * kernel(i, j)
    lost = sum(dist, Fraction(0)) - sum(out, Fraction(0))
    return out, lost


def profile_site_law_exact(x: int, k: int, y: int, convention: PatchConvention,
                           j_max: int = 40) -> tuple[list[Fraction], Fraction]:
    """Exact law of ``Delta(y)`` truncated at ``j_max``; returns
    (probabilities of 0..j_max, total mass lost to truncation)."""
    if x < 1 or k < 0:
        raise ValueError("need x >= 1 and k >= 0")
    if k > j_max:
        raise ValueError("j_max must be at least k")
    dist = [Fraction(0)] * (j_max + 1)
    dist[k] = Fraction(1)
    lost = Fraction(0)
    if y >= x - 1:
        for _ in range(y - x + 1):
            dist, l = _push(dist, pi_exact, j_max)
            lost += l
        return dist, lost
    for _ in range(min(x - 1 - y, x - 1)):
        dist, l = _push(dist, rho_exact, j_max)
        lost += l
    for step in range(-y):
        kern = rho_exact if (step == 0 and convention.adjusted) else pi_exact
        dist, l = _push(dist, kern, j_max)
        lost += l
    return dist, lost


@dataclass
class Adjudication:
    chosen: PatchConvention | None
    consistent: dict[str, bool]
    site: int
    params: tuple[int, int]
    witnesses: dict[str, str] = field(default_factory=dict)


def adjudicate_convention(x: int = 1, k: int = 0, y: int = -1, t_cap: int = 20,
                          j_max: int = 24) -> Adjudication:
    """Decide the convention from the exact law of D(T_U(k+1, x), y).

    A convention is consistent when its exact profile law lies inside the
    enumeration sandwich ``enum(j) <= law(j) <= enum(j) + censored`` for
    every value ``j``.  Exactly one consistent convention is chosen.
    """
    from .exact_oracle import enumerate_stopped_profile
    from .walk_core import StopSpec

    enum_law = enumerate_stopped_profile(StopSpec.inverse_up(k + 1, x), t_cap,
                                         sites=(y,), quantity="down")
    marg = enum_law.marginal(0)
    cens = enum_law.censored
    ok = {}
    wit = {}
    for conv in PatchConvention:
        law, lost = profile_site_law_exact(x, k, y, conv, j_max)
        good = True
        for j in range(j_max + 1):
            e = marg.get(j, Fraction(0))
            if not (e <= law[j] <= e + cens):
                good = False
                wit[conv.value] = f"value {j}: profile {law[j]} vs enumeration [{e}, {e + cens}]"
                break
        ok[conv.value] = good
    winners = [c for c in PatchConvention if ok[c.value]]
    return Adjudication(winners[0] if len(winners) == 1 else None, ok, y, (x, k), wit)


# --------------------------------------------------------------------------
# law comparison against the walk


PROFILE_TARGET = "favsites.profile_kernels:profile_window_batch"
WALK_TARGET = "favsites.profile_kernels:walk_window_batch"
FAV_TARGET = "favsites.profile_kernels:profile_favourite_batch"
WALK_FAV_TARGET = "favsites.walk_kernels:inverse_up_favourites"

# replica offsets keep the two sides of a comparison on disjoint streams
WALK_STREAM_OFFSET = 1 << 40


def _hist_columns(mat: np.ndarray) -> list[np.ndarray]:
    return [np.bincount(mat[:, c]) for c in range(mat.shape[1])]


def compare_laws_rk_vs_walk(x: int, k: int, sites, n_samples: int,
                            convention: PatchConvention, seed: int = 0,
                            alpha: float = 1e-3, workers: int = 1,
                            compress: bool = True, cap: int = 10**9,
                            censor_tolerance: float = 1e-3) -> AuditReport:
    """Per-site two-sample tests of Delta vs D and Lambda vs L.

    Bonferroni over all sites and both quantities at family level ``alpha``.
    """
    sites = sorted(set(int(s) for s in sites))
    lo = min(min(sites) - 1, 0)
    hi = max(max(sites), x)
    conv_flag = convention.adjusted
    prof = parallel.concat(parallel.run_replicas(
        PROFILE_TARGET, seed, n_samples, (x, k, conv_flag, lo, hi), workers))
    walk = parallel.concat(parallel.run_replicas(
        WALK_TARGET, seed, n_samples, (x, profile_to_walk_index(k), lo, hi, compress, cap),
        workers, offset=WALK_STREAM_OFFSET))
    censored = walk[:, -1].astype(bool)
    cens_mass = float(censored.mean())
    wd = walk[~censored, :-1]
    ys = np.arange(lo, hi + 1)
    ind = ((ys > 0) & (ys <= x)).astype(np.int64)

    def lam(mat):
        prev = np.zeros_like(mat)
        prev[:, 1:] = mat[:, :-1]
        return mat + prev + ind[None, :]

    lam_p, lam_w = lam(prof), lam(wd)
    points, pvals, counts = [], [], {}
    for y in sites:
        c = y - lo
        for name, a, b in (("delta", prof[:, c], wd[:, c]), ("lambda", lam_p[:, c], lam_w[:, c])):
            if name == "lambda" and y == lo:
                continue
            top = int(max(a.max(initial=0), b.max(initial=0))) + 1
            ca = np.bincount(a, minlength=top)
            cb = np.bincount(b, minlength=top)
            g = two_sample_counts(ca, cb)
            pvals.append(g.p_value)
            counts[f"{name}@{y}"] = {"profile": ca.tolist(), "walk": cb.tolist()}
            points.append(AuditPoint({"x": x, "k": k, "site": y, "quantity": name},
                                     g.statistic, g.p_value, None))
    ok, thr = bonferroni(pvals, alpha)
    for pt in points:
        pt.passed = bool(pt.p_or_slack >= thr)
    if cens_mass > censor_tolerance:
        verdict = "inconclusive"
    else:
        verdict = "pass" if ok else "fail"
    return AuditReport(
        "ray_knight_law", "monte-carlo",
        {"x": x, "k": k, "sites": sites, "convention": convention.value,
         "alpha": alpha, "compressed_walk": compress},
        statistic=float(min(pvals)) if pvals else None, p_value=float(min(pvals)) if pvals else None,
        verdict=verdict, n_samples=n_samples, censored_mass=cens_mass,
        points=points, counts=counts,
        notes=f"Bonferroni threshold {thr:.3g} over {len(pvals)} tests")


@dataclass
class FavouriteEstimate:
    route: str
    estimate: float
    standard_error: float
    censored_mass: float
    n_samples: int
    hits: int

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        """Interval widened on the upper side by the censored mass, since a
        censored sample might have been a hit."""
        return (self.estimate - z * self.standard_error,
                self.estimate + self.censored_mass + z * self.standard_error)


def estimate_favourite_event_probability(x: int, k: int, r_target: int = 4, route: str = "walk",
                                         n_samples: int = 10**5, seed: int = 0,
                                         convention: PatchConvention = PatchConvention.ORIGIN_SOURCE_ADJUSTED,
                                         workers: int = 1, cap: int = 10**6,
                                         r_max: int = 6) -> FavouriteEstimate:
    """P(x is a favourite and exactly ``r_target`` sites are favourites) at
    the ``k``-th upcrossing into ``x`` (``k >= 1``)."""
    if r_target > r_max or r_target < 1:
        raise ValueError(f"r_target must be in 1..{r_max}")
    if x < 1:
        raise ValueError("x must be at least 1")
    if route == "walk":
        rows = parallel.concat(parallel.run_replicas(
            WALK_FAV_TARGET, seed, n_samples, (k, x, cap), workers, offset=WALK_STREAM_OFFSET))
        cens = rows[:, 0] == 1
        hit = (~cens) & (rows[:, 2] == 1) & (rows[:, 1] == r_target)
    elif route == "rk":
        kp = walk_to_profile_index(k)
        rows = parallel.concat(parallel.run_replicas(
            FAV_TARGET, seed, n_samples, (x, kp, convention.adjusted, r_target, cap), workers))
        cens = rows[:, 3] == 1
        hit = rows[:, 0] == 1
    else:
        raise ValueError("route must be 'walk' or 'rk'")
    h = int(hit.sum())
    est = h / n_samples
    return FavouriteEstimate(route, est, proportion_se(est, n_samples), float(cens.mean()),
                             n_samples, h)


def favourite_routes_agree(a: FavouriteEstimate, b: FavouriteEstimate, z: float = 3.0) -> bool:
    """Agreement within ``z`` combined standard errors, allowing each side's
    censored mass as extra slack."""
    se = math.hypot(a.standard_error, b.standard_error)
    gap = abs(a.estimate - b.estimate)
    return gap <= z * se + a.censored_mass + b.censored_mass
