"""Simple symmetric random walk with crossing ledgers and favourite tracking.

This is the reference (pure-Python) implementation, written for clarity and for
step-by-step inspection.  Bulk simulation lives in :mod:`favsites.walk_kernels`,
which runs the same update rule on flat arrays and is tested against this one.
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Protocol

R_MAX_DEFAULT = 6
STEP_CAP_DEFAULT = 10**9


class StepSource(Protocol):
    def step(self) -> int: ...


class Case(enum.Enum):
    """Which branch of the favourite-set trichotomy a step took."""

    UNCHANGED = "unchanged"
    APPEND = "append"
    RESET = "reset"


@dataclass
class WalkState:
    t: int = 0
    pos: int = 0

    def __post_init__(self):
        if self.t < 0 or abs(self.pos) > self.t or (self.t - self.pos) % 2:
            raise ValueError(f"unreachable walk state t={self.t}, pos={self.pos}")


@dataclass
class CrossingLedger:
    """Upcrossing and downcrossing counts per site; untouched sites read as 0."""

    up: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    down: dict[int, int] = field(default_factory=lambda: defaultdict(int))

    def up_at(self, x: int) -> int:
        return self.up.get(x, 0)

    def down_at(self, x: int) -> int:
        return self.down.get(x, 0)

    def local(self, x: int) -> int:
        return self.up.get(x, 0) + self.down.get(x, 0)

    def sites(self) -> set[int]:
        return {x for x, n in self.up.items() if n} | {x for x, n in self.down.items() if n}

    def span(self) -> tuple[int, int]:
        """Smallest interval holding every touched site and the origin."""
        s = self.sites() | {0}
        return min(s), max(s)

    def local_profile(self) -> dict[int, int]:
        return {x: self.local(x) for x in sorted(self.sites())}


@dataclass
class FavouriteTracker:
    r_max: int = R_MAX_DEFAULT
    max_local: int = 0
    fav: set[int] = field(default_factory=set)
    f: list[int] = field(default_factory=list)
    case_log: list[Case] | None = None

    def __post_init__(self):
        if self.r_max < 1:
            raise ValueError("r_max must be at least 1")
        if not self.f:
            self.f = [0] * self.r_max

    def counter(self, r: int) -> int:
        """f(r), the number of steps spent on one of exactly r favourites."""
        return self.f[r - 1] if 1 <= r <= self.r_max else 0


def advance_step(state: WalkState, ledger: CrossingLedger, tracker: FavouriteTracker,
                 direction: int) -> Case:
    """Move the walker one step and update the ledger and tracker in place."""
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    new = state.pos + direction
    if direction == 1:
        ledger.up[new] += 1
    else:
        ledger.down[new] += 1
    state.t += 1
    state.pos = new

    lt = ledger.local(new)
    if lt > tracker.max_local:
        # only reachable from a favourite (or from the empty set at t = 0)
        tracker.max_local = lt
        tracker.fav = {new}
        case = Case.RESET
    elif lt == tracker.max_local:
        tracker.fav.add(new)
        case = Case.APPEND
    else:
        case = Case.UNCHANGED
    if case is not Case.UNCHANGED:
        r = len(tracker.fav)
        if r <= tracker.r_max:
            tracker.f[r - 1] += 1
    if tracker.case_log is not None:
        tracker.case_log.append(case)
    return case


def favourites_from_ledger(ledger: CrossingLedger) -> tuple[int, set[int]]:
    """Recompute (max local time, favourite set) from scratch."""
    prof = ledger.local_profile()
    if not prof:
        return 0, set()
    m = max(prof.values())
    return m, {x for x, v in prof.items() if v == m}


def f_counters_snapshot(tracker: FavouriteTracker) -> tuple[int, ...]:
    return tuple(tracker.f)


@dataclass(frozen=True)
class StopSpec:
    kind: str
    t_max: int | None = None
    k: int | None = None
    x: int | None = None
    cap: int = STEP_CAP_DEFAULT

    def __post_init__(self):
        if self.kind == "fixed_time":
            if self.t_max is None or self.t_max < 0:
                raise ValueError("fixed_time needs t_max >= 0")
        elif self.kind in ("inverse_up", "inverse_down"):
            if self.k is None or self.k < 1 or self.x is None:
                raise ValueError(f"{self.kind} needs k >= 1 and a site x")
        else:
            raise ValueError(f"unknown stop kind {self.kind!r}")
        if self.cap < 1:
            raise ValueError("cap must be positive")

    @classmethod
    def fixed_time(cls, t_max: int) -> "StopSpec":
        return cls("fixed_time", t_max=t_max, cap=max(t_max, 1))

    @classmethod
    def inverse_up(cls, k: int, x: int, cap: int = STEP_CAP_DEFAULT) -> "StopSpec":
        return cls("inverse_up", k=k, x=x, cap=cap)

    @classmethod
    def inverse_down(cls, k: int, x: int, cap: int = STEP_CAP_DEFAULT) -> "StopSpec":
        return cls("inverse_down", k=k, x=x, cap=cap)

    def reached(self, state: WalkState, ledger: CrossingLedger) -> bool:
        if self.kind == "fixed_time":
            return state.t >= self.t_max
        if self.kind == "inverse_up":
            return ledger.up_at(self.x) >= self.k
        return ledger.down_at(self.x) >= self.k


@dataclass
class StopResult:
    state: WalkState
    ledger: CrossingLedger
    tracker: FavouriteTracker
    stop_time: int | None
    censored: bool


def run_to_stop(spec: StopSpec, rng: StepSource, r_max: int = R_MAX_DEFAULT,
                log_cases: bool = False) -> StopResult:
    """Walk from the origin until ``spec`` fires or the step cap is hit.

    Inverse-local-time stops fire at the first step where the count at ``x``
    reaches ``k``; a capped run comes back with ``censored=True`` and the
    partial state, not an exception.
    """
    state, ledger = WalkState(), CrossingLedger()
    tracker = FavouriteTracker(r_max=r_max, case_log=[] if log_cases else None)
    while not spec.reached(state, ledger):
        if state.t >= spec.cap:
            return StopResult(state, ledger, tracker, None, True)
        advance_step(state, ledger, tracker, rng.step())
    return StopResult(state, ledger, tracker, state.t, False)


@dataclass(frozen=True)
class IdentityCheck:
    ok: bool
    identity: str | None = None
    site: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def _ind(cond: bool) -> int:
    return 1 if cond else 0


def check_crossing_identities(state: WalkState, ledger: CrossingLedger) -> IdentityCheck:
    """Check the up/down balance identities and both local-time forms at every
    touched site plus one site of margin on each side."""
    lo, hi = ledger.span()
    s = state.pos
    U, D = ledger.up_at, ledger.down_at
    sites = range(min(lo, s) - 1, max(hi, s) + 2)
    right = {x: _ind(0 < x <= s) - _ind(s < x <= 0) for x in sites}
    left = {x: _ind(s <= x < 0) - _ind(0 <= x < s) for x in sites}
    # identity by identity, so a fault is reported under the identity it breaks first
    checks = (
        ("up_balance", lambda x: U(x) - D(x - 1) == right[x]),
        ("down_balance", lambda x: D(x) - U(x + 1) == left[x]),
        ("local_from_down", lambda x: ledger.local(x) == D(x) + D(x - 1) + right[x]),
        ("local_from_up", lambda x: ledger.local(x) == U(x) + U(x + 1) + left[x]),
    )
    for name, holds in checks:
        for x in sites:
            if not holds(x):
                return IdentityCheck(False, name, x)
    return IdentityCheck(True)
