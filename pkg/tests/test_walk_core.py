import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favsites.rng import BitStream, FixedSteps
from favsites.verify import two_sample
from favsites.walk_core import (Case, CrossingLedger, FavouriteTracker, StopSpec, WalkState,
                                advance_step, check_crossing_identities, f_counters_snapshot,
                                favourites_from_ledger, run_to_stop)
from favsites.walk_kernels import identity_suite_kernel, inverse_up_favourites

paths = st.lists(st.sampled_from([1, -1]), min_size=0, max_size=200)


def walk(path, r_max=6):
    state, ledger, tr = WalkState(), CrossingLedger(), FavouriteTracker(r_max=r_max, case_log=[])
    for d in path:
        advance_step(state, ledger, tr, d)
    return state, ledger, tr


# -- single steps ---------------------------------------------------------

def test_first_step_resets_to_singleton():
    state, ledger, tr = walk([1])
    assert ledger.up_at(1) == 1 and ledger.local(1) == 1
    assert tr.fav == {1}
    assert tr.case_log == [Case.RESET]


def test_second_step_back_appends_origin():
    state, ledger, tr = walk([1, -1])
    assert tr.fav == {0, 1}
    assert tr.case_log[-1] is Case.APPEND
    assert tr.counter(2) == 1


def test_third_step_collapses_again():
    _, _, tr = walk([1, -1, 1])
    assert tr.fav == {1}
    assert tr.case_log[-1] is Case.RESET


def test_unchanged_case():
    # 1, 2, 1, 0, -1: site 1 leads with 2 visits, the last steps touch new sites
    _, _, tr = walk([1, 1, -1, -1, -1])
    assert tr.case_log[-1] is Case.UNCHANGED


def test_bad_direction_and_state():
    state, ledger, tr = WalkState(), CrossingLedger(), FavouriteTracker()
    with pytest.raises(ValueError):
        advance_step(state, ledger, tr, 0)
    with pytest.raises(ValueError):
        WalkState(t=1, pos=0)
    with pytest.raises(ValueError):
        FavouriteTracker(r_max=0)


# -- stopping -------------------------------------------------------------

def test_inverse_up_first_step():
    res = run_to_stop(StopSpec.inverse_up(1, 1), FixedSteps("+"))
    assert res.stop_time == 1 and not res.censored


def test_inverse_up_hand_trace():
    res = run_to_stop(StopSpec.inverse_up(1, 1), FixedSteps("-++"))
    assert res.stop_time == 3


def test_fixed_time_four_steps():
    res = run_to_stop(StopSpec.fixed_time(4), FixedSteps("++--"))
    assert res.ledger.local_profile() == {0: 1, 1: 2, 2: 1}
    assert res.tracker.fav == {1}


def test_inverse_down():
    res = run_to_stop(StopSpec.inverse_down(2, 0), FixedSteps("+-+-"))
    assert res.stop_time == 4


def test_cap_censors_instead_of_raising():
    res = run_to_stop(StopSpec.inverse_up(1, 5, cap=3), FixedSteps("+-+-+-"))
    assert res.censored and res.stop_time is None and res.state.t == 3


def test_stop_spec_validation():
    with pytest.raises(ValueError):
        StopSpec.inverse_up(0, 1)
    with pytest.raises(ValueError):
        StopSpec("sideways")
    with pytest.raises(ValueError):
        StopSpec.fixed_time(-1)


# -- identities -----------------------------------------------------------

def test_identities_on_small_path():
    state, ledger, _ = walk([1, 1, -1, -1])
    assert check_crossing_identities(state, ledger)


def test_identities_on_empty_walk():
    assert check_crossing_identities(WalkState(), CrossingLedger())


def test_corrupted_ledger_is_caught():
    state, ledger, _ = walk([1])
    ledger.up[1] = 2
    chk = check_crossing_identities(state, ledger)
    assert not chk.ok and chk.site == 1 and chk.identity == "up_balance"


@given(paths)
@settings(max_examples=200, deadline=None)
def test_identities_hold_after_every_step(path):
    state, ledger, tr = WalkState(), CrossingLedger(), FavouriteTracker()
    for d in path:
        advance_step(state, ledger, tr, d)
        assert check_crossing_identities(state, ledger)


@given(paths)
@settings(max_examples=200, deadline=None)
def test_incremental_favourites_match_recompute(path):
    state, ledger, tr = WalkState(), CrossingLedger(), FavouriteTracker()
    for d in path:
        advance_step(state, ledger, tr, d)
        m, fav = favourites_from_ledger(ledger)
        assert (tr.max_local, tr.fav) == (m, fav)
        assert len(tr.fav) >= 1
        f = f_counters_snapshot(tr)
        assert all(f[r + 1] <= f[r] for r in range(len(f) - 1))


@given(paths)
@settings(max_examples=200, deadline=None)
def test_trichotomy(path):
    state, ledger, tr = WalkState(), CrossingLedger(), FavouriteTracker(case_log=[])
    for d in path:
        before = set(tr.fav)
        case = advance_step(state, ledger, tr, d)
        if case is Case.UNCHANGED:
            assert tr.fav == before
        elif case is Case.APPEND:
            assert tr.fav == before | {state.pos} and state.pos not in before
        else:
            assert tr.fav == {state.pos}


@given(paths)
@settings(max_examples=100, deadline=None)
def test_mirrored_path_mirrors_the_ledger(path):
    _, a, _ = walk(path)
    _, b, _ = walk([-d for d in path])
    for x in range(-len(path) - 1, len(path) + 2):
        assert a.up_at(x) == b.down_at(-x)


# -- f counters -----------------------------------------------------------

def test_f_counters_small_paths():
    assert f_counters_snapshot(walk([1])[2])[:2] == (1, 0)
    assert f_counters_snapshot(walk([1, -1])[2])[1] >= 1
    assert f_counters_snapshot(FavouriteTracker()) == (0,) * 6


def test_every_two_step_path_has_an_f2_event():
    for path in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
        assert walk(path)[2].counter(2) >= 1


# -- jitted kernels against the reference implementation ------------------

def test_identity_kernel_matches_reference_f_counters():
    master, n, steps = 5, 20, 500
    viol, _, f_all = identity_suite_kernel(np.uint64(master), 0, n, steps, 6, 50)
    assert viol.sum() == 0
    for p in range(n):
        res = run_to_stop(StopSpec.fixed_time(steps), BitStream.for_replica(master, p))
        assert tuple(f_all[p]) == f_counters_snapshot(res.tracker)


def test_inverse_up_kernel_matches_reference():
    master, n = 11, 30
    rows = inverse_up_favourites(np.uint64(master), 0, n, 2, 1, 10**6)
    for p in range(n):
        res = run_to_stop(StopSpec.inverse_up(2, 1, cap=10**6), BitStream.for_replica(master, p))
        if rows[p, 0]:
            assert res.censored
            continue
        assert rows[p, 3] == res.stop_time
        assert rows[p, 1] == len(res.tracker.fav)
        assert rows[p, 2] == int(1 in res.tracker.fav)


def test_up_down_symmetry_in_law():
    # u(x) at T_U(1, x) against d(-x) at T_D(1, -x), on disjoint streams
    n, cap, x = 3000, 2000, 2
    a, b = [], []
    for p in range(n):
        r = run_to_stop(StopSpec.inverse_up(1, x, cap=cap), BitStream.for_replica(7, p))
        a.append(-1 if r.censored else r.ledger.local(0))
        r = run_to_stop(StopSpec.inverse_down(1, -x, cap=cap), BitStream.for_replica(7, n + p))
        b.append(-1 if r.censored else r.ledger.local(0))
    g = two_sample(np.array(a) + 1, np.array(b) + 1)
    assert g.p_value > 1e-3
