import itertools
import math
from collections import Counter
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favsites.branching import nb_tail_exact, pi_exact
from favsites.exact_oracle import (ExactDistribution, enumerate_feature_laws,
                                   enumerate_stopped_profile, enumerate_walk_functional,
                                   kernel_tail_exact, nb_tail_mp, overshoot_excess,
                                   overshoot_ratio, ratio_monotonicity_check,
                                   stopped_marginal_check)
from favsites.walk_core import StopSpec


def brute_favourites(t):
    """Exact law of (#K(t), S(t) in K(t)) by listing all 2^t paths."""
    c = Counter()
    for path in itertools.product((1, -1), repeat=t):
        loc, s = Counter(), 0
        for d in path:
            s += d
            loc[s] += 1
        m = max(loc.values())
        fav = {x for x, v in loc.items() if v == m}
        c[(len(fav), s in fav)] += 1
    return {k: Fraction(v, 2 ** t) for k, v in c.items()}


def test_two_favourites_at_time_two():
    d = enumerate_walk_functional(2, lambda pv: (len(pv.favourites()[1]), pv.pos in pv.favourites()[1]))
    assert d.prob((2, True)) == 1


def test_single_favourite_at_time_one():
    d = enumerate_walk_functional(1, lambda pv: len(pv.favourites()[1]))
    assert d.prob(1) == 1


@pytest.mark.parametrize("t", [3, 4, 7, 10])
def test_favourite_law_matches_listing(t):
    d = enumerate_walk_functional(t, lambda pv: (len(pv.favourites()[1]), pv.pos in pv.favourites()[1]))
    assert d.masses == brute_favourites(t)


def test_time_four_single_favourite_value():
    d = enumerate_walk_functional(4, lambda pv: (len(pv.favourites()[1]), pv.pos in pv.favourites()[1]))
    assert d.prob((1, True)) == brute_favourites(4)[(1, True)]


def test_feature_laws_are_distributions():
    laws = enumerate_feature_laws(8)
    for t, by_name in laws.items():
        for dist in by_name.values():
            assert dist.total() == 1
        assert by_name["n_fav"].prob(0) == 0


def test_enumeration_caps():
    with pytest.raises(ValueError):
        enumerate_walk_functional(25, lambda pv: 0)
    with pytest.raises(ValueError):
        enumerate_stopped_profile(StopSpec.inverse_up(1, 1), 31)


def test_json_round_trip():
    d = enumerate_stopped_profile(StopSpec.inverse_up(1, 1), 12, sites=(-1, 0, 1))
    back = ExactDistribution.from_json(d.to_json())
    assert back.masses == d.masses and back.censored == d.censored
    assert back.total() == 1


# -- stopped paths --------------------------------------------------------

@pytest.fixture(scope="module")
def first_visit():
    return enumerate_stopped_profile(StopSpec.inverse_up(1, 1), 20, sites=(0, 1), quantity="both")


def test_censored_mass_is_the_staying_probability(first_visit):
    # P(T_U(1,1) > 20) = P(max of S up to 20 is <= 0) = C(20, 10) / 2^20 by reflection
    assert first_visit.censored == Fraction(math.comb(20, 10), 2 ** 20)


def test_first_visit_structure(first_visit):
    # values: (D(0), D(1), L(0), L(1))
    assert set(first_visit.marginal(3)) == {1}
    assert set(first_visit.marginal(0)) == {0}


def test_origin_law_sandwich(first_visit):
    geo = lambda m: Fraction(1, 2 ** (m + 1))
    ok, bad = stopped_marginal_check(first_visit, 2, geo, 10)
    assert ok, bad


def test_stopped_masses_are_dyadic(first_visit):
    assert all((m.denominator & (m.denominator - 1)) == 0 for m in first_visit.masses.values())
    assert first_visit.total() == 1


# -- kernel tails ---------------------------------------------------------

def test_offband_at_two_is_zero():
    assert kernel_tail_exact("offband", h=2, eps=0.05).value == 0


@given(st.integers(2, 120), st.sampled_from([0.05, 0.25]))
@settings(max_examples=40, deadline=None)
def test_offband_matches_binomial_sum(h, eps):
    assert kernel_tail_exact("offband", h=h, eps=eps).slack == 0


def test_band_total_is_half():
    assert kernel_tail_exact("band_total", h=4).value == Fraction(1, 2)


def test_mgf_sup_finite_and_below_gaussian_limit():
    tc = kernel_tail_exact("mgf_sup", gamma=0.4, n_max=200)
    assert math.isfinite(tc.value) and tc.slack > 0
    vals = tc.details["values"]
    assert all(b >= a for a, b in zip(vals[1:], vals[2:]))


def test_unknown_query():
    with pytest.raises(ValueError):
        kernel_tail_exact("nope")


# -- monotonicity ---------------------------------------------------------

def test_ratio_examples():
    assert pi_exact(2, 2) / pi_exact(2, 1) == Fraction(3, 4)
    assert pi_exact(3, 1) == pi_exact(3, 2) == Fraction(3, 16)
    assert pi_exact(2, 2) / pi_exact(1, 2) == Fraction(3, 2)


def test_monotonicity_small_range():
    rep = ratio_monotonicity_check(30, 60, 30, 60, 60, brute=(6, 20))
    assert rep.ok(), {k: v[:3] for k, v in rep.violations.items() if v}
    assert rep.equality_cases["unimodal"] == 29


# -- overshoot ratios -----------------------------------------------------

@given(st.integers(1, 60), st.integers(0, 200))
@settings(max_examples=60, deadline=None)
def test_high_precision_tail(n, m):
    exact = nb_tail_exact(n, m)
    with mpmath.workdps(50):
        got = nb_tail_mp(n, m)
        assert abs(got - mpmath.mpf(exact.numerator) / exact.denominator) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("kind", ["pi", "rho"])
@pytest.mark.parametrize("order", [1, 2])
def test_excess_exact_and_mp_agree(kind, order):
    for h in (1, 2, 7, 30):
        sq = overshoot_excess(kind, h, order)
        e = float(overshoot_excess(kind, h, order, exact=False))
        assert math.copysign(e * e, e) == pytest.approx(float(sq), rel=1e-12, abs=1e-15)


def test_first_moment_ratio_small_h():
    # X ~ pi(1, .) geometric: E[X | X >= 1] = 2
    assert overshoot_ratio("pi", 1, 1) == 2
