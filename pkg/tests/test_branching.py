import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favsites import branching as br
from favsites.chain_kernels import race_batch, tilde_y_batch, tilde_z_batch
from favsites.rng import BitStream, FixedSteps
from favsites.verify import goodness_of_fit, mean_se


# -- kernel values --------------------------------------------------------

@pytest.mark.parametrize("i,j,want", [(1, 0, Fraction(1, 2)), (0, 0, Fraction(1)),
                                      (0, 3, Fraction(0)), (2, 2, Fraction(3, 16))])
def test_pi_values(i, j, want):
    assert br.kernel_pi(i, j) == want


@pytest.mark.parametrize("i,j,want", [(0, 0, Fraction(1, 2)), (0, 2, Fraction(1, 8)),
                                      (1, 1, Fraction(1, 4))])
def test_rho_values(i, j, want):
    assert br.kernel_rho(i, j) == want


def test_large_arguments_switch_to_log_space():
    v = br.kernel_pi(40, 40)
    assert isinstance(v, float)
    assert v == pytest.approx(float(br.pi_exact(40, 40)), rel=1e-12)
    assert br.kernel_rho(60, 10) == pytest.approx(float(br.rho_exact(60, 10)), rel=1e-12)


def test_negative_arguments_refused():
    with pytest.raises(ValueError):
        br.kernel_pi(-1, 0)
    with pytest.raises(ValueError):
        br.kernel_rho(0, -1)


@given(st.integers(0, 40), st.integers(-2, 80))
@settings(max_examples=300, deadline=None)
def test_closed_form_tail_matches_direct_sum(n, m):
    assert br.nb_tail_exact(n, m) == br.nb_tail_direct(n, m)


@given(st.sampled_from(["pi", "rho"]), st.integers(0, 20), st.integers(0, 40),
       st.sampled_from([1, 2]))
@settings(max_examples=150, deadline=None)
def test_partial_moments_match_truncated_sums(kind, i, m, order):
    exact = br.pi_exact if kind == "pi" else br.rho_exact
    top = 400
    direct = sum((Fraction(j) ** order * exact(i, j) for j in range(m, top)), Fraction(0))
    closed = br.partial_moment_exact(kind, i, m, order)
    assert closed >= direct
    assert float(closed - direct) < 1e-60


@pytest.mark.parametrize("kind,shift", [("pi", 0), ("rho", 1)])
def test_exact_rows(kind, shift):
    for i in (0, 1, 5, 64):
        row = br.kernel_row(kind, i)
        assert row.mass() == 1
        assert row.mean() == i + shift


def test_float_tail_agrees_with_exact():
    for kind in ("pi", "rho"):
        for i, m in ((3, 5), (10, 2), (50, 80)):
            assert float(br.tail_float(kind, i, m)) == pytest.approx(float(br.tail_exact(kind, i, m)),
                                                                     rel=1e-10)


# -- sampling -------------------------------------------------------------

def test_step_from_zero_is_zero():
    s = FixedSteps("")  # would raise if any bit were read
    assert br.sample_offspring_sum("pi", 0, s) == 0


def test_y_step_from_three_fits_the_row():
    xs = br.sample_offspring_batch("pi", 3, 10**6, seed=1)
    g = goodness_of_fit(xs, br.kernel_pmf("pi", 3, np.arange(60)))
    assert g.p_value > 1e-3


def test_z_step_from_zero_has_mean_one():
    xs = br.sample_offspring_batch("rho", 0, 10**6, seed=2)
    m, se = mean_se(xs)
    assert abs(m - 1) <= 3 * se


# -- chain runs -----------------------------------------------------------

def test_y_start_above_level():
    rec = br.run_chain_to_stop(br.ChainState("Y", 7), 5, "absorb-race", FixedSteps(""))
    assert rec.sigma == 0 and rec.max_jump == 0


def test_y_start_at_zero_is_absorbed():
    rec = br.run_chain_to_stop(br.ChainState("Y", 0), 5, "absorb-race", FixedSteps(""))
    assert rec.omega == 0 and rec.sigma == math.inf and rec.absorbed_first


def test_z_from_zero_crosses_one_after_a_geometric_time():
    rng = BitStream(3)
    taus = [int(br.run_chain_to_stop(br.ChainState("Z", 0), 1, "plain", rng).tau) for _ in range(20000)]
    probs = [0.0] + [2.0 ** -t for t in range(1, 40)]
    assert goodness_of_fit(taus, probs).p_value > 1e-3


def test_tilde_values_include_immigrant():
    s = br.ChainState("Z", 3, prev=2)
    assert s.tilde() == 6
    assert br.ChainState("Y", 3, prev=2).tilde() == 5
    assert br.ChainState("Y", 3).tilde() is None


def test_chain_state_validation():
    with pytest.raises(ValueError):
        br.ChainState("X", 1)
    with pytest.raises(ValueError):
        br.ChainState("Y", -1)
    with pytest.raises(ValueError):
        br.run_chain_to_stop(br.ChainState("Y", 1), 0, "plain", FixedSteps(""))


def test_cap_censors():
    rec = br.run_chain_to_stop(br.ChainState("Y", 3), 10**6, "plain", BitStream(0), cap=2)
    assert rec.censored and rec.steps == 2


# -- first passage --------------------------------------------------------

def test_y_level_two_from_one():
    sol = br.first_passage_dp("Y", 2, exact=True)
    assert sol.cross_prob[1] == Fraction(1, 3)
    assert sol.absorb_prob[1] == Fraction(2, 3)
    assert sol.cross_prob[0] == 0


def test_z_level_one_from_zero():
    assert br.first_passage_dp("Z", 1, exact=True).mean_stop[0] == 2
    assert br.first_passage_dp("Z", 1).mean_stop[0] == pytest.approx(2, abs=1e-9)


@pytest.mark.parametrize("h", [1, 3, 8])
def test_y_absorbs_or_crosses(h):
    sol = br.first_passage_dp("Y", h, exact=True)
    for k in range(h):
        assert sol.absorb_prob[k] + sol.cross_prob[k] == 1
        # optional stopping: the crossing value carries the whole mean
        assert sol.cross_mean[k] == k


def test_float_and_exact_dp_agree():
    a = br.first_passage_dp("Z", 6, exact=True)
    b = br.first_passage_dp("Z", 6)
    for k in range(6):
        assert float(a.mean_stop[k]) == pytest.approx(b.mean_stop[k], rel=1e-10)
        assert float(a.second_moment_stop[k]) == pytest.approx(b.second_moment_stop[k], rel=1e-10)
    assert not b.flagged


def test_small_cap_is_flagged():
    assert br.first_passage_dp("Y", 10, cap=12).flagged


def test_dp_against_simulation():
    rows = race_batch(np.uint64(4), 0, 100000, 0, 3, 6, 10**6)
    hit = float((rows[:, 0] == 1).mean())
    want = float(br.first_passage_dp("Y", 6).cross_prob[3])
    assert abs(hit - want) <= 3 * math.sqrt(want * (1 - want) / 100000)


def test_tilde_dp_against_simulation():
    h, k = 12, 5
    ly = br.tilde_passage_dp("Y", h).layered(2)
    lz = br.tilde_passage_dp("Z", h).layered(2)
    n = 50000
    ry = tilde_y_batch(np.uint64(8), 0, n, k, h, 2, 10**6)
    rz = tilde_z_batch(np.uint64(9), 0, n, k, h, 2, 10**6)
    for p in range(3):
        est = float((ry == p).mean())
        assert abs(est - ly[p, k]) <= 3 * max(math.sqrt(ly[p, k] * (1 - ly[p, k]) / n), 1 / n)
        m, se = mean_se(rz[:, p])
        assert abs(m - lz[p, k]) <= 3 * max(se, 1 / n)


def test_tilde_values_at_or_above_the_level():
    h = 6
    ty = br.tilde_passage_dp("Y", h, k_max=h + 2)
    tz = br.tilde_passage_dp("Z", h, k_max=h + 2)
    for k in range(h, h + 3):
        assert ty.layered(1)[0, k] == 0
    assert ty.layered(1)[1, h] == pytest.approx(2.0 ** -h)
    assert tz.mean_time[h] == pytest.approx(1.0)


# -- generating functions -------------------------------------------------

def test_mgf_values():
    assert br.offspring_mgf(0.0) == 1.0
    assert br.offspring_mgf(0.1) == pytest.approx(1.0112, abs=1e-4)
    with pytest.raises(ValueError):
        br.offspring_mgf(0.8)


@pytest.mark.parametrize("theta", [0.0, 0.05, 0.2, 0.4, 0.6])
@pytest.mark.parametrize("sign", ["+", "-"])
def test_mgf_closed_form_matches_series(theta, sign):
    assert br.offspring_mgf(theta, sign) == pytest.approx(br.offspring_mgf_series(theta, sign),
                                                          abs=1e-12)


def test_kolmogorov_theta0_is_positive_and_valid():
    t = br.kolmogorov_theta0()
    assert 0 < t < math.log(2)
    for th in np.linspace(t / 50, t, 50):
        assert br.offspring_mgf(th) < math.exp(2 * th * th)
        assert br.offspring_mgf(th, "-") < math.exp(2 * th * th)
