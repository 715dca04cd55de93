import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favsites.branching import first_passage_dp, pi_exact
from favsites.exact_oracle import hit_ratio_exact
from favsites.report import (AuditReport, combine_verdicts, counts_digest, reports_from_json,
                             reports_to_csv, reports_to_json)
from favsites.rng import BitStream
from favsites.verify import (bonferroni, gof_counts, goodness_of_fit, two_sample,
                             wilson_interval)
from favsites.verify import audits as A
from favsites.verify import fits


# -- goodness of fit ------------------------------------------------------

def test_fair_coin_counts():
    g = gof_counts([499823, 500177], [5e5, 5e5])
    assert g.p_value > 1e-3 and g.dof == 1


def test_point_mass():
    g = goodness_of_fit(np.zeros(1000, dtype=int), [1])
    assert g.passes(1e-3)


def test_geometric_samples_fit_pi_one():
    rng = BitStream(21)
    xs = [rng.geometric() for _ in range(20000)]
    assert goodness_of_fit(xs, [pi_exact(1, j) for j in range(30)]).p_value > 1e-3


def test_wrong_law_is_rejected():
    rng = BitStream(21)
    xs = [rng.geometric() + rng.geometric() for _ in range(20000)]
    assert goodness_of_fit(xs, [pi_exact(1, j) for j in range(30)]).p_value < 1e-6


def test_impossible_cell():
    g = gof_counts([10, 1], [11, 0])
    assert g.p_value == 0.0


def test_empty_support_refused():
    with pytest.raises(ValueError):
        goodness_of_fit([0, 1], [])
    with pytest.raises(ValueError):
        goodness_of_fit([], [1])


@given(st.lists(st.floats(0.001, 1.0), min_size=2, max_size=40), st.integers(200, 5000))
@settings(max_examples=80, deadline=None)
def test_pooled_cells_meet_the_minimum(weights, n):
    p = np.array(weights) / sum(weights)
    obs = np.random.default_rng(0).multinomial(n, p)
    g = gof_counts(obs, p * n)
    assert np.all(g.expected >= 5.0 - 1e-9)
    assert g.observed.sum() == n


def test_two_sample_same_and_different():
    rng = np.random.default_rng(1)
    a, b = rng.geometric(0.5, 20000), rng.geometric(0.5, 20000)
    assert two_sample(a, b).p_value > 1e-3
    assert two_sample(a, rng.geometric(0.4, 20000)).p_value < 1e-6


def test_bonferroni_and_wilson():
    ok, thr = bonferroni([0.5, 0.06], 0.1)
    assert ok and thr == 0.05
    assert not bonferroni([0.5, 0.04], 0.1)[0]
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.1


# -- fits -----------------------------------------------------------------

def test_shape_fit_stable_and_drifting():
    hs = [2, 4, 8, 16, 32, 64]
    assert fits.shape_fit(hs, [3 * h ** 0.5 for h in hs], lambda h: h ** 0.5).stable
    assert not fits.shape_fit(hs, [h for h in hs], lambda h: h ** 0.5).stable


def test_exponential_fit():
    hs = [8, 16, 32, 64, 128]
    f = fits.exponential_fit(hs, [math.exp(-0.7 * h ** 0.5) for h in hs], 0.25)
    assert f.decaying and f.gamma == pytest.approx(0.7)
    assert fits.exponential_fit(hs, [0.0] * 5, 0.25).decaying
    assert not fits.exponential_fit(hs, [0.1 * i for i in range(1, 6)], 0.25).decaying


def test_band():
    assert fits.band(16, 0.25) == [4, 5, 6, 7, 8, 9, 10, 11, 12]
    assert 8 in fits.band(16, 0.05, minus=True)


# -- bound audits ---------------------------------------------------------

def test_hit_ratio_example():
    assert hit_ratio_exact(2, 1) == Fraction(1, 2)


def test_no_cross_example():
    q = first_passage_dp("Y", 2, exact=True).absorb_prob[1]
    assert q == Fraction(2, 3)
    c_min = (q - Fraction(1, 2)) * math.sqrt(2)
    assert c_min == pytest.approx((2 / 3 - 1 / 2) * math.sqrt(2))


def test_tau_mean_example():
    e = first_passage_dp("Z", 1, exact=True).mean_stop[0]
    assert e == 2 and e - 1 <= 1


QUICK = ["hit_exactly", "no_hit_band", "tilde_tau_mean", "offband_tail", "stop_time_mean",
         "hit_ratio", "no_cross", "tau_mean", "tau_second_moment"]


@pytest.mark.parametrize("audit_id", QUICK)
def test_quick_bound_audits_pass(audit_id):
    rep = A.bound_audit(audit_id)
    assert rep.verdict == "pass", rep.fitted


def test_kolmogorov_audit_small():
    rep = A.bound_audit("kolmogorov", ns=(1, 4, 16, 64), mc_ns=(16,), n_samples=20000)
    assert rep.verdict == "pass"
    assert 0 < rep.fitted["theta0"] < math.log(2)


def test_overshoot_small():
    rep = A.bound_audit("overshoot", h_max=10, u_extra=30, exact_h=4)
    assert rep.verdict == "pass" and rep.counts["violations"] == 0


def test_max_jump_reports_both_eps():
    rep = A.bound_audit("max_jump", hs=(8, 16, 32, 64), eps=(0.05, 0.25))
    assert set(rep.fitted) == {"eps=0.05", "eps=0.25"}
    assert rep.verdict in ("pass", "inconclusive", "fail")


def test_unknown_bound_audit():
    with pytest.raises(KeyError):
        A.bound_audit("nope")


# -- martingales, multi-hit, long run --------------------------------------

@pytest.mark.parametrize("which", A.MARTINGALES)
def test_martingales_small(which):
    rep = A.martingale_audit(which, n_samples=20000, seed=3)
    assert rep.verdict == "pass", [(p.params, p.passed) for p in rep.points]
    assert rep.n_samples == 20000 and rep.standard_error is not None


def test_y_mean_example():
    rep = A.martingale_audit("Y-mean", n_samples=20000, k=5, h=10)
    mc = rep.points[-1]
    assert abs(mc.statistic - 5) <= 3 * mc.p_or_slack


def test_unknown_martingale():
    with pytest.raises(ValueError):
        A.martingale_audit("X")


def test_multi_hit_small():
    rep = A.multi_hit_audit(hs=(16, 32), n_samples=20000)
    assert not rep.hard
    assert rep.fitted["decay_in_p"] and rep.fitted["monte_carlo_agrees"]
    q16 = rep.fitted["Q_A"]["16"]
    assert q16[0] > q16[1] > q16[2]


def test_f4_longrun_small():
    rep = A.f4_longrun_report(n_walks=4, n_steps=10**4, seed=1)
    assert rep.fitted["every_walk_has_f2"]
    assert not rep.hard and rep.verdict in ("diagnostic", "fail")
    # late windows without f(4) events are plain zeros
    assert all(isinstance(w, int) for w in rep.counts["walks_with_f4"])


def test_f4_totals_deterministic():
    a = A.f4_longrun_report(n_walks=3, n_steps=5000, seed=2)
    b = A.f4_longrun_report(n_walks=3, n_steps=5000, seed=2, workers=2)
    assert counts_digest([a]) == counts_digest([b])


# -- reports --------------------------------------------------------------

def test_report_round_trip():
    reps = [A.kernel_rows_audit(8), A.bound_audit("no_cross", hs=(2, 4, 8)),
            A.martingale_audit("Z-super", n_samples=2000)]
    back = reports_from_json(reports_to_json(reps))
    assert [r.to_dict() for r in back] == [r.to_dict() for r in reps]


def test_csv_rows_and_header():
    assert reports_to_csv([]).strip() == "audit_id,method,params,statistic,p_or_slack,pass"
    rep = AuditReport("gof", "monte-carlo", {"i": 1}, statistic=1.2, p_value=0.3)
    lines = reports_to_csv([rep]).strip().splitlines()
    assert len(lines) == 2 and lines[1].split(",")[-2] == "0.3"


def test_non_finite_values_serialize():
    rep = AuditReport("x", "exact", fitted={"gamma": math.inf}, statistic=math.nan)
    d = json.loads(reports_to_json([rep]))
    assert d["audits"][0]["fitted"]["gamma"] == "inf"


def test_diagnostics_do_not_change_the_verdict():
    reps = [AuditReport("a", "exact"), AuditReport("b", "exact", verdict="diagnostic")]
    assert combine_verdicts(reps) == "pass"
    reps.append(AuditReport("c", "exact", verdict="fail", hard=False))
    assert combine_verdicts(reps) == "pass"
    reps.append(AuditReport("d", "exact", verdict="inconclusive"))
    assert combine_verdicts(reps) == "inconclusive"


def test_bad_report_fields():
    with pytest.raises(ValueError):
        AuditReport("a", "guess")
    with pytest.raises(ValueError):
        AuditReport("a", "exact", verdict="maybe")
