"""Acceptance criteria 1 to 12 at their stated budgets.

Each test records one summary line (printed at the end of the run) and then
asserts.  Diagnostic criteria pass when their report verdict is
``diagnostic``; a ``fail`` verdict there is still reported as a failure.
"""
import time
from fractions import Fraction

import pytest

from conftest import record
from favsites import parallel
from favsites.report import counts_digest
from favsites.verify import audits as A

pytestmark = pytest.mark.acceptance


def test_criterion_01_identity_suite():
    t0 = time.perf_counter()
    rep = A.identity_suite_audit(n_paths=10**5, n_steps=10**4, seed=1)
    dt = time.perf_counter() - t0
    viol = rep.counts["violations"]
    ok = rep.verdict == "pass" and sum(viol.values()) == 0 and dt < 300
    record(1, ok, f"1e5 paths x 1e4 steps, violations {sum(viol.values())}, {dt:.0f}s (target < 300s)")
    assert ok, (viol, dt)


def test_criterion_02_kernels():
    rows = A.kernel_rows_audit(64)
    fit = A.sampler_gof_audit((1, 3, 10, 50), n_samples=10**6, seed=2)
    ok = rows.verdict == "pass" and fit.verdict == "pass"
    record(2, ok, f"rows i<=64 exact: {rows.counts['violations']} bad; sampler min p "
                  f"{fit.p_value:.3g} ({fit.notes})")
    assert ok


def test_criterion_03_oracle_equivalence():
    rep = A.oracle_equivalence_audit(t_max=12, n_samples=10**6, seed=3, z=4.0)
    two = rep.fitted["P(#K(2)=2 and S(2) in K(2))"]
    ok = rep.verdict == "pass" and Fraction(two) == 1
    record(3, ok, f"t<=12 at n=1e6: worst {rep.statistic:.2f} SE (limit 4); "
                  f"P(#K(2)=2, S(2) in K(2)) = {two}")
    assert ok


@pytest.fixture(scope="module")
def rk_reports():
    return {r.audit_id: r for r in A.ray_knight_audit(n_samples=10**6, seed=4, t_cap=20)}


def test_criterion_04_ray_knight(rk_reports):
    conv = rk_reports["ray_knight_convention"]
    laws = [r for k, r in rk_reports.items() if k.startswith("ray_knight_law_")]
    origin = rk_reports["ray_knight_origin_enumeration"]
    laws_ok = len(laws) == 4 and all(r.verdict == "pass" for r in laws)
    ok = conv.verdict == "pass" and laws_ok and origin.verdict == "pass"
    record(4, ok, f"convention {conv.fitted.get('chosen')}; laws at 4 (x,k) "
                  f"{'pass' if laws_ok else 'FAIL'}; origin enumeration T_cap=20 censored "
                  f"{origin.censored_mass:.4f} (limit 1e-3)")
    assert ok, {k: r.verdict for k, r in rk_reports.items()}


def test_criterion_05_first_passage():
    rep = A.first_passage_audit(n_samples=10**5, seed=5, cap=64, tol=1e-9)
    ok = rep.verdict == "pass"
    vals = {p.params["check"]: p.statistic for p in rep.points}
    record(5, ok, f"P(sigma_2<inf|Y0=1)={vals['P(sigma_2 < inf | Y0=1) float']:.12f}, "
                  f"E(tau_1|Z0=0)={vals['E(tau_1 | Z0=0) float']:.12f}, MC within 3 SE")
    assert ok, [(p.params, p.passed) for p in rep.points]


def test_criterion_06_overshoot():
    rep = A.overshoot_audit(h_max=30, u_extra=100, slack=1e-12)
    ok = rep.verdict == "pass" and rep.counts["violations"] == 0
    record(6, ok, f"h<=30, k<h, u<=h+100: {rep.counts['violations']} violations, "
                  f"min slack {rep.slack:.3g}")
    assert ok


def test_criterion_07_overshoot_moments():
    rep = A.overshoot_moments_audit(h_fit=100, h_scan=10**4, dps=50)
    bad = {k: v["first_exceeding_h"] for k, v in rep.fitted.items() if v["first_exceeding_h"]}
    ok = rep.verdict == "pass"
    desc = "; ".join(f"{k} C*={v['C_star']:.4f} max={v['scan_max']:.4f}"
                     for k, v in rep.fitted.items())
    record(7, ok, desc + (f"; exceeded at {bad}" if bad else ""))
    assert ok, rep.fitted


def test_criterion_08_monotonicity():
    rep = A.ratio_monotonicity_audit(200, 500, 200, 500, 500)
    ok = rep.verdict == "pass"
    record(8, ok, f"i,l<=200, j,v,u<=500 exact: {int(rep.statistic)} violations")
    assert ok


def test_criterion_09_martingales():
    reps = [A.martingale_audit(m, n_samples=10**5, seed=9) for m in A.MARTINGALES]
    ok = all(r.verdict == "pass" for r in reps)
    record(9, ok, ", ".join(f"{r.audit_id.split('_', 1)[1]} {r.verdict}" for r in reps))
    assert ok


def test_criterion_10_multi_hit_shape():
    rep = A.multi_hit_audit(hs=(16, 32, 64), eps=0.25, seed=10)
    f = rep.fitted
    ok = rep.verdict == "diagnostic"
    record(10, ok, f"diagnostic: decay in p {f['decay_in_p']}, exponent A {f['exponent_A_p0']:.4f} "
                   f"in [-0.75,-0.25] {f['exponent_A_in_band']}, exponent B {f['exponent_B_p0']:.4f} "
                   f"in [0.25,0.75] {f['exponent_B_in_band']}")
    assert ok, f


def test_criterion_11_f4_longrun():
    t0 = time.perf_counter()
    rep = A.f4_longrun_report(n_walks=100, n_steps=10**7, seed=11)
    dt = time.perf_counter() - t0
    ok = rep.verdict == "diagnostic"
    record(11, ok, f"diagnostic: 100 x 1e7 in {dt:.0f}s, rising windows beyond j=20: "
                   f"{rep.fitted['rising_windows']}")
    assert ok, rep.fitted


DETERMINISM_RUNS = [
    ("crossing_identities", lambda w: A.identity_suite_audit(2000, 2000, seed=12, workers=w)),
    ("sampler_fit", lambda w: A.sampler_gof_audit((1, 10), 20000, seed=12, workers=w)),
    ("oracle_equivalence", lambda w: A.oracle_equivalence_audit(8, 20000, seed=12, workers=w)),
    ("martingale_Z-super", lambda w: A.martingale_audit("Z-super", 20000, seed=12, workers=w)),
    ("f4_longrun", lambda w: A.f4_longrun_report(6, 20000, seed=12, workers=w)),
]


def test_criterion_12_determinism():
    # small blocks so every worker count really splits the work
    parallel.set_block_size(997)
    try:
        digests = {}
        for name, run in DETERMINISM_RUNS:
            digests[name] = {w: counts_digest([run(w)]) for w in (1, 2, 4)}
    finally:
        parallel.set_block_size(parallel.BLOCK_DEFAULT)
    same = {n: len(set(d.values())) == 1 for n, d in digests.items()}
    ok = all(same.values())
    record(12, ok, f"{len(same)} audits at workers 1/2/4: "
                   + ", ".join(f"{n} {'identical' if s else 'DIFFER'}" for n, s in same.items()))
    assert ok, digests
