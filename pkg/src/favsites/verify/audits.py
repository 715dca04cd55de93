"""Audit suite.

Every audit returns an :class:`~favsites.report.AuditReport`.  Audits are
grouped as

* walk and kernel checks (identities, sampler fit, oracle equivalence,
  Ray-Knight law, first-passage values),
* bound audits of the chain estimates, dispatched by :func:`bound_audit`,
* martingale audits, the multi-hit recursion audit and the long-run f(4)
  diagnostic.

Monte Carlo parts draw replica streams ``offset + p`` of the master seed;
offsets are fixed per audit so that different audits never share streams.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .. import parallel
from ..branching import (first_passage_dp, kernel_pmf, kernel_row, kolmogorov_theta0,
                         pi_exact, tail_float, tilde_passage_dp)
from ..chain_kernels import OUTCOME_ABSORBED, OUTCOME_CENSORED, OUTCOME_CROSSED
from ..report import AuditPoint, AuditReport
from . import fits
from .stats import bonferroni, goodness_of_fit, mean_se, proportion_se, wilson_interval

ALPHA = 1e-3
Z_AGREE = 3.0
EPS_DEFAULT = 0.05
H_SCAN = (2, 4, 8, 16, 32, 64, 128, 256)

_CHAIN = "favsites.chain_kernels:"
_WALK = "favsites.walk_kernels:"


def _runs(target, seed, n, args, workers, offset=0):
    return parallel.concat(parallel.run_replicas(target, seed, n, args, workers, offset=offset))


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


# --------------------------------------------------------------------------
# walk identities


def identity_suite_audit(n_paths: int = 10**5, n_steps: int = 10**4, seed: int = 0,
                         workers: int = 1, checkpoint: int = 1000, r_max: int = 6) -> AuditReport:
    from ..walk_kernels import VIOLATION_NAMES

    parts = parallel.run_replicas(_WALK + "identity_suite_kernel", seed, n_paths,
                                  (n_steps, r_max, checkpoint), workers)
    viol = np.sum([p[0] for p in parts], axis=0)
    ftot = np.sum([p[1] for p in parts], axis=0)
    total = int(viol.sum())
    return AuditReport(
        "crossing_identities", "monte-carlo",
        {"n_paths": n_paths, "n_steps": n_steps, "checkpoint": checkpoint, "seed": seed},
        statistic=float(total), slack=float(-total), verdict=_verdict(total == 0),
        n_samples=n_paths,
        points=[AuditPoint({"identity": name}, float(v), None, v == 0)
                for name, v in zip(VIOLATION_NAMES, viol.tolist())],
        counts={"violations": dict(zip(VIOLATION_NAMES, viol.tolist())),
                "f_totals": ftot.tolist()})


# --------------------------------------------------------------------------
# kernels


def kernel_rows_audit(i_max: int = 64) -> AuditReport:
    """Exact rows sum to one and have means i (pi) and i + 1 (rho)."""
    points = []
    bad = 0
    for kind, shift in (("pi", 0), ("rho", 1)):
        for i in range(i_max + 1):
            row = kernel_row(kind, i)
            ok = row.mass() == 1 and row.mean() == i + shift
            bad += not ok
            points.append(AuditPoint({"kind": kind, "i": i}, float(row.mean()),
                                     float(row.mass() - 1), ok))
    return AuditReport("kernel_rows", "exact", {"i_max": i_max}, statistic=float(bad),
                       slack=0.0 if bad == 0 else -float(bad), verdict=_verdict(bad == 0),
                       points=points, counts={"violations": bad})


def sampler_gof_audit(sources=(1, 3, 10, 50), n_samples: int = 10**6, seed: int = 0,
                      workers: int = 1, alpha: float = ALPHA) -> AuditReport:
    """Chi-square fit of jitted offspring sums against the exact rows,
    Bonferroni over all (kernel, source) cells."""
    points, pvals, counts = [], [], {}
    for kind, extra in (("pi", 0), ("rho", 1)):
        for i in sources:
            off = (i + 1) << 32 | extra << 31
            xs = _runs(_CHAIN + "offspring_replicas", seed, n_samples, (i + extra,), workers, off)
            top = 10 * i + 80
            g = goodness_of_fit(xs, kernel_pmf(kind, i, np.arange(top)))
            pvals.append(g.p_value)
            counts[f"{kind}{i}"] = np.bincount(xs).tolist()
            points.append(AuditPoint({"kind": kind, "i": i}, g.statistic, g.p_value, None))
    ok, thr = bonferroni(pvals, alpha)
    for p in points:
        p.passed = p.p_or_slack >= thr
    return AuditReport("sampler_fit", "monte-carlo",
                       {"sources": list(sources), "alpha": alpha, "seed": seed},
                       statistic=min(pvals), p_value=min(pvals), verdict=_verdict(ok),
                       n_samples=n_samples, points=points, counts=counts,
                       notes=f"Bonferroni threshold {thr:.3g}")


# --------------------------------------------------------------------------
# walk functionals against the enumeration oracle


def oracle_equivalence_audit(t_max: int = 12, n_samples: int = 10**6, seed: int = 0,
                             workers: int = 1, z: float = 4.0) -> AuditReport:
    """Every enumerated feature law at every t <= t_max against Monte Carlo
    frequencies, cell by cell within ``z`` standard errors; a cell the
    oracle rules out must stay empty."""
    from ..exact_oracle import FEATURES, enumerate_feature_laws

    laws = enumerate_feature_laws(t_max)
    parts = parallel.run_replicas(_WALK + "fixed_time_histograms", seed, n_samples,
                                  (t_max,), workers)
    hist = np.sum(parts, axis=0)
    points, worst, bad = [], 0.0, 0
    for t in range(1, t_max + 1):
        for fi, name in enumerate(FEATURES):
            law = laws[t][name]
            row = hist[t - 1, fi]
            shift = t_max if name == "position" else 0
            seen = {v - shift for v in np.nonzero(row)[0].tolist()}
            cell_bad = 0
            cell_worst = 0.0
            for v in sorted(set(law.masses) | seen):
                p = float(law.masses.get(v, Fraction(0)))
                c = int(row[v + shift]) if 0 <= v + shift < row.shape[0] else 0
                if p == 0.0:
                    if c:
                        cell_bad += 1
                        cell_worst = math.inf
                    continue
                se = math.sqrt(p * (1 - p) / n_samples)
                dev = abs(c / n_samples - p) / se if se > 0 else (0.0 if c == n_samples else math.inf)
                cell_worst = max(cell_worst, dev)
                if dev > z:
                    cell_bad += 1
            bad += cell_bad
            worst = max(worst, cell_worst)
            points.append(AuditPoint({"t": t, "feature": name}, cell_worst, None, cell_bad == 0))
    two = laws[2]["on_fav_n"].masses.get(2, Fraction(0)) if t_max >= 2 else None
    exact_two = two == 1
    return AuditReport(
        "oracle_equivalence", "monte-carlo", {"t_max": t_max, "z": z, "seed": seed},
        statistic=worst, slack=z - worst, verdict=_verdict(bad == 0 and (t_max < 2 or exact_two)),
        n_samples=n_samples, points=points,
        counts={"histograms": hist.tolist()},
        fitted={"P(#K(2)=2 and S(2) in K(2))": str(two)},
        notes=f"{bad} cells beyond {z} SE; worst deviation {worst:.3f} SE")


# --------------------------------------------------------------------------
# Ray-Knight law


RK_CONFIGS = ((1, 0), (2, 0), (2, 1), (3, 2))


def ray_knight_audit(configs=RK_CONFIGS, n_samples: int = 10**6, seed: int = 0,
                     workers: int = 1, alpha: float = ALPHA, t_cap: int = 20) -> list[AuditReport]:
    """Adjudicate the patch convention, compare laws at every configured
    (x, k), and check the walk-side law of L(T_U(1, 1), 0) by enumeration."""
    from ..rayknight import adjudicate_convention, compare_laws_rk_vs_walk

    adj = adjudicate_convention(t_cap=t_cap)
    out = []
    if adj.chosen is None:
        out.append(AuditReport("ray_knight_convention", "enumeration",
                               {"t_cap": t_cap}, verdict="fail",
                               notes=f"no unique consistent convention: {adj.consistent}"))
        return out
    out.append(AuditReport(
        "ray_knight_convention", "enumeration", {"t_cap": t_cap, "x": 1, "k": 0, "site": -1},
        fitted={"chosen": adj.chosen.value, "consistent": adj.consistent},
        verdict="pass", notes="; ".join(f"{k}: {v}" for k, v in adj.witnesses.items())))
    for x, k in configs:
        sites = list(range(-1, x + 2))
        rep = compare_laws_rk_vs_walk(x, k, sites, n_samples, adj.chosen, seed=seed,
                                      alpha=alpha, workers=workers)
        rep.audit_id = f"ray_knight_law_x{x}_k{k}"
        out.append(rep)
    out.append(origin_local_time_audit(t_cap))
    return out


def origin_local_time_audit(t_cap: int = 20, censor_tolerance: float = 1e-3) -> AuditReport:
    """L(T_U(1,1), 0) against geometric(1/2) on the uncensored support of the
    enumeration, plus the censoring requirement itself."""
    from ..exact_oracle import enumerate_stopped_profile, stopped_marginal_check
    from ..walk_core import StopSpec

    dist = enumerate_stopped_profile(StopSpec.inverse_up(1, 1), t_cap, sites=(0, 1),
                                     quantity="local")
    geo = lambda m: Fraction(1, 2 ** (m + 1))
    support = max(v[0] for v in dist.masses) + 1
    law_ok, bad = stopped_marginal_check(dist, 0, geo, support)
    one = dist.marginal(1)
    site1_ok = set(one) == {1}
    cens = dist.censored
    cens_ok = cens < Fraction(censor_tolerance)
    return AuditReport(
        "ray_knight_origin_enumeration", "enumeration",
        {"t_cap": t_cap, "censor_tolerance": censor_tolerance},
        statistic=float(cens), slack=censor_tolerance - float(cens),
        censored_mass=float(cens),
        verdict=_verdict(law_ok and site1_ok and cens_ok),
        points=[AuditPoint({"check": "geometric sandwich at site 0"}, float(len(bad)), None, law_ok),
                AuditPoint({"check": "L(T,1) = 1"}, None, None, site1_ok),
                AuditPoint({"check": "censored mass"}, float(cens),
                           censor_tolerance - float(cens), cens_ok)],
        counts={"censored": f"{cens.numerator}/{cens.denominator}"},
        notes="censored mass is P(T_U(1,1) > t_cap)")


# --------------------------------------------------------------------------
# first passage values


def first_passage_audit(n_samples: int = 10**5, seed: int = 0, workers: int = 1,
                        cap: int = 64, tol: float = 1e-9) -> AuditReport:
    y = first_passage_dp("Y", 2, cap=cap, exact=True)
    z = first_passage_dp("Z", 1, cap=cap, exact=True)
    yf = first_passage_dp("Y", 2, cap=cap)
    zf = first_passage_dp("Z", 1, cap=cap)
    p_cross, e_tau = y.cross_prob[1], z.mean_stop[0]
    rows_y = _runs(_CHAIN + "race_batch", seed, n_samples, (0, 1, 2, 10**6), workers, 1 << 33)
    rows_z = _runs(_CHAIN + "race_batch", seed, n_samples, (1, 0, 1, 10**6), workers, 2 << 33)
    hit = rows_y[:, 0] == OUTCOME_CROSSED
    ph = float(hit.mean())
    m, se = mean_se(rows_z[:, 1])
    checks = [
        ("P(sigma_2 < inf | Y0=1) exact", float(p_cross), abs(p_cross - Fraction(1, 3)) == 0),
        ("P(sigma_2 < inf | Y0=1) float", float(yf.cross_prob[1]), abs(yf.cross_prob[1] - 1 / 3) < tol),
        ("E(tau_1 | Z0=0) exact", float(e_tau), e_tau == 2),
        ("E(tau_1 | Z0=0) float", float(zf.mean_stop[0]), abs(zf.mean_stop[0] - 2) < tol),
        ("P(sigma_2 < inf | Y0=1) MC", ph, abs(ph - 1 / 3) <= Z_AGREE * proportion_se(1 / 3, n_samples)),
        ("E(tau_1 | Z0=0) MC", m, abs(m - 2) <= Z_AGREE * se),
    ]
    ok = all(c[2] for c in checks)
    return AuditReport(
        "first_passage_values", "exact-dp", {"cap": cap, "tol": tol, "seed": seed},
        statistic=float(p_cross), verdict=_verdict(ok), n_samples=n_samples,
        points=[AuditPoint({"check": n}, v, None, bool(g)) for n, v, g in checks],
        counts={"y_outcomes": np.bincount(rows_y[:, 0], minlength=3).tolist(),
                "z_steps": np.bincount(rows_z[:, 1]).tolist()},
        fitted={"truncation_y": y.truncation_error, "truncation_z": z.truncation_error})


# --------------------------------------------------------------------------
# bound audits


def _scan_report(audit_id, method, hs, values, rate, params, rate_name, notes="") -> AuditReport:
    fit = fits.shape_fit(hs, values, rate)
    return AuditReport(
        audit_id, method, dict(params, hs=list(hs), rate=rate_name),
        statistic=fit.c_star, slack=fits.STABLE_SLOPE - fit.slope, fitted=fit.as_dict(),
        verdict=_verdict(fit.stable),
        points=[AuditPoint({"h": int(h)}, float(v), float(c), None)
                for h, v, c in zip(hs, values, fit.constants)],
        notes=notes)


def _exp_report(audit_id, method, hs, values, eps, params, extra_ok=True, notes="",
                extra_points=()) -> AuditReport:
    fit = fits.exponential_fit(hs, values, eps)
    return AuditReport(
        audit_id, method, dict(params, hs=list(hs), eps=eps),
        statistic=fit.gamma, slack=fit.gamma if math.isfinite(fit.gamma) else None,
        fitted=fit.as_dict(), verdict=_verdict(fit.decaying and extra_ok),
        points=[AuditPoint({"h": int(h)}, float(v), None, None) for h, v in zip(hs, values)]
        + list(extra_points),
        notes=notes)


def big_jump_probability(kind: str, h: int, a: float) -> np.ndarray:
    """P(largest |jump| up to the stop exceeds ``a``) for starts 0..h-1.

    Solves p = b + Q' p where b_i is the chance of a jump beyond ``a`` from
    ``i`` and Q' the transition restricted to small jumps between transient
    states.  The crossing step itself counts as a jump.
    """
    kern = "pi" if kind == "Y" else "rho"
    first = 1 if kind == "Y" else 0
    trans = np.arange(first, h)
    hi_cut = np.floor(trans + a).astype(int) + 1
    lo_cut = np.ceil(trans - a).astype(int) - 1
    b = np.zeros(len(trans))
    Q = np.zeros((len(trans), len(trans)))
    for r, i in enumerate(trans):
        up = float(tail_float(kern, int(i), int(hi_cut[r])))
        down = float(kernel_pmf(kern, int(i), np.arange(0, lo_cut[r] + 1)).sum()) if lo_cut[r] >= 0 else 0.0
        b[r] = up + down
        row = kernel_pmf(kern, int(i), trans)
        row[np.abs(trans - i) > a] = 0.0
        Q[r] = row
    p = np.linalg.solve(np.eye(len(trans)) - Q, b) if len(trans) else np.zeros(0)
    out = np.zeros(h)
    out[first:] = p
    return out


H_SCAN_LONG = (8, 16, 32, 64, 128, 256, 512, 1024, 2048)


def max_jump_audit(hs=H_SCAN_LONG, eps=(EPS_DEFAULT, 0.25)) -> AuditReport:
    """Exponential decay of P(M_h > h^(1/2+eps)) and the Z analogue, fitted
    at every eps given.  Pass when every fit decays; inconclusive when only
    the larger eps values resolve the decay inside the scanned range."""
    eps = (eps,) if isinstance(eps, (int, float)) else tuple(eps)
    fitted, points, decays = {}, [], {}
    for e in eps:
        ys, zs = [], []
        for h in hs:
            a = h ** (0.5 + e)
            ys.append(float(big_jump_probability("Y", h, a).max()))
            zs.append(float(big_jump_probability("Z", h, a).max()))
        fy = fits.exponential_fit(hs, ys, e)
        fz = fits.exponential_fit(hs, zs, e)
        fitted[f"eps={e}"] = {"Y": fy.as_dict(), "Z": fz.as_dict()}
        decays[e] = fy.decaying and fz.decaying
        points += [AuditPoint({"h": h, "chain": c, "eps": e}, v, None, None)
                   for c, vals in (("Y", ys), ("Z", zs)) for h, v in zip(hs, vals)]
    if all(decays.values()):
        verdict = "pass"
    elif decays[max(eps)]:
        verdict = "inconclusive"
    else:
        verdict = "fail"
    return AuditReport(
        "max_jump", "exact-dp", {"hs": list(hs), "eps": list(eps)},
        statistic=float(sum(decays.values())), fitted=fitted, verdict=verdict, points=points,
        notes="sup over starts k < h; starts >= h have no jump by definition")


def hit_exactly_audit(hs=H_SCAN, eps: float = EPS_DEFAULT) -> AuditReport:
    ys, zs = [], []
    for h in hs:
        ys.append(float(tilde_passage_dp("Y", h).hit_exact.sum(axis=1).max()))
        zs.append(float(tilde_passage_dp("Z", h).hit_exact.sum(axis=1).max()))
    rate = lambda h: h ** (-0.5 + eps)
    fy, fz = fits.shape_fit(hs, ys, rate), fits.shape_fit(hs, zs, rate)
    return AuditReport(
        "hit_exactly", "exact-dp", {"hs": list(hs), "eps": eps, "rate": "h^(-1/2+eps)"},
        statistic=max(fy.c_star, fz.c_star), fitted={"Y": fy.as_dict(), "Z": fz.as_dict()},
        verdict=_verdict(fy.stable and fz.stable),
        points=[AuditPoint({"h": h, "chain": c}, v, None, None)
                for c, vals in (("Y", ys), ("Z", zs)) for h, v in zip(hs, vals)])


def no_hit_band_audit(hs=H_SCAN, eps: float = EPS_DEFAULT) -> AuditReport:
    vals = []
    for h in hs:
        t = tilde_passage_dp("Y", h)
        vals.append(float(max(t.no_hit[k] for k in fits.band(h, eps))))
    return _scan_report("no_hit_band", "exact-dp", hs, vals, lambda h: h ** (-0.5 + eps),
                        {"eps": eps}, "h^(-1/2+eps)", "sup over the band of starts")


def tilde_tau_mean_audit(hs=H_SCAN, eps: float = EPS_DEFAULT) -> AuditReport:
    all_k, in_band = [], []
    for h in hs:
        t = tilde_passage_dp("Z", h)
        all_k.append(float(t.mean_time.max()))
        in_band.append(float(max(t.mean_time[k] for k in fits.band(h, eps))))
    f1 = fits.shape_fit(hs, all_k, lambda h: h)
    f2 = fits.shape_fit(hs, in_band, lambda h: h ** (0.5 + eps))
    return AuditReport(
        "tilde_tau_mean", "exact-dp", {"hs": list(hs), "eps": eps},
        statistic=max(f1.c_star, f2.c_star),
        fitted={"all_k_over_h": f1.as_dict(), "band_over_h^(1/2+eps)": f2.as_dict()},
        verdict=_verdict(f1.stable and f2.stable),
        points=[AuditPoint({"h": h, "range": r}, v, None, None)
                for r, vals in (("all", all_k), ("band", in_band)) for h, v in zip(hs, vals)],
        notes="starts k > h stop at the first step")


def offband_tail_audit(hs=tuple(range(2, 201)), eps: float = EPS_DEFAULT) -> AuditReport:
    from ..exact_oracle import kernel_tail_exact

    vals, bad = [], 0
    for h in hs:
        tc = kernel_tail_exact("offband", h=h, eps=eps)
        vals.append(float(tc.value))
        bad += tc.slack != 0
    return _exp_report("offband_tail", "exact", hs, vals, eps, {},
                       extra_ok=bad == 0,
                       notes=f"{bad} mismatches against the independent binomial sum",
                       extra_points=[AuditPoint({"check": "binomial identity"}, float(bad), None, bad == 0)])


def stop_time_mean_audit(hs=H_SCAN) -> AuditReport:
    vals = [float(first_passage_dp("Y", h).mean_stop.max()) for h in hs]
    return _scan_report("stop_time_mean", "exact-dp", hs, vals, lambda h: h * h, {}, "h^2")


def kolmogorov_dp(n: int, lam: float) -> float:
    """P(max_{j<=n} |S_j| > lam), S a walk of centred geometric(1/2) steps."""
    L = int(math.floor(lam))
    size = 2 * L + 1
    s = np.arange(size)
    d = s[None, :] - s[:, None] + 1
    M = np.where(d >= 0, np.exp2(-(d + 1.0)), 0.0)
    v = np.zeros(size)
    v[L] = 1.0
    for _ in range(n):
        v = v @ M
    return max(0.0, 1.0 - float(v.sum()))


def kolmogorov_audit(ns=(1, 4, 16, 64, 256, 1024), cs=(0.5, 1.0, 2.0, 3.0, 4.0),
                     mc_ns=(16, 64, 256), n_samples: int = 10**5, seed: int = 0,
                     workers: int = 1) -> AuditReport:
    theta0 = kolmogorov_theta0()
    points, bad = [], 0
    exact = {}
    for n in ns:
        for c in cs:
            lam = c * math.sqrt(n)
            if lam / (4 * n) >= theta0:
                continue
            v = kolmogorov_dp(n, lam)
            bound = 2 * math.exp(-lam * lam / (8 * n))
            ok = v <= bound + 1e-12
            bad += not ok
            exact[(n, c)] = v
            points.append(AuditPoint({"n": n, "lambda": lam, "method": "dp"}, v, bound - v, ok))
    counts = {}
    for n in mc_ns:
        m = _runs(_CHAIN + "kolmogorov_batch", seed, n_samples, (n,), workers, (n + 1) << 34)
        counts[str(n)] = np.bincount(m).tolist()
        for c in cs:
            lam = c * math.sqrt(n)
            if (n, c) not in exact:
                continue
            est = float((m > lam).mean())
            se = proportion_se(exact[(n, c)], n_samples)
            ok = abs(est - exact[(n, c)]) <= max(Z_AGREE * se, 1.0 / n_samples)
            bad += not ok
            points.append(AuditPoint({"n": n, "lambda": lam, "method": "mc"}, est,
                                     exact[(n, c)] - est, ok))
    return AuditReport("kolmogorov", "exact-dp",
                       {"ns": list(ns), "cs": list(cs), "theta0": theta0, "seed": seed},
                       statistic=float(bad), verdict=_verdict(bad == 0), n_samples=n_samples,
                       points=points, counts=counts, fitted={"theta0": theta0},
                       notes="DP probabilities against the bound; MC against the DP")


def hit_ratio_audit(hs=tuple(range(2, 201)), eps: float = EPS_DEFAULT) -> AuditReport:
    """Both readings of the band: h^(1/2+eps) and h^(1/2-eps)."""
    from ..exact_oracle import hit_ratio_exact

    fitted, ok, points = {}, True, []
    for label, minus in (("1/2+eps", False), ("1/2-eps", True)):
        vals = []
        for h in hs:
            ls = [l for l in fits.band(h, eps, minus) if 0 < l <= h]
            vals.append(float(max(hit_ratio_exact(h, l) for l in ls)) if ls else 0.0)
        f = fits.shape_fit(hs, vals, lambda h: h ** (-0.5 + eps))
        fitted[label] = f.as_dict()
        ok = ok and f.stable
        points += [AuditPoint({"h": h, "band": label}, v, None, None) for h, v in zip(hs, vals)]
    return AuditReport("hit_ratio", "exact", {"hs": [hs[0], hs[-1]], "eps": eps},
                       statistic=max(v["C_star"] for v in fitted.values()), fitted=fitted,
                       verdict=_verdict(ok), points=points)


def no_cross_audit(hs=H_SCAN) -> AuditReport:
    vals = []
    for h in hs:
        sol = first_passage_dp("Y", h)
        vals.append(max(float(sol.absorb_prob[k]) - (h - k) / h for k in range(h)))
    # the bound is on an excess that may be negative; the constant is the
    # positive part of the scaled excess
    return _scan_report("no_cross", "exact-dp", hs, [max(v, 0.0) for v in vals],
                        lambda h: h ** -0.5, {}, "h^(-1/2)",
                        "P(sigma_h = inf | Y0=k) - (h-k)/h, max over k")


def tau_mean_audit(hs=H_SCAN) -> AuditReport:
    vals = []
    for h in hs:
        sol = first_passage_dp("Z", h)
        vals.append(max(float(sol.mean_stop[k]) - (h - k) for k in range(h)))
    return _scan_report("tau_mean", "exact-dp", hs, [max(v, 0.0) for v in vals],
                        lambda h: h ** 0.5, {}, "h^(1/2)", "E(tau_h | Z0=k) - (h-k), max over k")


def tau_second_moment_audit(hs=H_SCAN) -> AuditReport:
    vals = [float(first_passage_dp("Z", h).second_moment_stop.max()) for h in hs]
    return _scan_report("tau_second_moment", "exact-dp", hs, vals, lambda h: h * h, {}, "h^2")


# --------------------------------------------------------------------------
# overshoot


def _overshoot_lhs(sol, kind: str, h: int, us: np.ndarray) -> np.ndarray:
    kern = "pi" if kind == "Y" else "rho"
    tails = np.array([tail_float(kern, l, us) for l in range(h)])  # [l, u]
    G = np.asarray(sol.green, dtype=float)
    joint = G @ tails
    cp = np.asarray(sol.cross_prob, dtype=float)[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(cp > 0, joint / cp, np.nan)


def overshoot_ratio_bound(kind: str, h: int, us) -> np.ndarray:
    kern = "pi" if kind == "Y" else "rho"
    return np.asarray(tail_float(kern, h, us)) / float(tail_float(kern, h, h))


def overshoot_audit(h_max: int = 30, u_extra: int = 100, slack: float = 1e-12,
                    exact_h: int = 6) -> AuditReport:
    """Conditional overshoot tails against the one-step kernel tail ratio
    for every h <= h_max, start below h and u <= h + u_extra.  Y starts at
    0 are skipped (the conditioning event is null)."""
    from ..branching import tail_exact

    points, bad, worst = [], 0, math.inf
    for kind in ("Y", "Z"):
        for h in range(1, h_max + 1):
            us = np.arange(h, h + u_extra + 1)
            sol = first_passage_dp(kind, h)
            lhs = _overshoot_lhs(sol, kind, h, us)
            rhs = overshoot_ratio_bound(kind, h, us)
            ks = range(1, h) if kind == "Y" else range(h)
            for k in ks:
                gap = rhs - lhs[k]
                m = float(gap.min())
                worst = min(worst, m)
                if m < -slack:
                    bad += 1
                    points.append(AuditPoint({"chain": kind, "h": h, "k": k,
                                              "u": int(us[int(gap.argmin())])}, float(lhs[k][gap.argmin()]), m, False))
    # exact rational cross-check on small levels
    exact_bad = 0
    for kind in ("Y", "Z"):
        kern = "pi" if kind == "Y" else "rho"
        for h in range(1, exact_h + 1):
            sol = first_passage_dp(kind, h, exact=True)
            for k in (range(1, h) if kind == "Y" else range(h)):
                for u in range(h, h + 12):
                    lhs = sum((sol.green[k][l] * tail_exact(kern, l, u) for l in range(h)),
                              Fraction(0)) / sol.cross_prob[k]
                    if lhs > tail_exact(kern, h, u) / tail_exact(kern, h, h):
                        exact_bad += 1
    points.append(AuditPoint({"check": f"exact rationals, h <= {exact_h}"}, float(exact_bad),
                             None, exact_bad == 0))
    total = bad + exact_bad
    return AuditReport("overshoot", "exact-dp",
                       {"h_max": h_max, "u_extra": u_extra, "numerical_slack": slack},
                       statistic=float(total), slack=worst, verdict=_verdict(total == 0),
                       points=points, counts={"violations": total},
                       notes="slack = smallest (bound - value) over the scan")


def overshoot_moments_audit(h_fit: int = 100, h_scan: int = 10**4, h_dp: int = 30,
                            dps: int = 50) -> AuditReport:
    """Conditional moments against the kernel ratios by DP, then the fitted
    constant C* of each ratio's excess over h <= h_fit (exact) checked along
    a high-precision scan to h_scan."""
    import mpmath

    from ..exact_oracle import overshoot_excess, overshoot_ratio

    points = []
    dp_bad = 0
    for kind, kern in (("Y", "pi"), ("Z", "rho")):
        for h in range(1, h_dp + 1):
            sol = first_passage_dp(kind, h)
            r1 = float(overshoot_ratio(kern, h, 1, exact=False))
            r2 = float(overshoot_ratio(kern, h, 2, exact=False))
            for k in (range(1, h) if kind == "Y" else range(h)):
                cp = float(sol.cross_prob[k])
                m1 = float(sol.cross_mean[k]) / cp
                m2 = float(sol.cross_second[k]) / cp
                if m1 > r1 * (1 + 1e-12) or m2 > r2 * (1 + 1e-12):
                    dp_bad += 1
    points.append(AuditPoint({"check": f"DP moments <= ratios, h <= {h_dp}"}, float(dp_bad),
                             None, dp_bad == 0))
    fitted = {}
    ok = dp_bad == 0
    tol = mpmath.mpf(10) ** (-(dps - 20))
    with mpmath.workdps(dps):
        for kern in ("pi", "rho"):
            for order in (1, 2):
                sq = [overshoot_excess(kern, h, order) for h in range(1, h_fit + 1)]
                best = max(sq)
                arg = sq.index(best) + 1
                c_star = (mpmath.sqrt(mpmath.mpf(best.numerator) / best.denominator)
                          if best >= 0 else -mpmath.sqrt(mpmath.mpf(-best.numerator) / best.denominator))
                worst, worst_h, first_h = None, None, None
                for h in range(1, h_scan + 1):
                    e = overshoot_excess(kern, h, order, exact=False, dps=dps)
                    if worst is None or e > worst:
                        worst, worst_h = e, h
                    if first_h is None and e > c_star + tol:
                        first_h = h
                good = first_h is None
                ok = ok and good
                label = f"{kern}_order{order}"
                fitted[label] = {"C_star": float(c_star), "C_star_at_h": arg,
                                 "scan_max": float(worst), "scan_max_at_h": worst_h,
                                 "first_exceeding_h": first_h}
                points.append(AuditPoint({"ratio": label, "h_fit": h_fit, "h_scan": h_scan},
                                         float(worst), float(c_star - worst), good))
    return AuditReport("overshoot_moments", "exact",
                       {"h_fit": h_fit, "h_scan": h_scan, "h_dp": h_dp, "dps": dps},
                       statistic=max(v["scan_max"] - v["C_star"] for v in fitted.values()),
                       fitted=fitted, verdict=_verdict(ok), points=points,
                       notes="excess is (ratio - h)/h^(1/2) for first moments and "
                             "(ratio - h^2)/h^(3/2) for second moments")


def ratio_monotonicity_audit(i_max: int = 200, j_max: int = 500, l_max: int = 200,
                             v_max: int = 500, u_max: int = 500) -> AuditReport:
    from ..exact_oracle import ratio_monotonicity_check

    rep = ratio_monotonicity_check(i_max, j_max, l_max, v_max, u_max)
    return AuditReport(
        "ratio_monotonicity", "exact", dict(rep.ranges),
        statistic=float(rep.total_violations), slack=-float(rep.total_violations),
        verdict=_verdict(rep.ok()),
        points=[AuditPoint({"check": name}, float(len(rep.violations.get(name, []))), None,
                           not rep.violations.get(name))
                for name in rep.checked],
        counts={"checked": dict(rep.checked), "equality_cases": dict(rep.equality_cases)})


BOUND_AUDITS = {
    "max_jump": max_jump_audit,
    "hit_exactly": hit_exactly_audit,
    "no_hit_band": no_hit_band_audit,
    "tilde_tau_mean": tilde_tau_mean_audit,
    "offband_tail": offband_tail_audit,
    "stop_time_mean": stop_time_mean_audit,
    "kolmogorov": kolmogorov_audit,
    "hit_ratio": hit_ratio_audit,
    "no_cross": no_cross_audit,
    "tau_mean": tau_mean_audit,
    "tau_second_moment": tau_second_moment_audit,
    "overshoot": overshoot_audit,
    "overshoot_moments": overshoot_moments_audit,
    "ratio_monotonicity": ratio_monotonicity_audit,
}


def bound_audit(audit_id: str, **params) -> AuditReport:
    if audit_id not in BOUND_AUDITS:
        raise KeyError(f"unknown audit {audit_id!r}; known: {sorted(BOUND_AUDITS)}")
    return BOUND_AUDITS[audit_id](**params)


# --------------------------------------------------------------------------
# martingales


def _mc_mean_check(values, target, upper_only=False):
    m, se = mean_se(values)
    if upper_only:
        return m, se, m <= target + Z_AGREE * se
    return m, se, abs(m - target) <= Z_AGREE * se


def martingale_audit(which: str, n_samples: int = 10**5, seed: int = 0, workers: int = 1,
                     k: int = 5, h: int = 10, cap: int = 10**7) -> AuditReport:
    """``Y-mean``, ``Y-quadratic``, ``Z-drift`` or ``Z-super``: exact DP or
    kernel identities, plus a Monte Carlo check."""
    points = []
    counts = {}
    if which in ("Y-mean", "Y-quadratic"):
        sol = first_passage_dp("Y", h, exact=True)
        rows = _runs(_CHAIN + "race_batch", seed, n_samples, (0, k, h, cap), workers, 3 << 33)
        cens = float((rows[:, 0] == OUTCOME_CENSORED).mean())
        counts["outcomes"] = np.bincount(rows[:, 0], minlength=3).tolist()
        if which == "Y-mean":
            exact_ok = sol.cross_mean[k] == k
            points.append(AuditPoint({"check": "E[Y_stop] DP", "k": k, "h": h},
                                     float(sol.cross_mean[k]), 0.0, exact_ok))
            m, se, mc_ok = _mc_mean_check(rows[:, 2], k)
        else:
            val = sol.cross_second[k] - 2 * sol.path_sum[k]
            exact_ok = val == k * k
            one = kernel_row("pi", 1)
            second = sum((j * j * p for j, p in enumerate(one.probs)), Fraction(0))
            # tail part of E[Y_1^2 | Y_0=1] from the closed form
            from ..branching import partial_moment_exact
            second += partial_moment_exact("pi", 1, one.truncation + 1, 2)
            step_ok = second - 2 == 1
            points.append(AuditPoint({"check": "E[Y^2 - 2 sum Y] DP", "k": k, "h": h},
                                     float(val), 0.0, exact_ok))
            points.append(AuditPoint({"check": "one step from 1"}, float(second - 2), 0.0, step_ok))
            exact_ok = exact_ok and step_ok
            m, se, mc_ok = _mc_mean_check(rows[:, 2] ** 2 - 2 * rows[:, 4], k * k)
        points.append(AuditPoint({"check": "Monte Carlo", "k": k, "h": h}, m, se, mc_ok))
        ok = exact_ok and mc_ok and cens == 0
    elif which == "Z-drift":
        drift_bad = sum(kernel_row("rho", i).mean() != i + 1 for i in range(65))
        sol = first_passage_dp("Z", h, exact=True)
        dp_ok = sol.cross_mean[k] - sol.mean_stop[k] == k
        rows = _runs(_CHAIN + "fixed_horizon_batch", seed, n_samples, (1, 0, 100), workers, 4 << 33)
        m, se, mc_ok = _mc_mean_check(rows[:, 0] - 100, 0)
        counts["z100_sum"] = int(rows[:, 0].sum())
        cens = 0.0
        points += [AuditPoint({"check": "rho row means, i <= 64"}, float(drift_bad), None, drift_bad == 0),
                   AuditPoint({"check": "E[Z_tau - tau] DP", "k": k, "h": h},
                              float(sol.cross_mean[k] - sol.mean_stop[k]), 0.0, dp_ok),
                   AuditPoint({"check": "E[Z_100 - 100] MC"}, m, se, mc_ok)]
        ok = drift_bad == 0 and dp_ok and mc_ok
    elif which == "Z-super":
        drift_bad = 0
        for z in range(65):
            mean = kernel_row("rho", z).mean()
            for t in range(0, 51):
                step = (t + 1) ** 2 - 2 * (t + 1) * mean - (t * t - 2 * t * z)
                drift_bad += step != -1 - 2 * z or step > 0
        sol = first_passage_dp("Z", h, exact=True)
        dp_vals = [sol.second_moment_stop[j] - 2 * sol.stop_times_cross[j] for j in range(h)]
        dp_ok = all(v <= 0 for v in dp_vals)
        rows = _runs(_CHAIN + "race_batch", seed, n_samples, (1, k, h, cap), workers, 5 << 33)
        cens = float((rows[:, 0] == OUTCOME_CENSORED).mean())
        tau = rows[:, 1]
        m, se, mc_ok = _mc_mean_check(tau * tau - 2 * tau * rows[:, 2], 0, upper_only=True)
        counts["tau"] = np.bincount(tau).tolist()
        points += [AuditPoint({"check": "exact one-step drift -1-2z"}, float(drift_bad), None, drift_bad == 0),
                   AuditPoint({"check": "E[tau^2 - 2 tau Z_tau] <= 0 DP", "h": h},
                              float(max(dp_vals)), float(-max(dp_vals)), dp_ok),
                   AuditPoint({"check": "Monte Carlo", "k": k, "h": h}, m, se, mc_ok)]
        ok = drift_bad == 0 and dp_ok and mc_ok and cens == 0
    else:
        raise ValueError(f"unknown martingale {which!r}")
    return AuditReport(f"martingale_{which}", "exact-dp", {"k": k, "h": h, "seed": seed},
                       statistic=points[-1].statistic, verdict=_verdict(ok),
                       n_samples=n_samples, standard_error=points[-1].p_or_slack,
                       censored_mass=cens, points=points, counts=counts)


MARTINGALES = ("Y-mean", "Y-quadratic", "Z-drift", "Z-super")


# --------------------------------------------------------------------------
# multi-hit recursion


def multi_hit_audit(hs=(16, 32, 64), eps: float = 0.25, p_max: int = 3,
                       exponent_a=(-0.75, -0.25), exponent_b=(0.25, 0.75),
                       mc_h: int = 16, mc_k: int = 8, n_samples: int = 10**5, seed: int = 0,
                       workers: int = 1, cap: int = 10**7) -> AuditReport:
    """Layered hit quantities by DP: Q_A(h, p) = sup over the band of
    P(A_{h,p} | Y0=k), Q_B(h, p) likewise for the horizon sums of B.
    Decay in p, exponents of the p = 0 band quantities, and a Monte Carlo
    check of both at (mc_h, mc_k).  Reported as a diagnostic."""
    qa, qb, qb_all = {}, {}, {}
    for h in hs:
        ly = tilde_passage_dp("Y", h).layered(p_max)
        lz = tilde_passage_dp("Z", h).layered(p_max)
        b = fits.band(h, eps)
        qa[h] = [float(max(ly[p, k] for k in b)) for p in range(p_max + 1)]
        qb[h] = [float(max(lz[p, k] for k in b)) for p in range(p_max + 1)]
        qb_all[h] = [float(lz[p].max()) for p in range(p_max + 1)]
    decay = all(all(q[p + 1] < q[p] for p in range(p_max)) for q in list(qa.values()) + list(qb.values()))
    ea = fits.loglog_exponent(hs, [qa[h][0] for h in hs])
    eb = fits.loglog_exponent(hs, [qb[h][0] for h in hs])
    in_a = exponent_a[0] <= ea <= exponent_a[1]
    in_b = exponent_b[0] <= eb <= exponent_b[1]
    # Monte Carlo cross-check
    ly = tilde_passage_dp("Y", mc_h).layered(p_max)
    lz = tilde_passage_dp("Z", mc_h).layered(p_max)
    ry = _runs(_CHAIN + "tilde_y_batch", seed, n_samples, (mc_k, mc_h, p_max, cap), workers, 6 << 33)
    rz = _runs(_CHAIN + "tilde_z_batch", seed, n_samples, (mc_k, mc_h, p_max, cap), workers, 7 << 33)
    mc_points, mc_ok = [], True
    for p in range(p_max + 1):
        est = float((ry == p).mean())
        se = max(proportion_se(float(ly[p, mc_k]), n_samples), 1.0 / n_samples)
        good = abs(est - ly[p, mc_k]) <= Z_AGREE * se
        mc_ok &= good
        mc_points.append(AuditPoint({"quantity": "A", "p": p, "h": mc_h, "k": mc_k}, est,
                                    float(ly[p, mc_k]), good))
        m, se = mean_se(rz[:, p])
        good = abs(m - lz[p, mc_k]) <= Z_AGREE * max(se, 1.0 / n_samples)
        mc_ok &= good
        mc_points.append(AuditPoint({"quantity": "B", "p": p, "h": mc_h, "k": mc_k}, m,
                                    float(lz[p, mc_k]), good))
    cens = float(((ry == -2).sum() + rz[:, -1].sum()) / (2 * n_samples))
    ok = decay and in_a and in_b and mc_ok
    return AuditReport(
        "multi_hit", "exact-dp",
        {"hs": list(hs), "eps": eps, "p_max": p_max, "band": "|h-2k| <= h^(1/2+eps)",
         "exponent_a": list(exponent_a), "exponent_b": list(exponent_b)},
        statistic=ea,
        fitted={"Q_A": {str(h): v for h, v in qa.items()}, "Q_B": {str(h): v for h, v in qb.items()},
                "Q_B_all_k_over_h": {str(h): [x / h for x in v] for h, v in qb_all.items()},
                "exponent_A_p0": ea, "exponent_B_p0": eb,
                "decay_in_p": decay, "exponent_A_in_band": in_a, "exponent_B_in_band": in_b,
                "monte_carlo_agrees": mc_ok},
        verdict="diagnostic" if ok else "fail", hard=False, n_samples=n_samples,
        censored_mass=cens, points=mc_points,
        counts={"tilde_y": np.bincount(ry + 2).tolist(), "tilde_z_sums": rz.sum(axis=0).tolist()})


# --------------------------------------------------------------------------
# long-run f(4) diagnostic


def f4_longrun_report(n_walks: int = 100, n_steps: int = 10**7, seed: int = 0,
                      workers: int = 1, j_min: int = 20, z: float = 3.0,
                      r_max: int = 6) -> AuditReport:
    """Per dyadic window [2^j, 2^(j+1)): mean f(3) and f(4) event counts and
    the fraction of walks with at least one f(4) event.  Soft check: beyond
    ``j_min`` the fraction never rises significantly between complete
    windows (Wilson intervals at ``z``)."""
    parts = parallel.run_replicas(_WALK + "longrun_batch", seed, n_walks, (n_steps, r_max),
                                  workers, block=1)
    c = np.concatenate(parts)  # (walks, windows, r)
    n_win = c.shape[1]
    complete = [j for j in range(n_win) if (1 << (j + 1)) - 1 <= n_steps]
    points = []
    frac = {}
    for j in range(n_win):
        hits = int((c[:, j, 3] > 0).sum())
        lo, hi = wilson_interval(hits, n_walks, z)
        frac[j] = (hits, lo, hi)
        points.append(AuditPoint(
            {"window": j, "complete": j in complete,
             "mean_f3": float(c[:, j, 2].mean()), "mean_f4": float(c[:, j, 3].mean())},
            hits / n_walks, None, None))
    viol = [j for j in complete if j >= j_min and j + 1 in complete
            and frac[j + 1][1] > frac[j][2]]
    for pt in points:
        j = pt.params["window"]
        if j >= j_min and j in complete:
            pt.passed = j not in viol
    f2_ok = bool(np.all(c[:, :, 1].sum(axis=1) >= 1)) if n_steps >= 2 else True
    ok = not viol and f2_ok
    return AuditReport(
        "f4_longrun", "monte-carlo",
        {"n_walks": n_walks, "n_steps": n_steps, "seed": seed, "j_min": j_min, "z": z},
        statistic=float(len(viol)), verdict="diagnostic" if ok else "fail", hard=False,
        n_samples=n_walks, points=points,
        counts={"f_by_window": c.sum(axis=0).tolist(),
                "walks_with_f4": [frac[j][0] for j in range(n_win)]},
        fitted={"rising_windows": viol, "every_walk_has_f2": f2_ok},
        notes="last window excluded when incomplete")


# --------------------------------------------------------------------------
# registry used by the command line


def all_bound_ids() -> list[str]:
    return list(BOUND_AUDITS)
