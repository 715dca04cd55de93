"""Long-run f(4) diagnostic with a per-window table.

    python scripts/f4_longrun.py --walks 100 --steps 10000000 --workers 4
"""
import argparse
import json

from favsites.verify.audits import f4_longrun_report


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--walks", type=int, default=100)
    ap.add_argument("--steps", type=int, default=10**7)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--json", help="also write the report here")
    a = ap.parse_args()
    rep = f4_longrun_report(a.walks, a.steps, seed=a.seed, workers=a.workers)
    print(f"{'j':>3}{'frac f4':>10}{'mean f3':>10}{'mean f4':>10}  check")
    for pt in rep.points:
        mark = {None: "", True: "ok", False: "RISES"}[pt.passed]
        tail = "" if pt.params["complete"] else " (incomplete)"
        print(f"{pt.params['window']:3d}{pt.statistic:10.3f}{pt.params['mean_f3']:10.3f}"
              f"{pt.params['mean_f4']:10.3f}  {mark}{tail}")
    print(f"verdict: {rep.verdict}; every walk has f(2) events: {rep.fitted['every_walk_has_f2']}")
    if a.json:
        with open(a.json, "w") as fh:
            json.dump(rep.to_dict(), fh, indent=2)


if __name__ == "__main__":
    main()
