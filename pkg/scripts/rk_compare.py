"""Walk route against profile route for the favourite-tie events.

For each (x, k, r), with k the walk upcrossing count (k >= 1), prints both estimates, their standard errors and the
z-score of the difference.
"""
import argparse
import itertools
import math

from favsites.rayknight import estimate_favourite_event_probability


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10**5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--xs", type=int, nargs="*", default=[1, 2, 3])
    ap.add_argument("--ks", type=int, nargs="*", default=[1, 2, 3])
    ap.add_argument("--rs", type=int, nargs="*", default=[1, 2, 3])
    a = ap.parse_args()
    print(f"{'x':>3}{'k':>3}{'r':>3}{'walk':>12}{'rk':>12}{'z':>8}")
    for x, k, r in itertools.product(a.xs, a.ks, a.rs):
        w = estimate_favourite_event_probability(x, k, r, "walk", a.n, seed=a.seed)
        p = estimate_favourite_event_probability(x, k, r, "rk", a.n, seed=a.seed)
        se = math.hypot(w.standard_error, p.standard_error)
        z = (w.estimate - p.estimate) / se if se > 0 else 0.0
        print(f"{x:3d}{k:3d}{r:3d}{w.estimate:12.5f}{p.estimate:12.5f}{z:8.2f}")


if __name__ == "__main__":
    main()
