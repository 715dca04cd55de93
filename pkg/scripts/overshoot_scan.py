"""Excess of the conditional kernel moments over their leading term, by h.

Prints the four excess sequences at a few levels and, for the first-moment
pi ratio, the closed form 2 sqrt(h) C(2h, h) / 4^h next to the oracle value.
"""
import argparse
import math

import mpmath

from favsites.exact_oracle import overshoot_excess


def central(h: int) -> mpmath.mpf:
    return 2 * mpmath.sqrt(h) * mpmath.binomial(2 * h, h) / mpmath.mpf(4) ** h


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, nargs="*", default=[1, 2, 5, 10, 30, 100, 101, 300, 1000, 3000, 10000])
    ap.add_argument("--dps", type=int, default=50)
    a = ap.parse_args()
    labels = [(k, o) for k in ("pi", "rho") for o in (1, 2)]
    print("h".rjust(6) + "".join(f"{k}_order{o}".rjust(16) for k, o in labels) + "closed form".rjust(16))
    with mpmath.workdps(a.dps):
        for h in a.levels:
            row = [float(overshoot_excess(k, h, o, exact=False, dps=a.dps)) for k, o in labels]
            print(f"{h:6d}" + "".join(f"{v:16.10f}" for v in row) + f"{float(central(h)):16.10f}")
    print(f"limit 2/sqrt(pi) = {2 / math.sqrt(math.pi):.10f}")


if __name__ == "__main__":
    main()
