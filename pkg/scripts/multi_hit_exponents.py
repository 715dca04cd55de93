"""Log-log exponents of the p = 0 band quantities over several fit windows.

The audit fits h in {16, 32, 64}; this shows how the exponents move when
the window is pushed to larger h.
"""
import argparse

from favsites.branching import tilde_passage_dp
from favsites.verify import fits


def band_sup(kind: str, h: int, eps: float) -> float:
    lay = tilde_passage_dp(kind, h).layered(0)
    return float(max(lay[0, k] for k in fits.band(h, eps)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--eps", type=float, default=0.25)
    ap.add_argument("--hs", type=int, nargs="*", default=[16, 32, 64, 128, 256, 512])
    a = ap.parse_args()
    qa = {h: band_sup("Y", h, a.eps) for h in a.hs}
    qb = {h: band_sup("Z", h, a.eps) for h in a.hs}
    for h in a.hs:
        print(f"h={h:5d}  Q_A={qa[h]:.6g}  Q_B={qb[h]:.6g}")
    for lo in range(len(a.hs) - 2):
        win = a.hs[lo:]
        ea = fits.loglog_exponent(win, [qa[h] for h in win])
        eb = fits.loglog_exponent(win, [qb[h] for h in win])
        print(f"window {win[0]}..{win[-1]}: exponent A {ea:+.4f}, exponent B {eb:+.4f}")


if __name__ == "__main__":
    main()
