"""Lyapunov exponent and rotation number of the Schrodinger cocycle over an energy grid."""
import argparse
import csv
import math
import sys

import numpy as np

from kamcocycle.lab import lyapunov, rotation_number, schrodinger

GOLDEN = (math.sqrt(5) - 1) / 2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--E-min", type=float, default=-1.0)
    ap.add_argument("--E-max", type=float, default=4.0)
    ap.add_argument("--n", type=int, default=11)
    ap.add_argument("--T", type=float, default=100.0)
    ap.add_argument("--samples", type=int, default=4)
    ap.add_argument("--csv", help="write E, lyapunov, stderr, rotation here instead of stdout")
    args = ap.parse_args()

    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    w = csv.writer(out)
    w.writerow(["E", "lyapunov", "stderr", "rotation"])
    for E in np.linspace(args.E_min, args.E_max, args.n):
        sysm = schrodinger(float(E), [GOLDEN], lam=args.lam)
        ly = lyapunov(sysm, args.T, args.samples)
        rho = rotation_number(sysm, args.T, n_samples=args.samples)
        w.writerow([f"{E:.6g}", f"{ly.mean:.6g}", f"{ly.stderr:.2g}", f"{rho:.6g}"])
    if args.csv:
        out.close()


if __name__ == "__main__":
    main()
