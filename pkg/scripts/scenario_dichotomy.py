"""Sweep Schrodinger energies across a resonance and report the dichotomy outcome.

For each E the reduction records whether a renormalization happened and
compares ||A|| after it with kappa''.
"""
import argparse
import math

import numpy as np

from kamcocycle.fourier import MatrixSeries
from kamcocycle.kam import ReductionAborted, StepConfig, almost_reduce

GOLDEN = (math.sqrt(5) - 1) / 2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=1e-4, help="potential is 2 lam cos(2 pi theta)")
    ap.add_argument("--offsets", default="-0.1,-0.05,0.05,0.1,0.3",
                    help="sqrt(E) = pi omega + offset for each entry")
    ap.add_argument("--r0", type=float, default=0.5)
    args = ap.parse_args()

    cfg = StepConfig()
    F = MatrixSeries.cosine(np.array([[0.0, 0.0], [2 * args.lam, 0.0]]), [1])
    print(f"{'E':>9} {'steps':>5} {'resonant':>8} {'||A|| after':>11} {'kappa2':>9} outcome")
    for off in (float(x) for x in args.offsets.split(",")):
        E = (math.pi * GOLDEN + off) ** 2
        A = np.array([[0.0, 1.0], [-E, 0.0]])
        try:
            tr = almost_reduce(A, F, args.r0, [GOLDEN], cfg)
        except ReductionAborted as exc:
            print(f"{E:>9.5f} aborted: {exc}")
            continue
        res = [s for s in tr.steps if s.resonant]
        na = f"{res[0].norm_A_after:.4g}" if res else "-"
        k2 = f"{math.exp(res[0].log_kappa2):.4g}" if res else "-"
        print(f"{E:>9.5f} {len(tr.steps):>5} {len(res):>8} {na:>11} {k2:>9} {tr.outcome}")


if __name__ == "__main__":
    main()
