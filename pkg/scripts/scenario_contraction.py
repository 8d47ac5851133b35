"""Run the contraction scenario and print one line per complete step.

Golden frequency, analytic weight, Psi = t^2, rotation generator with
alpha = 0.4 and a single cosine mode scaled to |F0|_r0 = amplitude.
"""
import argparse
import math

import numpy as np

from kamcocycle.fourier import MatrixSeries, weighted_norm
from kamcocycle.kam import StepConfig, almost_reduce
from kamcocycle.lab import CocycleSystem, verify_conjugation
from kamcocycle.sl2 import rotation_generator

GOLDEN = (math.sqrt(5) - 1) / 2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=0.4)
    ap.add_argument("--amplitude", type=float, default=1e-4)
    ap.add_argument("--r0", type=float, default=0.5)
    ap.add_argument("--max-steps", type=int, default=4)
    ap.add_argument("--trace", help="write the JSONL trace here")
    args = ap.parse_args()

    cfg = StepConfig(max_steps=args.max_steps)
    A = rotation_generator(args.alpha)
    F0 = MatrixSeries.cosine(np.array([[0.3, 1.0], [0.5, -0.3]]), [1])
    F0 = F0 * (args.amplitude / weighted_norm(F0, cfg.lam, args.r0))
    om = [GOLDEN]
    tr = almost_reduce(A, F0, args.r0, om, cfg)
    print(f"{'k':>2} {'log10 eps':>10} {'exponent':>8} {'r':>8} {'branch':>12} {'residual':>9}")
    for s in tr.steps:
        print(f"{s.k:>2} {s.log_eps_after / math.log(10):>10.2f} {s.log_eps_after / s.log_eps_before:>8.2f} "
              f"{s.r_after:>8.4f} {s.branch:>12} {s.residual:>9.1e}")
    st = tr.state
    grid = verify_conjugation(st.W, CocycleSystem(A, F0, om), CocycleSystem(st.A, st.G, om), 256)
    print(f"outcome {tr.outcome}, |Z - Id| {tr.Z_dev:.2e} (bound {tr.Z_dev_bound:.2e}), grid residual {grid:.1e}")
    if args.trace:
        tr.write_jsonl(args.trace)


if __name__ == "__main__":
    main()
