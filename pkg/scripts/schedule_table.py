"""Radius schedule with the reference constants in log space.

Prints r_limit next to r0 minus the integral bound for several starting
log eps0, then evaluates the weight-compatibility integral for a
logarithmic weight, which diverges.
"""
import argparse

import numpy as np

from kamcocycle.weights import (PAPER_DELTA, PAPER_ZETA, ApproxSpec, WeightSpec, brjuno_russmann_integral,
                                build_schedule)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--log-eps0", default="-3e4,-1e5,-3e5,-1e6", help="comma separated natural logs")
    ap.add_argument("--r0", type=float, default=1.0)
    args = ap.parse_args()

    lam, psi = WeightSpec.analytic(), ApproxSpec.power(2)
    print(f"{'log eps0':>10} {'r_limit':>10} {'r0-bound':>10} {'rel gap':>8}")
    for le in (float(x) for x in args.log_eps0.split(",")):
        s = build_schedule(args.r0, le, lam, psi, PAPER_DELTA, PAPER_ZETA)
        ref = args.r0 - s.bound
        gap = abs(s.r_limit - ref) / abs(s.r_limit) if s.r_limit > 0 else float("nan")
        print(f"{le:>10.3g} {s.r_limit:>10.6g} {ref:>10.6g} {gap:>8.3f}")
    t = np.geomspace(1.0, 1e300, 2000)
    div = brjuno_russmann_integral(WeightSpec.tabulated(t, np.log1p(t)), psi, 2.0)
    print(f"integral for Lambda = ln(1+t), Psi = t^2: {div}")


if __name__ == "__main__":
    main()
