#!/usr/bin/env python3
"""Monte-Carlo restricted-type ratios for the lacunary maximal function on random sets.

The reported maximum is an empirical lower bound, not a norm.
"""
import argparse
import json

from lacsphere.lattice import lacunary_sequence
from lacsphere.operators import pairing_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--M", type=int, default=16)
    ap.add_argument("--p", type=float, default=1.5)
    ap.add_argument("--start", type=int, default=1)
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--density", type=float, nargs="+", default=[0.01, 0.05, 0.125, 0.5])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    seq = lacunary_sequence(args.start, args.count)
    out = []
    for rho in args.density:
        rep = pairing_study(args.d, args.M, seq, args.p, rho, args.trials, args.seed)
        out.append({"density": rho, "max": rep.value, "mean": rep.extra["mean"], "std": rep.extra["std"]})
    print(json.dumps({"lambda_sq": list(seq.lambda_sq), "p": args.p, "rows": out}, indent=2))


if __name__ == "__main__":
    main()
