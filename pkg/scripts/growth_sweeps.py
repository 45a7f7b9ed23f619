#!/usr/bin/env python3
"""Growth exponents of the arithmetic quantities: Ramanujan moments, the lcm moment, Psi_2.

Prints one table per quantity and the fitted log-log slope.
"""
import argparse
import json

from lacsphere.arith import lcm_moment, ramanujan_moment
from lacsphere.multiplier import psi2_statistic
from lacsphere.report import fit_loglog


def moment_sweep(Qs, j):
    vals = [ramanujan_moment(Q, j, 2 * Q * Q).value for Q in Qs]
    return vals, fit_loglog(Qs, vals).slope


def lcm_sweep(Qs, j):
    reps = [lcm_moment(Q, j) for Q in Qs]
    return [r.value for r in reps], [r.extra["divisor_bound"] for r in reps], fit_loglog(Qs, [r.value for r in reps]).slope


def psi2_sweep(Ns, j, d, power):
    vals = [psi2_statistic(N ** (2 * power), N, j, d).value for N in Ns]
    return vals, fit_loglog(Ns, vals).slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--moment-Q", type=int, nargs="+", default=[4, 8, 16, 32, 64, 128])
    ap.add_argument("--lcm-Q", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    ap.add_argument("--psi2-N", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--j", type=int, default=2, help="moment order for the Ramanujan and lcm sweeps")
    ap.add_argument("--psi2-j", type=int, default=4)
    ap.add_argument("--lambda-power", type=int, default=3, help="lambda = N^power in the Psi_2 sweep")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    mv, ms = moment_sweep(args.moment_Q, args.j)
    lv, lb, ls = lcm_sweep(args.lcm_Q, args.j)
    pv, ps = psi2_sweep(args.psi2_N, args.psi2_j, 5, args.lambda_power)
    if args.json:
        out = {
            "moment": {"Q": args.moment_Q, "values": mv, "slope": ms},
            "lcm": {"Q": args.lcm_Q, "values": lv, "bounds": lb, "slope": ls},
            "psi2": {"N": args.psi2_N, "values": pv, "slope": ps},
        }
        print(json.dumps(out, indent=2))
        return
    print(f"Ramanujan moment, j={args.j}, M=2Q^2")
    for Q, v in zip(args.moment_Q, mv):
        print(f"  Q={Q:4d}  {v:12.4f}")
    print(f"  slope {ms:.4f}")
    print(f"lcm moment, j={args.j}")
    for Q, v, b in zip(args.lcm_Q, lv, lb):
        print(f"  Q={Q:4d}  {v:12.4f}  divisor bound {b:12.2f}")
    print(f"  slope {ls:.4f}")
    print(f"Psi_2, j={args.psi2_j}, d=5, lambda=N^{args.lambda_power}")
    for N, v in zip(args.psi2_N, pv):
        print(f"  N={N:4d}  {v:12.4f}")
    print(f"  slope {ps:.4f}")


if __name__ == "__main__":
    main()
