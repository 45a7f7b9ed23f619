#!/usr/bin/env python3
"""l2 norm of A_lambda - C_lambda over a range of radii and grid sizes (d=5)."""
import argparse

from lacsphere.operators import error_operator_norm
from lacsphere.report import fit_loglog


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda-sq", type=int, nargs="+", default=[4, 9, 16, 25, 36, 64])
    ap.add_argument("--M", type=int, nargs="+", default=[16, 32])
    ap.add_argument("--d", type=int, default=5)
    args = ap.parse_args()
    for M in args.M:
        rows = []
        for ls in args.lambda_sq:
            if ls > (M // 2) ** 2:
                continue
            rep = error_operator_norm(ls, None, args.d, M)
            rows.append((ls, rep.value, rep.extra["argmax_xi"]))
            print(f"M={M:3d} lambda^2={ls:4d}  ||A-C|| = {rep.value:.5f}  at xi = {rep.extra['argmax_xi']}")
        if len(rows) >= 2:
            fit = fit_loglog([r[0] ** 0.5 for r in rows], [r[1] for r in rows])
            print(f"M={M:3d} slope in lambda {fit.slope:.3f} (reference exponent {(4 - args.d) / 2})")


if __name__ == "__main__":
    main()
