#!/usr/bin/env python3
"""Shape of the mollified sphere kernel K: mass, negative lobes, peak flatness."""
import argparse

from lacsphere.multiplier import flatness_beta, k_kernel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--lambda-power", type=int, default=3)
    ap.add_argument("--d", type=int, default=5)
    args = ap.parse_args()
    beta = flatness_beta(args.d)
    print(f"{'N':>3} {'lambda^2':>9} {'mass':>8} {'neg mass':>9} {'band(3w)':>9} {'peak*lam^d/N^beta':>18}")
    for N in args.N:
        ls = N ** (2 * args.lambda_power)
        k = k_kernel(ls, N, args.d)
        lam = ls**0.5
        print(f"{N:3d} {ls:9d} {k.mass():8.4f} {k.negative_mass():9.4f} {k.band_mass(3):9.4f} {k.peak() * lam**args.d / N**beta:18.4f}")


if __name__ == "__main__":
    main()
