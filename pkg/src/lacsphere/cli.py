"""Command-line experiment runner.

Every subcommand prints (or writes with --out) a JSON report::

    {"schema_version": 1, "command": ..., "config": {...}, "status": "ok",
     "result": {...}, "oracles": [...]}

Reports are byte-deterministic for a fixed config and seed; wall time goes to
a sidecar ``<out>.timing.json`` (or stderr with --timing).

Exit codes: 0 ok, 1 failed verification, 2 validation, 3 budget,
4 numerical integrity. Errors are reported as a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import arith, bump, gauss, gridio, lattice, multiplier, operators
from .config import WORK_ENV
from .errors import DomainError, LacSphereError
from .report import MomentReport, _jsonable, fit_loglog

SCHEMA_VERSION = 1

SWEEP_HELP = """\
Sweep targets (x is the swept value, y the measured quantity):
  synthetic        y = x^exponent (fixed: exponent=3)
  counts           x = lambda = sqrt(value), y = r_d(value)     (fixed: d=5)
  ramanujan-moment x = Q, y = moment with M = 2Q^2               (fixed: j=2)
  lcm-moment       x = Q, y = exact lcm moment                   (fixed: j=2)
  error-norm       x = lambda = sqrt(value), y = |A - C| norm    (fixed: d=5, M=32)
  psi2             x = N, y = Psi_2 at lambda = N^lambda_power   (fixed: j=4, d=5, lambda_power=3)
  u-l1             x = Q, y = l1 norm of the U kernel            (fixed: d=5)

CSV columns: index, value, x, y, followed by extra_* columns from the
per-point report (scalars only). The fit is ordinary least squares of
log y on log x.
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would print usage and exit 2
        raise DomainError(message)


# --------------------------------------------------------------------------
# Handlers: each returns (result dict, list of oracle names that ran)


def _report(rep: MomentReport) -> dict:
    return rep.to_dict()


def h_arith(a):
    b = arith.arithmetic_basics(a.n)
    return {"n": a.n, "factors": b.factorization.factors, "mobius": b.mobius, "phi": b.phi, "divisor_count": b.divisor_count}, []


def h_ramanujan(a):
    out = {"q": a.q, "n": a.n, "mode": a.mode, "value": arith.ramanujan_sum(a.q, a.n, a.mode)}
    oracles = []
    if a.check:
        vals = {m: arith.ramanujan_sum(a.q, a.n, m) for m in ("direct", "multiplicative", "moebius_gcd")}
        out["modes_agree"] = len(set(vals.values())) == 1
        oracles.append("tri-mode")
    return out, oracles


def h_ramanujan_moment(a):
    M = a.M if a.M is not None else 2 * a.Q * a.Q
    rep = arith.ramanujan_moment(a.Q, a.j, M, oracle=a.oracle)
    return _report(rep), ["moebius-reverse-order"] if a.oracle else []


def h_lcm_moment(a):
    return _report(arith.lcm_moment(a.Q, a.j)), ["divisor-route-bound"]


def h_gcd_period(a):
    val = arith.gcd_product_period_sum(a.q, verify=True)
    local = arith.gcd_product_period_sum_local(a.q)
    L = arith.lcm(a.q)
    lhs, rhs = arith.period_average_bound(a.q, 2 * L)
    out = {"q": a.q, "lcm": L, "value": val, "local_value": local, "agree": val == local}
    out.update({"abs_product_average": str(lhs), "gcd_average_bound": str(rhs), "bound_holds": lhs <= rhs})
    return out, [
        "period-extension",
        "prime-local",
    ]


def h_counts(a):
    t = lattice.rep_counts(a.d, a.n_max)
    out = {"d": a.d, "n_max": a.n_max, "counts": [int(v) for v in t.counts]}
    oracles = []
    if a.check and a.n_max <= 2000:
        out["fft_agrees"] = bool(np.array_equal(t.counts, lattice.rep_counts_fft(a.d, a.n_max).counts))
        oracles.append("fft-convolution")
    return out, oracles


def h_sphere(a):
    k = lattice.enumerate_sphere(a.d, a.lambda_sq)
    out = {"d": a.d, "lambda_sq": a.lambda_sq, "size": k.size, "symmetric": k.is_symmetric()}
    if a.points:
        out["points"] = k.points.tolist()
    return out, []


def h_annulus(a):
    s = lattice.annulus_stats(a.d, a.lam, a.M, strict=not a.loose)
    return {"d": a.d, "lam": a.lam, "M": a.M, **s.__dict__}, []


def h_sequence(a):
    if a.kind == "factorial":
        seq = lattice.factorial_radii(a.mu)
    elif a.kind == "loglog":
        seq = lattice.factorial_radii(lattice.loglog_mu(a.K))
    else:
        seq = lattice.RadiusSequence(tuple(a.values), a.kind)
    v = lattice.validate_sequence(seq)
    return {"kind": seq.kind, "mu": seq.mu, "length": len(seq), **v.__dict__}, []


def h_congruence(a):
    table = lattice.factorial_congruence_table(a.N_max, a.mu_max)
    return {"N_max": a.N_max, "mu_max": a.mu_max, "all_divisible": all(table.values()), "cases": len(table)}, [
        "exact-divisibility"
    ]


def h_gauss(a):
    p = gauss.GaussSumParams.reduced(a.a, a.l, a.q)
    v = gauss.gauss_sum(p, a.mode).value
    out = {"a": p.a, "l": list(p.l), "q": p.q, "value": v, "abs_scaled": abs(v) * p.q ** (p.d / 2)}
    oracles = []
    if a.check:
        out["direct"] = gauss.gauss_sum(p, "direct").value
        out["agree"] = abs(out["direct"] - v) < gauss.TOL
        oracles.append("direct-sum")
    return out, oracles


def h_gauss_survey(a):
    return _report(gauss.magnitude_survey(a.q_max, a.d, a.samples, a.seed)), []


def h_dual_sum(a):
    closed = gauss.dual_gauss_sum_all(a.Q, a.d, "closed")
    other = gauss.dual_gauss_sum_all(a.Q, a.d, a.mode)
    err = float(np.max(np.abs(closed - other)))
    return {"Q": a.Q, "d": a.d, "mode": a.mode, "max_abs_error": err, "within_tol": err < 1e-6 * a.Q}, [a.mode]


def h_u_l1(a):
    return _report(gauss.u_kernel_l1(a.Q, a.d)), ["decay-certificate"]


def h_bump(a):
    prof = bump.BumpProfile(a.d)
    r = np.asarray(a.r, dtype=float)
    return {"r": a.r, "profile": np.atleast_1d(bump.bump_profile(r)).tolist(), "spatial": prof.spatial(r).tolist()}, []


def h_sphere_ft(a):
    vals = [float(bump.sphere_ft(a.d, x)) for x in a.xi]
    out = {"d": a.d, "xi": a.xi, "values": vals}
    if a.check:
        out["quadrature"] = [bump.sphere_ft_quadrature(a.d, x) for x in a.xi]
        out["max_abs_diff"] = max(abs(u - v) for u, v in zip(vals, out["quadrature"]))
        return out, ["zonal-quadrature"]
    return out, []


def h_decay_fit(a):
    slope, rs, _ = bump.stationary_decay_fit(a.d, a.lo, a.hi)
    return {"d": a.d, "slope": slope, "expected": -(a.d - 1) / 2, "n_peaks": len(rs)}, []


def _load_or_random(a) -> operators.GridFunction:
    if a.input:
        g = gridio.load(a.input)
        return g
    rng = np.random.default_rng(a.seed)
    return operators.GridFunction.indicator(a.d, a.M, rng.random((a.M,) * a.d) < a.density)


def h_average(a):
    f = _load_or_random(a)
    out = operators.spherical_average(f, lattice.enumerate_sphere(f.d, a.lambda_sq), a.method)
    if a.output:
        gridio.save(out if not out.exact else operators.GridFunction(out.d, out.M, out.values.astype(float)), a.output)
    vals = out.values.astype(float)
    return {"d": f.d, "M": f.M, "lambda_sq": a.lambda_sq, "sum": float(vals.sum()), "max": float(vals.max())}, []


def h_maximal(a):
    f = _load_or_random(a)
    seq = lattice.RadiusSequence(tuple(a.lambda_sq))
    out = operators.maximal_function(f, seq)
    if a.output:
        gridio.save(out, a.output)
    return {"d": f.d, "M": f.M, "lambda_sq": a.lambda_sq, "sum": float(out.values.sum()), "max": float(out.values.max())}, []


def h_pairing(a):
    seq = lattice.RadiusSequence(tuple(a.lambda_sq))
    return _report(operators.pairing_study(a.d, a.M, seq, a.p, a.density, a.trials, a.seed)), []


def h_opnorm(a):
    mult = operators.sphere_multiplier_grid(lattice.enumerate_sphere(a.d, a.lambda_sq), a.M)
    op, adj = operators.multiplier_operator(mult)
    rep = operators.operator_norm_l2(op, a.d, a.M, adjoint=adj, multiplier=mult, method=a.method, seed=a.seed)
    return _report(rep), [
        "multiplier-maximum"
    ]


def h_error_norm(a):
    rep = operators.error_operator_norm(a.lambda_sq, a.N_arcs, a.d, a.M, power_check=a.power_check)
    return _report(rep), ["power-iteration"] if a.power_check else []


def h_caq(a):
    m = multiplier.arc_multiplier_caq(a.a, a.q, a.lambda_sq, a.d, a.M)
    if a.output:
        gridio.save(m, a.output)
    return {"a": a.a, "q": a.q, "lambda_sq": a.lambda_sq, "max_abs": m.max_abs(), "hermitian": m.is_hermitian()}, []


def h_composite(a):
    b, u, t = multiplier.composite_multipliers(a.Q, a.lambda_sq, a.d, a.M)
    dev = float(np.max(np.abs(b.values - t.values * u.values)))
    return {"Q": a.Q, "lambda_sq": a.lambda_sq, "d": a.d, "M": a.M, "max_factorization_error": dev}, ["gridwise-product"]


def _kernel_summary(k: multiplier.HybridKernel) -> dict:
    return {
        "lambda_sq": k.lambda_sq,
        "N": k.N,
        "width": k.width,
        "shells": int(len(k.shells)),
        "mass": k.mass(),
        "peak": k.peak(),
        "negative_mass": k.negative_mass(),
    }


def h_k_kernel(a):
    return _kernel_summary(multiplier.k_kernel(a.lambda_sq, a.N, a.d, a.floor)), ["lattice-mass"]


def h_m12(a):
    return _kernel_summary(multiplier.m12_kernel(a.lambda_sq, a.N, a.d)), []


def h_psi2(a):
    return _report(multiplier.psi2_statistic(a.lambda_sq, a.N, a.j, a.d)), []


def h_msw(a):
    return _report(multiplier.msw_single_arc(a.q_max, a.lambda_sq, a.d, a.M)), []


# --------------------------------------------------------------------------
# Sweeps


def _sweep_point(target: str, value: float, fixed: dict) -> tuple[float, float, dict]:
    g = lambda k, dflt: type(dflt)(fixed.get(k, dflt))  # noqa: E731
    if target == "synthetic":
        return value, value ** g("exponent", 3.0), {}
    if target == "counts":
        n = int(value)
        return math.sqrt(n), float(lattice.rep_counts_fft(g("d", 5), n).counts[n]), {}
    if target == "ramanujan-moment":
        Q = int(value)
        rep = arith.ramanujan_moment(Q, g("j", 2), 2 * Q * Q)
        return Q, rep.value, {}
    if target == "lcm-moment":
        rep = arith.lcm_moment(int(value), g("j", 2))
        return value, rep.value, {"bound": rep.extra.get("divisor_bound")}
    if target == "error-norm":
        rep = operators.error_operator_norm(int(value), None, g("d", 5), g("M", 32))
        return math.sqrt(value), rep.value, {}
    if target == "psi2":
        N = int(value)
        lam = N ** g("lambda_power", 3)
        rep = multiplier.psi2_statistic(lam * lam, N, g("j", 4), g("d", 5))
        return N, rep.value, {"low_confidence": rep.extra["low_confidence"]}
    if target == "u-l1":
        rep = gauss.u_kernel_l1(int(value), g("d", 5))
        return value, rep.value, {"relative_truncation": rep.extra["relative_truncation"]}
    raise DomainError(f"unknown sweep target {target!r}")


def _sweep_task(args: tuple) -> tuple[float, float, dict]:
    return _sweep_point(*args)


def h_sweep(a):
    if len(a.values) < 3:
        raise DomainError("a sweep needs at least 3 points")
    fixed = dict(kv.split("=", 1) for kv in a.fixed)
    tasks = [(a.target, v, fixed) for v in a.values]
    if a.jobs > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            points = list(ex.map(_sweep_task, tasks))  # map keeps input order
    else:
        points = [_sweep_task(t) for t in tasks]
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    fit = fit_loglog(xs, ys)
    if a.csv:
        keys = sorted({k for p in points for k in p[2]})
        with open(a.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "value", "x", "y"] + [f"extra_{k}" for k in keys])
            for i, (v, (x, y, ex)) in enumerate(zip(a.values, points)):
                w.writerow([i, v, repr(float(x)), repr(float(y))] + [ex.get(k, "") for k in keys])
    return {
        "target": a.target,
        "fixed": fixed,
        "points": [{"value": v, "x": x, "y": y, "extra": ex} for v, (x, y, ex) in zip(a.values, points)],
        "fit": fit.__dict__,
    }, ["loglog-ols"]


# --------------------------------------------------------------------------
# Verification suites


def _suite_gauss_identities() -> list[dict]:
    rng = np.random.default_rng(gauss.SURVEY_SEED)
    checks = []
    worst = 0.0
    for Q in (4, 6, 8, 12):
        for _ in range(20):
            rho = int(rng.choice([r for r in range(1, Q + 1) if Q % r == 0]))
            a = int(rng.integers(0, Q // rho)) * rho
            l = tuple(int(v) * rho for v in rng.integers(0, Q // rho, size=5))
            a2, l2, Q2, _ = gauss.reduce_params(a, l, Q)
            g1 = gauss.gauss_sum(gauss.GaussSumParams(a, l, Q)).value
            g2 = gauss.gauss_sum(gauss.GaussSumParams.reduced(a2, l2, Q2)).value
            worst = max(worst, abs(g1 - g2))
    checks.append({"check": "reduction identity", "passed": worst < gauss.TOL, "measured": worst})
    sep = 0.0
    for q in (2, 3, 5):
        for a in range(q):
            for _ in range(5):
                l = tuple(int(v) for v in rng.integers(0, q, size=5))
                p = gauss.GaussSumParams(a, l, q)
                sep = max(sep, abs(gauss.gauss_sum(p).value - gauss.gauss_sum(p, "direct").value))
    checks.append({"check": "separability", "passed": sep < gauss.TOL, "measured": sep})
    rep = gauss.magnitude_survey(8, 5)
    checks.append({"check": "magnitude bound q<=8", "passed": rep.extra["within_bound"], "measured": rep.value})
    return checks


def _suite_dual_sum() -> list[dict]:
    out = []
    for Q in (2, 3, 4):
        err = float(np.max(np.abs(gauss.dual_gauss_sum_all(Q, 5, "closed") - gauss.dual_gauss_sum_all(Q, 5, "direct"))))
        out.append({"check": f"dual sum Q={Q}", "passed": err < 1e-6 * Q, "measured": err})
    return out


def _suite_ramanujan() -> list[dict]:
    bad = 0
    for q in range(1, 41):
        for n in range(0, 81):
            v = {arith.ramanujan_sum(q, n, m) for m in ("direct", "multiplicative", "moebius_gcd")}
            bad += len(v) != 1
    return [{"check": "tri-mode q<=40 n<=80", "passed": bad == 0, "measured": bad}]


def _suite_operators() -> list[dict]:
    rng = np.random.default_rng(0)
    f = operators.GridFunction(5, 8, rng.random((8,) * 5))
    k = lattice.enumerate_sphere(5, 2)
    s = operators.spherical_average(f, k, "spatial")
    t = operators.spherical_average(f, k, "fft")
    err = float(np.max(np.abs(s.values - t.values)))
    mass = abs(float(s.values.sum()) - float(f.values.sum()))
    return [
        {"check": "fft vs spatial", "passed": err < 1e-9, "measured": err},
        {"check": "mass preservation", "passed": mass < 1e-9, "measured": mass},
    ]


def _suite_composite() -> list[dict]:
    b, u, t = multiplier.composite_multipliers(2, 4, 5, 16)
    err = float(np.max(np.abs(b.values - t.values * u.values)))
    return [{"check": "b = t u (Q=2, lambda^2=4, M=16)", "passed": err < 1e-9, "measured": err}]


SUITES: dict[str, Callable[[], list[dict]]] = {
    "empty": lambda: [],
    "gauss-identities": _suite_gauss_identities,
    "dual-sum": _suite_dual_sum,
    "ramanujan": _suite_ramanujan,
    "operators": _suite_operators,
    "composite": _suite_composite,
}


def h_verify(a):
    if a.suite not in SUITES:
        raise DomainError(f"unknown suite {a.suite!r}; choose from {sorted(SUITES)}")
    checks = SUITES[a.suite]()
    return {"suite": a.suite, "checks": checks, "passed": all(c["passed"] for c in checks)}, [a.suite]


# --------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lacsphere", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", help="write the JSON report here (timing goes to <out>.timing.json)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help=f"work budget override (same as {WORK_ENV})")
    p.add_argument("--timing", action="store_true", help="print wall time to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help_=None, **kw):
        sp = sub.add_parser(name, help=help_, **kw)
        sp.set_defaults(handler=fn)
        return sp

    s = cmd("arith", h_arith, "factorization, Moebius, phi, divisor count")
    s.add_argument("--n", type=int, required=True)

    s = cmd("ramanujan", h_ramanujan, "one Ramanujan sum")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mode", choices=["direct", "multiplicative", "moebius_gcd"], default="multiplicative")
    s.add_argument("--check", action="store_true")

    s = cmd("ramanujan-moment", h_ramanujan_moment, "j-th moment of partial absolute sums")
    s.add_argument("--Q", type=int, required=True)
    s.add_argument("--j", type=int, default=2)
    s.add_argument("--M", type=int)
    s.add_argument("--oracle", action="store_true")

    s = cmd("lcm-moment", h_lcm_moment, "exact lcm moment and divisor-route bound")
    s.add_argument("--Q", type=int, required=True)
    s.add_argument("--j", type=int, default=2)

    s = cmd("gcd-period", h_gcd_period, "period sum of gcd products")
    s.add_argument("--q", type=int, nargs="+", required=True)

    s = cmd("counts", h_counts, "lattice representation counts r_d(n), n <= n-max")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--check", action="store_true")

    s = cmd("sphere", h_sphere, "enumerate a lattice sphere")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--points", action="store_true")

    s = cmd("annulus", h_annulus, "annulus lattice count vs volume")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--lam", type=float, required=True)
    s.add_argument("--M", type=float, required=True)
    s.add_argument("--loose", action="store_true", help="skip the M >= 2, lam/M >= 2 precondition")

    s = cmd("sequence", h_sequence, "validate a radius sequence")
    s.add_argument("--kind", choices=["general", "lacunary", "factorial", "loglog"], required=True)
    s.add_argument("--values", type=int, nargs="*", default=[])
    s.add_argument("--mu", type=int, nargs="*", default=[])
    s.add_argument("--K", type=int, default=20)

    s = cmd("congruence", h_congruence, "N! | mu! table")
    s.add_argument("--N-max", type=int, default=10)
    s.add_argument("--mu-max", type=int, default=20)

    s = cmd("gauss", h_gauss, "one normalized Gauss sum")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--l", type=int, nargs="+", required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--mode", choices=["factored", "direct"], default="factored")
    s.add_argument("--check", action="store_true")

    s = cmd("gauss-survey", h_gauss_survey, "max |G| q^{d/2} over primitive triples")
    s.add_argument("--q-max", type=int, required=True)
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--samples", type=int, default=gauss.SURVEY_SAMPLES)

    s = cmd("dual-sum", h_dual_sum, "dual Gauss sum closed form vs summation")
    s.add_argument("--Q", type=int, required=True)
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--mode", choices=["separable", "direct"], default="separable")

    s = cmd("u-l1", h_u_l1, "l1 norm of the U kernel with certified truncation")
    s.add_argument("--Q", type=int, required=True)
    s.add_argument("--d", type=int, default=5)

    s = cmd("bump", h_bump, "cutoff profile and spatial bump")
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--r", type=float, nargs="+", required=True)

    s = cmd("sphere-ft", h_sphere_ft, "Fourier transform of the unit sphere measure")
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--xi", type=float, nargs="+", required=True)
    s.add_argument("--check", action="store_true")

    s = cmd("decay-fit", h_decay_fit, "envelope slope of the sphere transform")
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--lo", type=float, default=2.0)
    s.add_argument("--hi", type=float, default=100.0)

    for name, fn, hlp in (("average", h_average, "spherical average of a grid"), ("maximal", h_maximal, "maximal function")):
        s = cmd(name, fn, hlp)
        s.add_argument("--d", type=int, default=5)
        s.add_argument("--M", type=int, default=8)
        s.add_argument("--input", help="grid file (.json or binary); default: random set")
        s.add_argument("--output")
        s.add_argument("--density", type=float, default=0.125)
        if name == "average":
            s.add_argument("--lambda-sq", type=int, required=True)
            s.add_argument("--method", choices=["spatial", "fft", "exact"], default="fft")
        else:
            s.add_argument("--lambda-sq", type=int, nargs="+", required=True)

    s = cmd("pairing", h_pairing, "Monte-Carlo restricted-type pairing ratios")
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--M", type=int, default=16)
    s.add_argument("--lambda-sq", type=int, nargs="+", default=[1, 2, 4, 8])
    s.add_argument("--p", type=float, default=1.5)
    s.add_argument("--density", type=float, default=0.125)
    s.add_argument("--trials", type=int, default=100)

    s = cmd("opnorm", h_opnorm, "l2 norm of a spherical average by Lanczos or power iteration")
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--M", type=int, default=16)
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--method", choices=["lanczos", "power"], default="lanczos")

    s = cmd("error-norm", h_error_norm, "l2 norm of A_lambda - C_lambda")
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--N-arcs", type=int)
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--M", type=int, default=32)
    s.add_argument("--power-check", action="store_true")

    s = cmd("caq", h_caq, "single arc multiplier")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--M", type=int, default=16)
    s.add_argument("--output")

    s = cmd("composite", h_composite, "b, u, t multipliers and the b = t u check")
    s.add_argument("--Q", type=int, required=True)
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--M", type=int, default=16)

    s = cmd("k-kernel", h_k_kernel, "mollified sphere kernel on lattice shells")
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--floor", type=float, default=1e-9)

    s = cmd("m12", h_m12, "hybrid kernel K * C_N")
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--d", type=int, default=5)

    s = cmd("psi2", h_psi2, "weighted Ramanujan moment against K")
    s.add_argument("--lambda-sq", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--j", type=int, default=4)
    s.add_argument("--d", type=int, default=5)

    s = cmd("msw", h_msw, "single-arc multiplier constant")
    s.add_argument("--q-max", type=int, default=8)
    s.add_argument("--lambda-sq", type=int, default=64)
    s.add_argument("--d", type=int, default=5)
    s.add_argument("--M", type=int, default=16)

    s = cmd("sweep", h_sweep, "parameter sweep with log-log fit", epilog=SWEEP_HELP,
            formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--target", required=True)
    s.add_argument("--values", type=float, nargs="+", required=True)
    s.add_argument("--fixed", nargs="*", default=[], help="key=value pairs")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--csv")

    s = cmd("verify", h_verify, "run a verification suite")
    s.add_argument("suite")
    return p


def _config(args: argparse.Namespace) -> dict[str, Any]:
    cfg = {k: v for k, v in vars(args).items() if k not in ("handler", "out", "timing")}
    return _jsonable(cfg)


def _error_doc(exc: Exception, code: int) -> str:
    return json.dumps(
        {"schema_version": SCHEMA_VERSION, "status": "error", "error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}},
        sort_keys=True,
    )


def main(argv: list[str] | None = None) -> int:
    saved = os.environ.get(WORK_ENV)
    try:
        return _run(argv)
    finally:
        if saved is None:
            os.environ.pop(WORK_ENV, None)
        else:
            os.environ[WORK_ENV] = saved


def _run(argv: list[str] | None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.budget is not None:
            if args.budget <= 0:
                raise DomainError("--budget must be positive")
            os.environ[WORK_ENV] = str(args.budget)
        t0 = time.perf_counter()
        result, oracles = args.handler(args)
        wall = time.perf_counter() - t0
    except LacSphereError as exc:
        print(_error_doc(exc, exc.exit_code), file=sys.stderr)
        return exc.exit_code
    except (ValueError, OverflowError) as exc:
        print(_error_doc(exc, 2), file=sys.stderr)
        return 2
    status = 1 if args.command == "verify" and not result["passed"] else 0
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": _config(args),
        "status": "ok" if status == 0 else "failed",
        "result": _jsonable(result),
        "oracles": oracles,
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        Path(args.out + ".timing.json").write_text(json.dumps({"wall_seconds": wall}) + "\n")
    else:
        sys.stdout.write(text)
    if args.timing:
        print(f"wall time {wall:.3f}s", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
