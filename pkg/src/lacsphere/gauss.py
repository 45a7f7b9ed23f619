"""Normalized Gauss sums G(a, l, q) = q^-d sum_{n in Z_q^d} e_q(a|n|^2 + n.l).

All phases are reduced mod q in integer arithmetic before exponentiation, so
double-precision error stays at the 1e-15 level for the moduli used here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .bump import BumpProfile, sphere_area
from .config import require_work
from .errors import DomainError, PrecisionError
from .lattice import rep_counts_fft
from .report import MomentReport

TOL = 1e-9
SURVEY_SAMPLES = 1000
SURVEY_SEED = 20190101


@dataclass(frozen=True)
class GaussSumParams:
    a: int
    l: tuple[int, ...]
    q: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise DomainError("q must be >= 1")
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        if not 0 <= self.a < self.q or any(not 0 <= v < self.q for v in self.l):
            raise DomainError(f"residues must lie in [0, {self.q})")

    @classmethod
    def reduced(cls, a: int, l: Sequence[int], q: int) -> "GaussSumParams":
        return cls(a % q, tuple(v % q for v in l), q)

    @property
    def d(self) -> int:
        return len(self.l)

    @property
    def primitive(self) -> bool:
        return math.gcd(self.a, *self.l, self.q) == 1


@dataclass(frozen=True)
class GaussSumValue:
    params: GaussSumParams
    value: complex


@lru_cache(maxsize=256)
def gauss_1d_table(q: int) -> np.ndarray:
    """T[a, l] = q^-1 sum_{m mod q} e_q(a m^2 + l m) for all residues a, l."""
    m = np.arange(q, dtype=np.int64)
    a = m[:, None, None]
    l = m[None, :, None]
    ph = (a * (m * m)[None, None, :] + l * m[None, None, :]) % q
    out = np.exp(2j * np.pi * ph / q).sum(axis=2) / q
    out.flags.writeable = False
    return out


def gauss_product(a, l: np.ndarray, q: int) -> np.ndarray:
    """Vectorized factored G: ``l`` has shape (..., d), ``a`` broadcasts against l[..., 0]."""
    T = gauss_1d_table(q)
    l = np.asarray(l, dtype=np.int64) % q
    a = np.asarray(a, dtype=np.int64) % q
    return np.prod(T[a[..., None] if np.ndim(a) else a, l], axis=-1)


def _gauss_direct(p: GaussSumParams) -> complex:
    q, d = p.q, p.d
    require_work(q**d * d, "direct Gauss sum")
    grids = np.indices((q,) * d, dtype=np.int64).reshape(d, -1)
    ph = (p.a * (grids**2).sum(axis=0) + np.asarray(p.l, dtype=np.int64) @ grids) % q
    return complex(np.exp(2j * np.pi * ph / q).sum() / q**d)


def gauss_sum(params: GaussSumParams, mode: str = "factored") -> GaussSumValue:
    if mode == "factored":
        T = gauss_1d_table(params.q)
        val = complex(np.prod([T[params.a, v] for v in params.l])) if params.l else 1.0 + 0j
    elif mode == "direct":
        val = _gauss_direct(params)
    else:
        raise DomainError(f"unknown Gauss sum mode {mode!r}")
    return GaussSumValue(params, val)


def reduce_params(a: int, l: Sequence[int], Q: int) -> tuple[int, tuple[int, ...], int, int]:
    """Divide (a, l, Q) by rho = gcd(a, l, Q); G is unchanged. Returns (a', l', Q', rho)."""
    if Q < 1:
        raise DomainError("Q must be >= 1")
    rho = math.gcd(a, *l, Q)
    return a // rho, tuple(v // rho for v in l), Q // rho, rho


def magnitude_survey(q_max: int, d: int, samples: int = SURVEY_SAMPLES, seed: int = SURVEY_SEED) -> MomentReport:
    """max of |G(a, l, q)| q^{d/2} over primitive triples with q <= q_max.

    l-spaces with more than ``samples`` points are sampled with a fixed seed
    per (a, q); smaller ones are enumerated.
    """
    if q_max < 1 or d < 1:
        raise DomainError("q_max and d must be positive")
    per_q: dict[int, float] = {}
    exhaustive = True
    for q in range(1, q_max + 1):
        best = 0.0
        for a in range(q):
            if q**d <= samples:
                ls = np.indices((q,) * d, dtype=np.int64).reshape(d, -1).T
            else:
                exhaustive = False
                rng = np.random.default_rng([seed, q, a])
                ls = rng.integers(0, q, size=(samples, d))
            g = np.gcd.reduce(np.concatenate([ls, np.full((len(ls), 1), a), np.full((len(ls), 1), q)], axis=1), axis=1)
            prim = ls[g == 1]
            if len(prim):
                vals = np.abs(gauss_product(a, prim, q)) * q ** (d / 2)
                best = max(best, float(vals.max()))
        per_q[q] = best
    worst = max(per_q.values())
    bound = 2 ** (d / 2)
    return MomentReport(
        parameters={"q_max": q_max, "d": d, "samples": samples, "seed": seed},
        value=worst,
        extra={"per_q": per_q, "bound": bound, "within_bound": worst <= bound * (1 + TOL), "exhaustive": exhaustive},
    )


def dual_gauss_sum(m: Sequence[int], Q: int, mode: str = "closed") -> complex:
    """sum_{0 <= a < Q} sum_{l in Z_Q^d} G(a, l, Q) e_Q(-m.l).

    ``closed``: Q if Q divides |m|^2, else 0. ``separable``: the l-sum factored
    over coordinates, then summed over a. ``direct``: every (a, l) term.
    """
    m = np.asarray(m, dtype=np.int64)
    d = m.size
    if Q < 1:
        raise DomainError("Q must be >= 1")
    if mode == "closed":
        return complex(Q if int(m @ m) % Q == 0 else 0)
    T = gauss_1d_table(Q)
    if mode == "separable":
        ell = np.arange(Q, dtype=np.int64)
        tot = 0j
        for a in range(Q):
            fac = 1 + 0j
            for mi in m:
                fac *= np.sum(T[a] * np.exp(-2j * np.pi * ((mi * ell) % Q) / Q))
            tot += fac
        return complex(tot)
    if mode == "direct":
        require_work(Q ** (d + 1) * d, "direct dual Gauss sum")
        ls = np.indices((Q,) * d, dtype=np.int64).reshape(d, -1).T
        phase = np.exp(-2j * np.pi * ((ls @ m) % Q) / Q)
        return complex(sum(np.sum(gauss_product(a, ls, Q) * phase) for a in range(Q)))
    raise DomainError(f"unknown dual sum mode {mode!r}")


def dual_gauss_sum_all(Q: int, d: int, mode: str = "separable") -> np.ndarray:
    """dual_gauss_sum at every m in [0, Q)^d, returned as an array of shape (Q,)*d."""
    ms = np.indices((Q,) * d, dtype=np.int64).reshape(d, -1).T
    if mode == "closed":
        vals = np.where((ms * ms).sum(axis=1) % Q == 0, Q, 0).astype(complex)
    elif mode == "separable":
        T = gauss_1d_table(Q)
        ell = np.arange(Q, dtype=np.int64)
        F = T @ np.exp(-2j * np.pi * (np.outer(ell, ell) % Q) / Q)  # F[a, m_i]
        vals = np.zeros(len(ms), dtype=complex)
        for a in range(Q):
            vals += np.prod(F[a][ms], axis=1)
    else:
        vals = np.array([dual_gauss_sum(m, Q, mode) for m in ms])
    return vals.reshape((Q,) * d)


def null_residue_count(Q: int, d: int) -> int:
    """#{x in (Z/QZ)^d : |x|^2 = 0 mod Q}, by cyclic convolution of square histograms."""
    hist = np.bincount((np.arange(Q, dtype=np.int64) ** 2) % Q, minlength=Q).astype(object)
    acc = np.zeros(Q, dtype=object)
    acc[0] = 1
    for _ in range(d):
        nxt = np.zeros(Q, dtype=object)
        for s in range(Q):
            if acc[s]:
                nxt += acc[s] * np.roll(hist, s)
        acc = nxt
    return int(acc[0])


def u_kernel_l1(
    Q: int,
    d: int,
    psi: BumpProfile | None = None,
    scale: int = 2,
    rho: float | None = None,
    max_rel_tail: float = 0.01,
) -> MomentReport:
    """l1 norm of the kernel U(m) = Q psi_{scale*Q}(m) 1[Q | |m|^2] over Z^d.

    The lattice sum runs over |m| <= rho * scale * Q; the neglected tail is
    bounded with the bump's decay certificate applied to each residue class
    of {x mod Q : Q | |x|^2}. ``rho=None`` picks the smallest radius in
    {16, 20, ..., 36} whose certified tail is below half of ``max_rel_tail``.
    """
    if Q < 1:
        raise DomainError("Q must be >= 1")
    psi = psi or BumpProfile(d)
    if psi.d != d:
        raise DomainError("bump dimension mismatch")
    w = scale * Q
    cert = psi.decay_certificate()
    density = Q * null_residue_count(Q, d) / Q**d
    eta = math.sqrt(d) / (2 * scale)

    def tail(r: float) -> float:
        return density * sphere_area(d) * cert.shell_integral(r, eta)

    def lattice_sum(r: float) -> tuple[float, int]:
        R2 = int(math.floor((r * w) ** 2))
        ns = np.arange(0, R2 + 1, Q, dtype=np.int64)
        counts = rep_counts_fft(d, R2).counts[ns].astype(float)
        vals = np.abs(psi.spatial(np.sqrt(ns) / w)) * w ** (-d)
        return float(Q * np.sum(counts * vals)), R2

    if rho is None:
        base, _ = lattice_sum(16.0)
        for cand in (16.0, 20.0, 24.0, 28.0, 32.0, 36.0):
            if tail(cand) < 0.5 * max_rel_tail * base:
                rho = cand
                break
        else:
            rho = 36.0
    value, R2 = lattice_sum(rho)
    t = tail(rho)
    if t > max_rel_tail * value:
        raise PrecisionError(f"certified tail {t:.3g} exceeds {max_rel_tail:.0%} of value {value:.4g}")
    return MomentReport(
        parameters={"Q": Q, "d": d, "scale": scale, "rho": rho},
        value=value,
        extra={"truncation_bound": t, "relative_truncation": t / value, "radius_sq": R2, "residue_density": density},
    )
