"""Lattice points on spheres and annuli in Z^d, and radius sequences."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import current_limits, require_work
from .errors import DomainError, NumericalIntegrityError


@dataclass(frozen=True)
class RepCountTable:
    d: int
    n_max: int
    counts: np.ndarray  # counts[n] = r_d(n)

    def __getitem__(self, n: int) -> int:
        return int(self.counts[n])

    def ball_count(self, R2: int) -> int:
        """#{x in Z^d : |x|^2 <= R2}."""
        return int(self.counts[: R2 + 1].sum())


def _count_dtype(d: int, n_max: int):
    return np.int64 if (2 * math.isqrt(n_max) + 1) ** d < 2**62 else object


def _convolve_square(prev: np.ndarray, n_max: int) -> np.ndarray:
    """One more coordinate: out[n] = sum_x w_x prev[n - x^2], w_0 = 1, w_x = 2."""
    out = prev.copy()
    x = 1
    while x * x <= n_max:
        s = x * x
        out[s:] += 2 * prev[: n_max + 1 - s]
        x += 1
    return out


def rep_counts(d: int, n_max: int) -> RepCountTable:
    """r_d(n) for 0 <= n <= n_max by d-1 exact convolutions of the square indicator."""
    if d < 1 or n_max < 0:
        raise DomainError("need d >= 1 and n_max >= 0")
    require_work((n_max + 1) * (math.isqrt(n_max) + 1) * d, "rep_counts")
    dtype = _count_dtype(d, n_max)
    r1 = np.zeros(n_max + 1, dtype=dtype)
    r1[0] = 1
    x = 1
    while x * x <= n_max:
        r1[x * x] = 2
        x += 1
    counts = r1
    for _ in range(d - 1):
        counts = _convolve_square(counts, n_max)
    counts.flags.writeable = False
    return RepCountTable(d, n_max, counts)


def _fft_square(a: np.ndarray, b: np.ndarray, n_max: int) -> np.ndarray:
    """Exact integer convolution via real FFT, certified by rounding residuals."""
    size = 1 << (2 * (n_max + 1) - 1).bit_length()
    fa = np.fft.rfft(a.astype(float), size)
    fb = fa if b is a else np.fft.rfft(b.astype(float), size)
    raw = np.fft.irfft(fa * fb, size)[: n_max + 1]
    out = np.rint(raw)
    if np.max(np.abs(raw - out)) > 0.05 or np.max(out) > 2.0**52:
        raise NumericalIntegrityError("FFT convolution lost integrality")
    return out.astype(np.int64)


def rep_counts_fft(d: int, n_max: int) -> RepCountTable:
    """Same table as rep_counts, built by FFT squaring (for large n_max).

    Each convolution is rounded and certified integral; results are exact.
    """
    if d < 1 or n_max < 0:
        raise DomainError("need d >= 1 and n_max >= 0")
    if _count_dtype(d, n_max) is object:
        return rep_counts(d, n_max)
    require_work(2 * math.log2(d + 1) * 2 * (n_max + 1) * math.log2(2 * n_max + 4), "rep_counts_fft")
    r1 = np.zeros(n_max + 1, dtype=np.int64)
    r1[0] = 1
    x = np.arange(1, math.isqrt(n_max) + 1)
    r1[x * x] = 2
    result = None
    power = r1
    k = d
    while k:
        if k & 1:
            result = power if result is None else _fft_square(result, power, n_max)
        k >>= 1
        if k:
            power = _fft_square(power, power, n_max)
    result = result.copy()
    result.flags.writeable = False
    return RepCountTable(d, n_max, result)


def rep_counts_at(d: int, ns: Sequence[int] | np.ndarray) -> np.ndarray:
    """r_d at selected n, using a full r_{d-1} table and one sparse final convolution."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(0, dtype=np.int64)
    if d == 1:
        return rep_counts(1, int(ns.max())).counts[ns]
    n_max = int(ns.max())
    prev = rep_counts(d - 1, n_max).counts
    out = prev[ns].astype(prev.dtype)
    x = 1
    while x * x <= n_max:
        s = x * x
        ok = ns >= s
        out[ok] += 2 * prev[ns[ok] - s]
        x += 1
    return out


# --------------------------------------------------------------------------
# Spheres


@dataclass(frozen=True)
class SphereKernel:
    d: int
    lambda_sq: int
    points: np.ndarray  # shape (s, d), lexicographic order

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def weight(self) -> Fraction | None:
        """Uniform weight 1/s_lambda; None for an empty sphere."""
        return Fraction(1, self.size) if self.size else None

    @property
    def empty(self) -> bool:
        return self.size == 0

    def is_symmetric(self) -> bool:
        """Closed under coordinate sign flips and permutations.

        Checked on generators of the hyperoctahedral group: negating the first
        coordinate, swapping the first two, and a cyclic shift.
        """
        pts = {tuple(int(v) for v in p) for p in self.points}
        gens = [
            lambda p: (-p[0],) + p[1:],
            lambda p: p[1:] + p[:1],
        ]
        if self.d >= 2:
            gens.append(lambda p: (p[1], p[0]) + p[2:])
        return all({g(p) for p in pts} == pts for g in gens)


def enumerate_sphere(d: int, lambda_sq: int) -> SphereKernel:
    """All n in Z^d with |n|^2 = lambda_sq, by coordinate descent with square-residual pruning."""
    if d < 1 or lambda_sq < 0:
        raise DomainError("need d >= 1 and lambda_sq >= 0")
    total = int(rep_counts(d, lambda_sq).counts[lambda_sq])
    if total * d > current_limits().grid_points:
        raise DomainError(f"sphere has {total} points, above memory budget")
    out = np.empty((total, d), dtype=np.int64)
    prefix = [0] * d
    idx = 0

    # r_k tables for every remaining-coordinate count, for pruning
    tables = {k: rep_counts(k, lambda_sq).counts for k in range(1, d)}

    def rec(i: int, rest: int) -> None:
        nonlocal idx
        if i == d - 1:
            r = math.isqrt(rest)
            if r * r != rest:
                return
            for v in ((-r, r) if r else (0,)):
                prefix[i] = v
                out[idx] = prefix
                idx += 1
            return
        x = math.isqrt(rest)
        for v in range(-x, x + 1):
            left = rest - v * v
            if tables[d - 1 - i][left]:
                prefix[i] = v
                rec(i + 1, left)

    if total:
        rec(0, lambda_sq)
    assert idx == total
    out.flags.writeable = False
    return SphereKernel(d, lambda_sq, out)


# --------------------------------------------------------------------------
# Annuli


@dataclass(frozen=True)
class AnnulusStats:
    lattice_count: int
    volume: float
    ratio: float | None
    degenerate: bool
    m_range: tuple[int, int]  # admissible |x|^2 values, inclusive


def ball_volume(d: int, R: float) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * R**d


def annulus_stats(d: int, lam: float, M: float, strict: bool = True) -> AnnulusStats:
    """Lattice points and volume of {x : | |x| - lam | < lam / M}.

    ``strict`` enforces M >= 2 and lam / M >= 2.
    """
    if M <= 1 or lam <= 0:
        raise DomainError("need M > 1 and lam > 0")
    if strict and (M < 2 or lam / M < 2):
        raise DomainError(f"annulus needs M >= 2 and lam/M >= 2 (got lam={lam}, M={M})")
    r_in, r_out = lam * (1 - 1 / M), lam * (1 + 1 / M)
    lo = math.floor(r_in * r_in) + 1
    hi = math.ceil(r_out * r_out) - 1
    # exact boundary tests (float roots may land on integers)
    while lo - 1 >= 0 and math.sqrt(lo - 1) > r_in:
        lo -= 1
    while math.sqrt(hi + 1) < r_out:
        hi += 1
    volume = ball_volume(d, r_out) - ball_volume(d, r_in)
    if hi < lo:
        return AnnulusStats(0, volume, None, True, (lo, hi))
    counts = rep_counts(d, hi).counts
    count = int(counts[lo : hi + 1].sum())
    return AnnulusStats(count, volume, count / volume, False, (lo, hi))


# --------------------------------------------------------------------------
# Radius sequences

KINDS = ("general", "lacunary", "factorial")


@dataclass(frozen=True)
class RadiusSequence:
    lambda_sq: tuple[int, ...]
    kind: str = "general"
    mu: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown sequence kind {self.kind!r}")
        vals = tuple(int(v) for v in self.lambda_sq)
        object.__setattr__(self, "lambda_sq", vals)
        if any(v <= 0 for v in vals):
            raise DomainError("squared radii must be positive")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("squared radii must be strictly increasing")
        if self.kind == "factorial" and (self.mu is None or len(self.mu) != len(vals)):
            raise DomainError("factorial sequences carry their mu list")

    def __len__(self) -> int:
        return len(self.lambda_sq)


@dataclass(frozen=True)
class SequenceValidation:
    valid: bool
    violation_index: int | None = None
    detail: str = ""
    statistics: dict = field(default_factory=dict)


def validate_sequence(seq: RadiusSequence) -> SequenceValidation:
    """Lacunary: lambda_{k+1}^2 >= 2 lambda_k^2 at every step.

    Factorial: mu strictly increasing with lambda_k^2 = mu_k!, plus the
    finite-prefix growth statistic log(mu_k)/log(k). The limit condition on
    that ratio cannot be decided on a prefix; ``statistics`` reports tail
    minima at the quarter points and whether they are nondecreasing.
    """
    vals = seq.lambda_sq
    if seq.kind == "lacunary":
        for k in range(1, len(vals)):
            if vals[k] < 2 * vals[k - 1]:
                return SequenceValidation(False, k, f"{vals[k]} < 2*{vals[k - 1]}")
        return SequenceValidation(True)
    if seq.kind == "factorial":
        mu = seq.mu or ()
        for k in range(1, len(mu)):
            if mu[k] <= mu[k - 1]:
                return SequenceValidation(False, k, f"mu not increasing: {mu[k]} <= {mu[k - 1]}")
        for k, (m, v) in enumerate(zip(mu, vals)):
            if math.factorial(m) != v:
                return SequenceValidation(False, k, f"lambda^2 != mu! at k={k}")
        return SequenceValidation(True, statistics=growth_statistic(mu))
    return SequenceValidation(True)


def growth_statistic(mu: Sequence[int]) -> dict:
    """Tail minima of log(mu_k)/log(k) over 1-based k >= 2."""
    K = len(mu)
    if K < 3:
        return {"ratios": [], "tail_minima": [], "trend_increasing": False}
    ks = np.arange(2, K + 1)
    ratios = np.log(np.asarray(mu[1:], dtype=float)) / np.log(ks)
    starts = sorted({max(0, int(f * (K - 1))) for f in (0.0, 0.25, 0.5, 0.75)})
    minima = [float(ratios[s:].min()) for s in starts]
    return {
        "tail_starts": [int(ks[s]) for s in starts],
        "tail_minima": minima,
        "trend_increasing": all(b >= a for a, b in zip(minima, minima[1:])),
    }


def loglog_mu(K: int) -> list[int]:
    """mu_k = ceil(k^(log log k)), bumped where needed to stay strictly increasing."""
    out: list[int] = []
    for k in range(1, K + 1):
        e = math.log(math.log(k)) if k >= 3 else 0.0
        m = math.ceil(k ** max(e, 0.0))
        if out and m <= out[-1]:
            m = out[-1] + 1
        out.append(m)
    return out


def factorial_radii(mu: Sequence[int]) -> RadiusSequence:
    mu = tuple(int(m) for m in mu)
    if not mu or min(mu) < 1:
        raise DomainError("mu must be a nonempty list of positive integers")
    if any(b <= a for a, b in zip(mu, mu[1:])):
        raise DomainError("mu must be strictly increasing")
    cap = current_limits().factorial_mu
    if max(mu) > cap:
        raise DomainError(f"mu={max(mu)} exceeds factorial cap {cap}")
    # mu = 1 gives 1! = 1 and mu = 0 is excluded, so the values stay strictly increasing
    return RadiusSequence(tuple(math.factorial(m) for m in mu), "factorial", mu)


def lacunary_sequence(start: int, count: int, ratio: int = 2) -> RadiusSequence:
    return RadiusSequence(tuple(start * ratio**k for k in range(count)), "lacunary")


def congruence_check(lambda_sq: int, q: int) -> bool:
    """True iff every phase e_q(-lambda^2 a) equals 1, i.e. q divides lambda^2."""
    if q < 1:
        raise DomainError("q must be >= 1")
    return int(lambda_sq) % int(q) == 0


def factorial_congruence_table(N_max: int, mu_max: int) -> dict[tuple[int, int], bool]:
    """For N <= N_max and N <= mu <= mu_max: does N! divide mu! ?"""
    out = {}
    for N in range(1, N_max + 1):
        Q = math.factorial(N)
        for mu in range(N, mu_max + 1):
            out[(N, mu)] = congruence_check(math.factorial(mu), Q)
    return out
