"""Frequency-side constructions on the torus dual grid.

Arc multipliers: sums over rationals l/q of Gauss-sum weights times a bump and
the continuous sphere transform, centred at l/q. Composite (single-modulus)
multipliers b, u, t with b = t * u. Radial hybrid kernels K and K * C_N.

Frequencies live in [-1/2, 1/2)^d; the arc sums run over all l in Z^d with
l/q inside the bump support, which makes them torus-periodic automatically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .arith import partial_sum_table, ramanujan_sum
from .bump import BumpProfile, _gl_rule, besselj, bump_profile, sphere_area, sphere_ft
from .config import current_limits, require_work
from .errors import DomainError, NumericalIntegrityError, PrecisionError
from .gauss import gauss_1d_table
from .lattice import enumerate_sphere, rep_counts_fft
from .report import MomentReport

_CHUNK = 1 << 15


# --------------------------------------------------------------------------
# Grids


def dual_grid_axis(M: int) -> np.ndarray:
    """Frequencies k/M in DFT index order, wrapped into [-1/2, 1/2)."""
    return np.fft.fftfreq(M)


def dual_grid_points(d: int, M: int) -> np.ndarray:
    """All dual-grid frequencies, shape (M**d, d), row-major in DFT index order."""
    if M**d > current_limits().grid_points:
        raise DomainError(f"dual grid of {M**d} points exceeds the grid cap")
    ax = dual_grid_axis(M)
    idx = np.indices((M,) * d).reshape(d, -1).T
    return ax[idx]


def orbit_representatives(d: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Frequency representatives 0 <= k_1 <= ... <= k_d <= M/2 (divided by M) and orbit sizes.

    Every multiplier built from radial profiles, sign-symmetric lattice sums
    and coordinate-symmetric Gauss weights is invariant under coordinate
    permutations and sign changes, so its extrema over the full grid are
    attained on these points.
    """
    half = M // 2
    reps = []

    def rec(prefix: list[int], lo: int) -> None:
        if len(prefix) == d:
            reps.append(tuple(prefix))
            return
        for k in range(lo, half + 1):
            rec(prefix + [k], k)

    rec([], 0)
    ks = np.asarray(reps, dtype=np.int64)
    sizes = np.empty(len(ks), dtype=np.int64)
    for i, k in enumerate(ks):
        _, counts = np.unique(k, return_counts=True)
        perms = math.factorial(d)
        for c in counts:
            perms //= math.factorial(int(c))
        signs = 2 ** int(np.sum((k != 0) & (2 * k != M)))
        sizes[i] = perms * signs
    return ks / M, sizes


@dataclass(frozen=True)
class FreqMultiplier:
    """Complex multiplier on the DFT dual grid of (Z/MZ)^d (index k <-> xi = k/M)."""

    d: int
    M: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.M,) * self.d:
            raise DomainError(f"multiplier shape {v.shape} does not match (M,)*d")
        if not np.all(np.isfinite(v)):
            raise NumericalIntegrityError("non-finite multiplier values")
        if v is self.values:
            v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def apply(self, f: np.ndarray) -> np.ndarray:
        out = np.fft.ifftn(np.fft.fftn(f) * self.values)
        return out.real if np.isrealobj(f) and self.is_hermitian() else out

    def kernel(self) -> np.ndarray:
        """Spatial kernel on the torus: inverse DFT of the multiplier."""
        return np.fft.ifftn(self.values)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        ax = tuple(range(self.d))
        flipped = np.roll(np.flip(self.values, axis=ax), 1, axis=ax)  # m(-xi)
        return bool(np.max(np.abs(flipped - np.conj(self.values))) <= tol * max(1.0, np.max(np.abs(self.values))))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __mul__(self, other: "FreqMultiplier") -> "FreqMultiplier":
        if (self.d, self.M) != (other.d, other.M):
            raise DomainError("multiplier grids differ")
        return FreqMultiplier(self.d, self.M, self.values * other.values)

    def __sub__(self, other: "FreqMultiplier") -> "FreqMultiplier":
        if (self.d, self.M) != (other.d, other.M):
            raise DomainError("multiplier grids differ")
        return FreqMultiplier(self.d, self.M, self.values - other.values)


# --------------------------------------------------------------------------
# Arc sums


def arc_sum(
    xi: np.ndarray,
    q: int,
    scale: float,
    weight: Callable[[np.ndarray], np.ndarray],
    radial: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """sum_{l in Z^d} weight(l mod q) * radial(|xi - l/q|) with bump support |xi - l/q| < 1/scale.

    ``weight`` maps residues of shape (..., d) to complex values of shape (...);
    ``radial`` must vanish for distances >= 1/scale. Accumulation is in a fixed
    candidate order, so results are deterministic.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    P, d = xi.shape
    r = q / scale
    x = q * xi
    lo = np.floor(x - r).astype(np.int64) + 1
    hi = np.ceil(x + r).astype(np.int64) - 1
    width = int(np.max(hi - lo)) + 1 if P else 1
    offsets = np.indices((width,) * d).reshape(d, -1).T  # (K, d)
    require_work(P * len(offsets) * d, "arc sum")
    out = np.zeros(P, dtype=complex)
    for s in range(0, P, _CHUNK):
        e = min(P, s + _CHUNK)
        ell = lo[s:e, None, :] + offsets[None, :, :]  # (p, K, d)
        ok = np.all(ell <= hi[s:e, None, :], axis=2)
        dist = np.sqrt(np.sum((xi[s:e, None, :] - ell / q) ** 2, axis=2))
        rad = np.where(ok, radial(np.where(ok, dist, 1.0 / scale)), 0.0)
        out[s:e] = np.sum(weight(ell % q) * rad, axis=1)
    return out


def _arc_radial(q_scale: float, lam: float, d: int) -> Callable[[np.ndarray], np.ndarray]:
    def radial(dist: np.ndarray) -> np.ndarray:
        return bump_profile(q_scale * dist) * sphere_ft(d, lam * dist)

    return radial


def _bump_radial(scale: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda dist: bump_profile(scale * dist)


def _gauss_weight(a: int, q: int) -> Callable[[np.ndarray], np.ndarray]:
    T = gauss_1d_table(q)
    return lambda res: np.prod(T[a % q, res], axis=-1)


@lru_cache(maxsize=64)
def _phased_gauss_table(q: int, lambda_sq: int, d: int) -> np.ndarray:
    """W(l) = sum_{a in Z_q^x} e_q(-lambda^2 a) G(a, l, q) for all l in Z_q^d."""
    T = gauss_1d_table(q)
    W = np.zeros((q,) * d, dtype=complex)
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        term = np.exp(-2j * np.pi * ((lambda_sq * a) % q) / q)
        for i in range(d):
            term = np.multiply.outer(term, T[a]) if i else term * T[a]
        W += term
    W.flags.writeable = False
    return W


def _table_weight(W: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    return lambda res: W[tuple(np.moveaxis(res, -1, 0))]


def _as_grid(values: np.ndarray, d: int, M: int) -> FreqMultiplier:
    return FreqMultiplier(d, M, values.reshape((M,) * d))


def _points(d: int, M: int, points: np.ndarray | None) -> np.ndarray:
    return dual_grid_points(d, M) if points is None else np.atleast_2d(np.asarray(points, dtype=float))


def _check_lambda(lambda_sq: int) -> float:
    if lambda_sq < 0 or int(lambda_sq) != lambda_sq:
        raise DomainError("lambda_sq must be a nonnegative integer")
    return math.sqrt(lambda_sq)


def arc_multiplier_caq(a: int, q: int, lambda_sq: int, d: int, M: int, points: np.ndarray | None = None):
    """c^{a/q}(xi) = sum_l G(a, l, q) psi~(q |xi - l/q|) dsigma~_lambda(xi - l/q).

    Returns a FreqMultiplier on the full grid, or raw values at ``points``.
    """
    if q < 1 or q > M:
        raise DomainError(f"need 1 <= q <= M (q={q}, M={M})")
    lam = _check_lambda(lambda_sq)
    xi = _points(d, M, points)
    vals = arc_sum(xi, q, q, _gauss_weight(a, q), _arc_radial(q, lam, d))
    return vals if points is not None else _as_grid(vals, d, M)


def volume_factor(lambda_sq: int, d: int) -> float:
    """omega_d lambda^{d-2} / s_lambda with omega_d = pi^{d/2} / Gamma(d/2).

    omega_d lambda^{d-2} is the density of |x|^2 at lambda^2, so the arc sum
    times this factor approximates the normalized lattice-sphere multiplier.
    """
    s = int(rep_counts_fft(d, int(lambda_sq)).counts[int(lambda_sq)])
    if s == 0:
        raise DomainError(f"no lattice points on the sphere |n|^2 = {lambda_sq} in d = {d}")
    return math.pi ** (d / 2) / math.gamma(d / 2) * lambda_sq ** ((d - 2) / 2) / s


def c_lambda(
    lambda_sq: int, d: int, M: int, N_arcs: int | None = None, points: np.ndarray | None = None, normalized: bool = True
):
    """Major-arc approximation sum_{q <= N_arcs} sum_{a in Z_q^x} e_q(-lambda^2 a) c^{a/q}.

    ``N_arcs`` defaults to floor(lambda). With ``normalized`` the sum is
    multiplied by ``volume_factor`` so that it is comparable to the averaging
    multiplier, which has value 1 at xi = 0.
    """
    lam = _check_lambda(lambda_sq)
    if N_arcs is None:
        N_arcs = int(math.isqrt(lambda_sq))
    if N_arcs < 0:
        raise DomainError("N_arcs must be >= 0")
    if N_arcs > M:
        raise DomainError("arcs with q > M do not resolve on the grid")
    xi = _points(d, M, points)
    total = np.zeros(len(xi), dtype=complex)
    for q in range(1, N_arcs + 1):
        W = _phased_gauss_table(q, int(lambda_sq), d)
        total += arc_sum(xi, q, q, _table_weight(W), _arc_radial(q, lam, d))
    if normalized and N_arcs:
        total *= volume_factor(lambda_sq, d)
    return total if points is not None else _as_grid(total, d, M)


def sphere_multiplier_at(d: int, lambda_sq: int, xi: np.ndarray) -> np.ndarray:
    """s^-1 sum_{|n|^2 = lambda^2} exp(-2 pi i n.xi) at arbitrary frequencies.

    Evaluated by iterated convolution of per-coordinate weighted square
    indicators theta_xi(m) = sum_{x^2 = m} cos(2 pi x xi), so the cost is
    independent of the number of sphere points.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    L = int(lambda_sq)
    s = int(rep_counts_fft(d, L).counts[L])
    if s == 0:
        raise DomainError(f"empty sphere |n|^2 = {L}")
    roots = np.arange(0, math.isqrt(L) + 1)
    sq = roots * roots
    out = np.empty(len(xi))
    for st in range(0, len(xi), _CHUNK):
        x = xi[st : st + _CHUNK]
        acc = None
        for i in range(d):
            th = np.zeros((len(x), L + 1))
            c = np.cos(2 * np.pi * roots[None, :] * x[:, i : i + 1])
            th[:, sq] = np.where(roots == 0, 1.0, 2.0)[None, :] * c
            if acc is None:
                acc = th
                continue
            new = np.zeros_like(acc)
            for j, v in enumerate(sq):
                new[:, v:] += acc[:, : L + 1 - v] * th[:, v : v + 1]
            acc = new
        out[st : st + _CHUNK] = acc[:, L]
    return out / s


def error_multiplier_max(lambda_sq: int, d: int, M: int, N_arcs: int | None = None) -> dict:
    """max |A_lambda - C_lambda| over the dual grid, evaluated on orbit representatives."""
    xi, sizes = orbit_representatives(d, M)
    a = sphere_multiplier_at(d, lambda_sq, xi)
    c = c_lambda(lambda_sq, d, M, N_arcs, points=xi)
    e = np.abs(a - c)
    i = int(np.argmax(e))
    return {
        "max_error": float(e[i]),
        "argmax_xi": xi[i].tolist(),
        "max_A": float(np.max(np.abs(a))),
        "max_C": float(np.max(np.abs(c))),
        "C_at_zero": float(np.real(c[0])),
        "n_representatives": int(len(xi)),
        "grid_points_covered": int(sizes.sum()),
    }


def msw_single_arc(q_max: int, lambda_sq: int, d: int, M: int) -> MomentReport:
    """max_q max_a max_xi |c^{a/q}| q^{d/2}: the constant in the single-arc l2 bound at fixed lambda."""
    xi, _ = orbit_representatives(d, M)
    per_q = {}
    for q in range(1, q_max + 1):
        # Gauss weights are not permutation-invariant in general, so use the full grid when it fits
        pts = dual_grid_points(d, M) if M**d <= 2**20 else xi
        best = 0.0
        for a in range(q):
            if math.gcd(a, q) != 1:
                continue
            best = max(best, float(np.max(np.abs(arc_multiplier_caq(a, q, lambda_sq, d, M, points=pts)))))
        per_q[q] = best * q ** (d / 2)
    return MomentReport(
        parameters={"q_max": q_max, "lambda_sq": lambda_sq, "d": d, "M": M},
        value=max(per_q.values()),
        extra={"per_q": per_q},
    )


# --------------------------------------------------------------------------
# Composite (single-modulus) multipliers


def composite_multipliers(Q: int, lambda_sq: int, d: int, M: int) -> tuple[FreqMultiplier, FreqMultiplier, FreqMultiplier]:
    """(b, u, t) for modulus Q, with a summed over all of [0, Q).

    b(xi) = sum_a sum_l G(a,l,Q) psi~(4Q |xi - l/Q|) dsigma~_lambda(xi - l/Q)
    u(xi) = sum_a sum_l G(a,l,Q) psi~(2Q |xi - l/Q|)
    t(xi) = sum_l psi~(4Q |xi - l/Q|) dsigma~_lambda(xi - l/Q)

    The u-arcs have disjoint supports and psi~(2Q .) = 1 on the support of
    psi~(4Q .), so b = t * u holds pointwise.
    """
    if Q < 1:
        raise DomainError("Q must be >= 1")
    if 4 * Q > M:
        raise DomainError(f"need Q <= M/4 for disjoint arcs on the grid (Q={Q}, M={M})")
    lam = _check_lambda(lambda_sq)
    xi = dual_grid_points(d, M)
    T = gauss_1d_table(Q)
    W = np.zeros((Q,) * d, dtype=complex)
    for a in range(Q):
        term = T[a]
        for _ in range(d - 1):
            term = np.multiply.outer(term, T[a])
        W += term
    wfun = _table_weight(W)
    one = lambda res: np.ones(res.shape[:-1])  # noqa: E731
    b = arc_sum(xi, Q, 4 * Q, wfun, _arc_radial(4 * Q, lam, d))
    u = arc_sum(xi, Q, 2 * Q, wfun, _bump_radial(2 * Q))
    t = arc_sum(xi, Q, 4 * Q, one, _arc_radial(4 * Q, lam, d))
    return _as_grid(b, d, M), _as_grid(u, d, M), _as_grid(t, d, M)


def u_kernel_torus(Q: int, d: int, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Kernel of u on the torus of side L, computed two ways.

    Returns (assembled, closed): the inverse DFT of u sampled on the dual grid
    (Gauss-sum route) and Q 1[Q | |m|^2] times the inverse DFT of the sampled
    bump psi~(2Q .) (closed-form route). Both equal the L-periodization of the
    lattice kernel exactly, so they agree to rounding.
    """
    if L % Q or 4 * Q > L:
        raise DomainError("need Q | L and L >= 4Q")
    _, u, _ = composite_multipliers(Q, 0, d, L)
    assembled = np.fft.ifftn(u.values)
    xi = dual_grid_points(d, L)
    bump = arc_sum(xi, 1, 2 * Q, lambda res: np.ones(res.shape[:-1]), _bump_radial(2 * Q)).reshape((L,) * d)
    m = np.indices((L,) * d).reshape(d, -1)
    delta = ((m * m).sum(axis=0) % Q == 0).reshape((L,) * d)
    closed = Q * delta * np.fft.ifftn(bump)
    return assembled, closed


def u_kernel_images(Q: int, d: int, L: int, m: np.ndarray, reach: int = 1) -> np.ndarray:
    """Periodization sum_j U(m + L j) over |j|_inf <= reach of the lattice kernel Q psi_{2Q} delta."""
    psi = BumpProfile(d)
    m = np.atleast_2d(np.asarray(m, dtype=np.int64))
    js = np.indices((2 * reach + 1,) * d).reshape(d, -1).T - reach
    out = np.zeros(len(m))
    for j in js:
        x = m + L * j
        n2 = (x * x).sum(axis=1)
        out += Q * (n2 % Q == 0) * psi.spatial_scaled(np.sqrt(n2), 2 * Q)
    return out


# --------------------------------------------------------------------------
# Hybrid kernels


BAND_WIDTHS = 15.0
MASS_TOL = 5e-3


@dataclass(frozen=True)
class HybridKernel:
    """Radial lattice kernel stored per shell |n|^2 = r.

    ``K`` holds the float radial factor, ``C`` the exact integer factor
    C_N(lambda^2 - r) (all ones for a bare K kernel), ``multiplicity`` holds
    r_d(r). The value at a lattice point n is K[r] * C[r] with r = |n|^2.
    """

    d: int
    lambda_sq: int
    N: int
    width: float
    shells: np.ndarray
    multiplicity: np.ndarray
    K: np.ndarray
    C: np.ndarray

    @property
    def samples(self) -> np.ndarray:
        return self.K * self.C

    def value_at(self, n) -> float:
        r = int(np.sum(np.asarray(n, dtype=np.int64) ** 2))
        i = np.searchsorted(self.shells, r)
        if i < len(self.shells) and self.shells[i] == r:
            return float(self.samples[i])
        return 0.0

    def mass(self) -> float:
        return float(np.sum(self.multiplicity * self.samples))

    def peak(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def negative_mass(self) -> float:
        """Total weight of the negative samples (the spatial bump has sign-changing lobes)."""
        return float(np.sum(self.multiplicity * np.minimum(self.samples, 0.0)))

    def band_mass(self, widths: float) -> float:
        """Mass on shells with ||n| - lambda| <= widths * width."""
        near = np.abs(np.sqrt(self.shells) - math.sqrt(self.lambda_sq)) <= widths * self.width
        return float(np.sum(self.multiplicity[near] * self.samples[near]))


def mollified_sphere(d: int, lam: float, width: float, rho: np.ndarray) -> np.ndarray:
    """(psi_width * sigma_lambda)(x) at |x| = rho, sigma_lambda the sphere probability measure.

    Radial inverse transform of psi~(width s) dsigma~_1(lambda s) over s in [0, 1/width].
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    nodes, weights = _gl_rule()
    s = nodes / width
    w = weights / width
    F = bump_profile(nodes) * sphere_ft(d, lam * s)
    nu = d / 2 - 1
    out = np.empty_like(rho)
    small = rho < 1e-9
    out[small] = sphere_area(d) * np.sum(w * F * s ** (d - 1))
    idx = np.flatnonzero(~small)
    for st in range(0, len(idx), 4096):
        sel = idx[st : st + 4096]
        rr = rho[sel, None]
        out[sel] = 2 * np.pi * rho[sel] ** (-nu) * np.sum(w * F * besselj(nu, 2 * np.pi * rr * s) * s ** (d / 2), axis=1)
    return out


def k_kernel(lambda_sq: int, N: int, d: int, truncation_floor: float = 1e-9, width: float | None = None) -> HybridKernel:
    """K = psi_{lambda/N} * dsigma_lambda sampled on lattice shells.

    Shells within ``BAND_WIDTHS`` widths of the sphere are evaluated; those with
    |K| below ``truncation_floor`` times the peak are dropped. ``width``
    overrides the default lambda/N (for the lambda/N^beta flatness variant).
    When width > 1 the exact lattice mass is 1 (Poisson summation), and a
    deficit above MASS_TOL raises PrecisionError.
    """
    lam = _check_lambda(lambda_sq)
    if N < 1 or lam == 0:
        raise DomainError("need N >= 1 and lambda > 0")
    w = lam / N if width is None else float(width)
    if w <= 0:
        raise DomainError("width must be positive")
    hi = int(math.floor((lam + BAND_WIDTHS * w) ** 2))
    lo = int(math.ceil(max(0.0, lam - BAND_WIDTHS * w) ** 2))
    require_work((hi - lo + 1) * 2 * len(_gl_rule()[0]), "k_kernel shells")
    counts = rep_counts_fft(d, hi).counts
    shells = np.arange(lo, hi + 1, dtype=np.int64)
    shells = shells[counts[shells] > 0]
    K = mollified_sphere(d, lam, w, np.sqrt(shells))
    keep = np.abs(K) >= truncation_floor * np.max(np.abs(K))
    shells, K = shells[keep], K[keep]
    mult = counts[shells].astype(float)
    ker = HybridKernel(d, int(lambda_sq), N, w, shells, mult, K, np.ones(len(shells), dtype=np.int64))
    if w > 1 and abs(ker.mass() - 1) > MASS_TOL:
        raise PrecisionError(f"lattice mass {ker.mass():.6f} deviates from 1; truncation floor too aggressive")
    return ker


def m12_kernel(lambda_sq: int, N: int, d: int, truncation_floor: float = 1e-9) -> HybridKernel:
    """K(n) * C_N(lambda^2 - |n|^2) over the sampled shells."""
    k = k_kernel(lambda_sq, N, d, truncation_floor)
    C, _ = partial_sum_table(N, int(lambda_sq) - k.shells)
    return HybridKernel(d, k.lambda_sq, N, k.width, k.shells, k.multiplicity, k.K, C)


def flatness_beta(d: int) -> float:
    return (d - 2) / (d - 1)


def psi2_statistic(lambda_sq: int, N: int, j: int, d: int) -> MomentReport:
    """[sum_n K(n) |C_N(lambda^2 - |n|^2)|^j]^{1/j} from the m12 kernel samples.

    K is signed (the mollified kernel has small negative lobes); the sum with
    |K| is reported alongside. Reports are flagged low-confidence when
    lambda < N^2 or lambda/N < 2.
    """
    if j < 2 or j % 2:
        raise DomainError("j must be an even integer >= 2")
    ker = m12_kernel(lambda_sq, N, d)
    lam = math.sqrt(lambda_sq)
    powC = np.abs(ker.C).astype(float) ** j
    total = float(np.sum(ker.multiplicity * ker.K * powC))
    if total < 0:
        raise NumericalIntegrityError(f"negative weighted moment {total}")
    abs_total = float(np.sum(ker.multiplicity * np.abs(ker.K) * powC))
    return MomentReport(
        parameters={"lambda_sq": int(lambda_sq), "N": N, "j": j, "d": d},
        value=total ** (1 / j),
        extra={
            "total": total,
            "abs_kernel_value": abs_total ** (1 / j),
            "kernel_mass": float(np.sum(ker.multiplicity * ker.K)),
            "shells": int(len(ker.shells)),
            "beta": flatness_beta(d),
            "low_confidence": bool(lam < N * N or lam / N < 2),
        },
    )


def psi2_direct(lambda_sq: int, N: int, j: int, d: int, band: float = 1.0) -> tuple[float, float]:
    """Psi_2 over the annulus ||n| - lambda| <= band * lambda/N, two independent ways.

    Returns (direct, shell): the direct value enumerates lattice points in a box
    and evaluates C_N per point from the Moebius form of c_q; the shell value
    uses r_d multiplicities and the periodic c_q tables.
    """
    lam = math.sqrt(lambda_sq)
    w = lam / N
    R = lam + band * w
    Rint = int(math.floor(R))
    lo2 = max(0.0, lam - band * w) ** 2
    hi2 = R * R
    if d < 3:
        raise DomainError("direct enumeration is implemented for d >= 3")
    require_work((2 * Rint + 1) ** d, "psi2 direct enumeration")
    axis = np.arange(-Rint, Rint + 1, dtype=np.int64)
    sq = axis * axis
    rest = sq
    for _ in range(d - 3):
        rest = np.add.outer(rest, sq).reshape(-1)
    rest = np.unique(rest, return_counts=True)
    # accumulate a histogram of |n|^2 over the box, first coordinate by coordinate
    hist = np.zeros(int(hi2) + 1, dtype=np.int64)
    vals, cnt = rest
    for a in sq:
        for b in sq:
            r = vals + a + b
            ok = r <= hi2
            np.add.at(hist, r[ok], cnt[ok])
    rs = np.flatnonzero(hist)
    rs = rs[(rs >= lo2) & (rs <= hi2)]
    Kr = mollified_sphere(d, lam, w, np.sqrt(rs))
    Cd = np.array([sum(ramanujan_sum(q, int(lambda_sq) - int(r), mode="moebius_gcd") for q in range(1, N + 1)) for r in rs])
    direct = float(np.sum(hist[rs] * Kr * np.abs(Cd).astype(float) ** j)) ** (1 / j)
    counts = rep_counts_fft(d, int(hi2)).counts
    shells = np.arange(int(math.ceil(lo2)), int(hi2) + 1)
    shells = shells[counts[shells] > 0]
    C, _ = partial_sum_table(N, int(lambda_sq) - shells)
    Ks = mollified_sphere(d, lam, w, np.sqrt(shells))
    shell = float(np.sum(counts[shells] * Ks * np.abs(C).astype(float) ** j)) ** (1 / j)
    return direct, shell
