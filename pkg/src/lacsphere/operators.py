"""Spherical averages, maximal and stopping-time operators on the torus (Z/MZ)^d."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .config import current_limits
from .errors import DomainError, NumericalIntegrityError
from .lattice import RadiusSequence, SphereKernel, enumerate_sphere
from .report import MomentReport


@dataclass(frozen=True)
class GridFunction:
    """A function on (Z/MZ)^d stored as a read-only array of shape (M,)*d.

    ``is_set`` marks 0/1 indicator data. Object arrays of Fractions are
    allowed for exact arithmetic.
    """

    d: int
    M: int
    values: np.ndarray
    is_set: bool = False

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.shape != (self.M,) * self.d:
            raise DomainError(f"values shape {vals.shape} does not match (M,)*d = {(self.M,) * self.d}")
        if vals.dtype != object and not np.all(np.isfinite(vals)):
            raise DomainError("grid values must be finite")
        if vals is self.values:
            vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def indicator(cls, d: int, M: int, mask: np.ndarray) -> "GridFunction":
        return cls(d, M, np.asarray(mask, dtype=bool).astype(float), is_set=True)

    @classmethod
    def delta(cls, d: int, M: int, at: Sequence[int] | None = None) -> "GridFunction":
        v = np.zeros((M,) * d)
        v[tuple(at) if at is not None else (0,) * d] = 1.0
        return cls(d, M, v)

    @classmethod
    def constant(cls, d: int, M: int, c: float = 1.0) -> "GridFunction":
        return cls(d, M, np.full((M,) * d, float(c)))

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def measure(self) -> int:
        """|F| for indicator data."""
        return int(np.count_nonzero(self.values))

    def norm(self, p: float) -> float:
        v = np.abs(self.values.astype(float))
        if math.isinf(p):
            return float(v.max())
        return float(np.sum(v**p) ** (1 / p))

    def inner(self, other: "GridFunction"):
        return np.sum(self.values * np.conj(other.values) if not self.exact else self.values * other.values)

    def translate(self, y: Sequence[int]) -> "GridFunction":
        """x -> f(x - y)."""
        return GridFunction(self.d, self.M, np.roll(self.values, tuple(y), axis=tuple(range(self.d))), self.is_set)

    def to_exact(self) -> "GridFunction":
        vals = np.empty(self.values.shape, dtype=object)
        flat = vals.reshape(-1)
        for i, v in enumerate(self.values.reshape(-1).tolist()):
            flat[i] = Fraction(v)
        return GridFunction(self.d, self.M, vals, self.is_set)


@dataclass(frozen=True)
class StoppingTime:
    d: int
    M: int
    k_index: np.ndarray

    def __post_init__(self) -> None:
        k = np.asarray(self.k_index, dtype=np.int64)
        if k.shape != (self.M,) * self.d:
            raise DomainError("stopping time shape mismatch")
        k.flags.writeable = False
        object.__setattr__(self, "k_index", k)

    @classmethod
    def constant(cls, d: int, M: int, k: int) -> "StoppingTime":
        return cls(d, M, np.full((M,) * d, k, dtype=np.int64))

    def check(self, seq: RadiusSequence) -> None:
        if self.k_index.min() < 0 or self.k_index.max() >= len(seq):
            raise DomainError(f"stopping time indexes outside [0, {len(seq)})")


def _axes(d: int) -> tuple[int, ...]:
    return tuple(range(d))


def _check_no_wrap(f: GridFunction, radius_sq: int) -> None:
    lam = math.isqrt(radius_sq - 1) + 1 if radius_sq else 0  # ceil(sqrt)
    if f.M <= 2 * lam:
        raise DomainError(f"no-wrap needs M > 2*lambda (M={f.M}, lambda^2={radius_sq})")
    c = np.arange(f.M)
    c = np.where(c >= (f.M + 1) // 2, c - f.M, c)  # centered coordinates
    for ax in np.nonzero(f.values):
        if ax.size and int(np.max(np.abs(c[ax]))) + lam > (f.M - 1) // 2:
            raise DomainError("support of f plus the sphere leaves the central box; wrap-around would occur")


def sphere_multiplier_grid(kernel: SphereKernel, M: int) -> np.ndarray:
    """DFT of the normalized sphere kernel on (Z/MZ)^d: s^-1 sum_n exp(-2 pi i n.k/M)."""
    if kernel.empty:
        raise DomainError("empty sphere kernel")
    K = np.zeros((M,) * kernel.d)
    np.add.at(K, tuple((kernel.points % M).T), 1.0)
    return np.fft.fftn(K / kernel.size)


def spherical_average(
    f: GridFunction, kernel: SphereKernel, method: str = "spatial", no_wrap: bool = False
) -> GridFunction:
    """A_lambda f(x) = s^-1 sum_{|n|^2 = lambda^2} f(x - n) with torus wrap-around.

    ``method``: ``spatial`` (sum of shifted copies), ``fft`` (DFT multiplier)
    or ``exact`` (Fraction arithmetic; result is bit-exact).
    """
    if kernel.empty:
        raise DomainError("spherical average over an empty sphere")
    if kernel.d != f.d:
        raise DomainError("kernel and grid dimensions differ")
    if no_wrap:
        _check_no_wrap(f, kernel.lambda_sq)
    axes = _axes(f.d)
    if method == "fft":
        mult = sphere_multiplier_grid(kernel, f.M)
        out = np.fft.ifftn(np.fft.fftn(f.values.astype(float)) * mult).real
        return GridFunction(f.d, f.M, out)
    if method == "exact":
        src = f.values if f.exact else f.to_exact().values
        acc = np.zeros(src.shape, dtype=object)
        acc[...] = 0
        for n in kernel.points:
            acc = acc + np.roll(src, tuple(int(v) for v in n), axis=axes)
        w = Fraction(1, kernel.size)
        return GridFunction(f.d, f.M, acc * w)
    if method == "spatial":
        src = f.values.astype(float)
        acc = np.zeros(src.shape)
        for n in kernel.points:
            acc += np.roll(src, tuple(int(v) for v in n), axis=axes)
        return GridFunction(f.d, f.M, acc / kernel.size)
    raise DomainError(f"unknown averaging method {method!r}")


def _averages(f: GridFunction, seq: RadiusSequence, method: str, no_wrap: bool) -> list[GridFunction]:
    if method == "fft":
        fh = np.fft.fftn(f.values.astype(float))
        out = []
        for r2 in seq.lambda_sq:
            ker = enumerate_sphere(f.d, r2)
            if no_wrap:
                _check_no_wrap(f, r2)
            out.append(GridFunction(f.d, f.M, np.fft.ifftn(fh * sphere_multiplier_grid(ker, f.M)).real))
        return out
    return [spherical_average(f, enumerate_sphere(f.d, r2), method, no_wrap) for r2 in seq.lambda_sq]


def maximal_function(
    f: GridFunction, seq: RadiusSequence, method: str = "fft", no_wrap: bool = False, return_argmax: bool = False
):
    """Pointwise sup over the sequence of A_lambda f; ties resolve to the lowest index."""
    if len(seq) == 0:
        raise DomainError("empty radius sequence")
    avgs = _averages(f, seq, method, no_wrap)
    stack = np.stack([a.values for a in avgs])
    best = np.argmax(stack, axis=0)  # first maximal index wins
    out = GridFunction(f.d, f.M, np.take_along_axis(stack, best[None], axis=0)[0])
    if return_argmax:
        return out, StoppingTime(f.d, f.M, best)
    return out


def stopping_time_apply(f: GridFunction, seq: RadiusSequence, tau: StoppingTime, method: str = "fft") -> GridFunction:
    """x -> A_{lambda_{tau(x)}} f(x)."""
    tau.check(seq)
    if (tau.d, tau.M) != (f.d, f.M):
        raise DomainError("stopping time grid differs from f")
    stack = np.stack([a.values for a in _averages(f, seq, method, False)])
    return GridFunction(f.d, f.M, np.take_along_axis(stack, tau.k_index[None], axis=0)[0])


def pairing_ratio(F: GridFunction, G: GridFunction, seq: RadiusSequence, p: float) -> MomentReport:
    """<sup_k A_{lambda_k} 1_F, 1_G> / (|F|^{1/p} |G|^{1/p'})."""
    if not 1 < p < math.inf:
        raise DomainError("need 1 < p < inf")
    nF, nG = F.measure, G.measure
    if nF == 0 or nG == 0:
        raise DomainError("F and G must be nonempty")
    mf = maximal_function(F, seq)
    num = float(np.sum(mf.values * G.values))
    pp = p / (p - 1)
    return MomentReport(
        parameters={"p": p, "lambda_sq": list(seq.lambda_sq), "d": F.d, "M": F.M},
        value=max(num, 0.0) / (nF ** (1 / p) * nG ** (1 / pp)),
        extra={"F": nF, "G": nG, "pairing": num},
    )


def pairing_study(
    d: int, M: int, seq: RadiusSequence, p: float, density: float = 0.125, trials: int = 100, seed: int = 0
) -> MomentReport:
    """Monte-Carlo restricted-type ratios over random sets F, G of the given density.

    The maximum is an empirical lower bound for the restricted-type constant,
    not a certified norm.
    """
    rng = np.random.default_rng(seed)
    mults = [sphere_multiplier_grid(enumerate_sphere(d, r2), M) for r2 in seq.lambda_sq]
    pp = p / (p - 1)
    ratios = []
    for _ in range(trials):
        F = rng.random((M,) * d) < density
        G = rng.random((M,) * d) < density
        if not F.any() or not G.any():
            continue
        fh = np.fft.fftn(F.astype(float))
        sup = np.max(np.stack([np.fft.ifftn(fh * m).real for m in mults]), axis=0)
        ratios.append(float(np.sum(sup[G])) / (F.sum() ** (1 / p) * G.sum() ** (1 / pp)))
    arr = np.asarray(ratios)
    return MomentReport(
        parameters={"d": d, "M": M, "p": p, "density": density, "trials": trials, "seed": seed, "lambda_sq": list(seq.lambda_sq)},
        value=float(arr.max()),
        extra={"mean": float(arr.mean()), "min": float(arr.min()), "std": float(arr.std()), "lower_bound_only": True},
    )


def operator_norm_l2(
    op: Callable[[np.ndarray], np.ndarray],
    d: int,
    M: int,
    adjoint: Callable[[np.ndarray], np.ndarray] | None = None,
    multiplier: np.ndarray | None = None,
    method: str = "lanczos",
    iters: int = 200,
    tol: float = 1e-12,
    seed: int = 0,
) -> MomentReport:
    """Largest singular value of a linear operator on (Z/MZ)^d from op* op.

    ``method="power"`` is plain power iteration; ``"lanczos"`` runs ARPACK's
    Lanczos iteration on the same Hermitian operator, which needs far fewer
    applications when the top of the spectrum is clustered. ``adjoint=None``
    treats ``op`` as self-adjoint. If ``multiplier`` (the operator's DFT
    multiplier) is supplied, the estimate is cross-checked against
    max |multiplier| within 1e-6.
    """
    if M**d > current_limits().grid_points:
        raise DomainError("grid too large for norm estimation")
    adj = adjoint or op
    shape = (M,) * d
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(shape)
    extra: dict = {"method": method}
    if method == "lanczos":
        n = M**d

        def gram(v):
            return np.asarray(adj(op(v.reshape(shape))), dtype=complex).reshape(-1)

        if n <= 2:
            mat = np.column_stack([gram(e) for e in np.eye(n, dtype=complex)])
            top = float(np.max(np.linalg.eigvalsh(mat)))
            extra.update(iterations=n, converged=True)
        else:
            lo = LinearOperator((n, n), matvec=gram, dtype=complex)
            try:
                vals = eigsh(
                    lo, k=1, which="LA", v0=x0.reshape(-1).astype(complex), tol=tol, maxiter=iters * 10, return_eigenvectors=False
                )
                extra.update(converged=True)
            except ArpackNoConvergence as exc:
                vals = exc.eigenvalues if len(exc.eigenvalues) else np.array([np.nan])
                extra.update(converged=False)
            top = float(np.real(vals[0]))
            extra["iterations"] = None
        if not np.isfinite(top):
            raise NumericalIntegrityError("Lanczos iteration returned no eigenvalue")
        sigma = math.sqrt(max(top, 0.0))
    elif method == "power":
        x = x0 / np.linalg.norm(x0)
        sigma = 0.0
        converged = False
        it = 0
        for it in range(1, iters + 1):
            y = adj(op(x))
            nrm = np.linalg.norm(y)
            if nrm == 0:
                sigma, converged = 0.0, True
                break
            new_sigma = math.sqrt(nrm)
            x = y / nrm
            if abs(new_sigma - sigma) <= tol * max(new_sigma, 1.0):
                sigma, converged = new_sigma, True
                break
            sigma = new_sigma
        sigma = float(np.linalg.norm(op(x)))
        extra.update(iterations=it, converged=converged)
    else:
        raise DomainError(f"unknown norm method {method!r}")
    checked = False
    if multiplier is not None:
        ref = float(np.max(np.abs(multiplier)))
        extra["multiplier_max"] = ref
        extra["multiplier_agrees"] = abs(sigma - ref) <= 1e-6 * max(ref, 1.0)
        checked = bool(extra["multiplier_agrees"])
    return MomentReport(parameters={"d": d, "M": M}, value=sigma, oracle_checked=checked, extra=extra)


def multiplier_operator(mult: np.ndarray) -> tuple[Callable, Callable]:
    """(op, adjoint) pair for a DFT multiplier on a real or complex grid."""

    def op(x):
        return np.fft.ifftn(np.fft.fftn(x) * mult)

    def adj(x):
        return np.fft.ifftn(np.fft.fftn(x) * np.conj(mult))

    return op, adj


def error_operator_norm(lambda_sq: int, N_arcs: int | None, d: int, M: int, power_check: bool = False) -> MomentReport:
    """l2 operator norm of A_lambda - C_lambda on (Z/MZ)^d.

    Both operators are convolutions, so the norm is the maximum modulus of the
    difference multiplier. The maximum is taken over frequency orbit
    representatives (the multiplier is invariant under coordinate permutations
    and sign changes). ``power_check`` also runs power iteration on the full
    grid, which is affordable for M^d <= 2^20.
    """
    from .multiplier import c_lambda, error_multiplier_max

    lam = math.sqrt(lambda_sq)
    if lam > M / 2:
        raise DomainError(f"need lambda <= M/2 (lambda={lam:.3g}, M={M})")
    info = error_multiplier_max(lambda_sq, d, M, N_arcs)
    checked = False
    if power_check:
        mult = sphere_multiplier_grid(enumerate_sphere(d, lambda_sq), M) - c_lambda(lambda_sq, d, M, N_arcs).values
        op, adj = multiplier_operator(mult)
        rep = operator_norm_l2(op, d, M, adjoint=adj, multiplier=mult)
        info["power_iteration"] = rep.value
        info["grid_max"] = rep.extra["multiplier_max"]
        checked = abs(info["grid_max"] - info["max_error"]) <= 1e-9 and rep.extra["multiplier_agrees"]
    return MomentReport(
        parameters={"lambda_sq": int(lambda_sq), "N_arcs": N_arcs, "d": d, "M": M},
        value=info["max_error"],
        oracle_checked=checked,
        extra=info,
    )
