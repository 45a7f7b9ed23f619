"""The smooth cutoff and the continuous sphere's Fourier transform.

Fourier convention: f~(xi) = int f(x) exp(-2 pi i x.xi) dx. The cutoff is the
radial profile psi~(|xi|), equal to 1 on [0, 1/2] and 0 on [1, inf), with an
exp(-1/x) transition. Its spatial counterpart psi is obtained by a Hankel
transform; psi_t(x) = t^-d psi(x/t) has Fourier transform psi~(t xi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special
from scipy.interpolate import CubicSpline

from .errors import DomainError, NumericalIntegrityError

_GL_NODES = 400


def _h(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a, b = _h(x), _h(1.0 - x)
    return a / (a + b)


def bump_profile(r) -> np.ndarray | float:
    """psi~ as a function of |xi|."""
    out = smooth_step(2.0 - 2.0 * np.asarray(r, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def besselj(nu: float, x: np.ndarray) -> np.ndarray:
    """J_nu, routed through spherical Bessel functions for half-integer order."""
    n = nu - 0.5
    if n >= 0 and float(n).is_integer():
        x = np.asarray(x, dtype=float)
        return np.sqrt(2 * x / np.pi) * special.spherical_jn(int(n), x)
    return special.jv(nu, x)


@lru_cache(maxsize=None)
def _gl_rule() -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    nodes = np.concatenate([0.25 * x + 0.25, 0.25 * x + 0.75])
    weights = np.concatenate([0.25 * w, 0.25 * w])
    return nodes, weights


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^{d-1}."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def spatial_bump(d: int, r) -> np.ndarray:
    """psi(r) at unit scale, by Gauss-Legendre Hankel quadrature over supp psi~ = [0, 1].

    Accurate to roughly 1e-12 absolute for r <= 60.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s, w = _gl_rule()
    prof = bump_profile(s)
    nu = d / 2 - 1
    out = np.empty_like(r)
    small = r < 1e-9
    out[small] = sphere_area(d) * np.sum(w * prof * s ** (d - 1))
    big = ~small
    for lo in range(0, int(big.sum()), 4096):
        rr = r[big][lo : lo + 4096, None]
        vals = 2 * np.pi * rr[:, 0] ** (-nu) * np.sum(w * prof * besselj(nu, 2 * np.pi * rr * s) * s ** (d / 2), axis=1)
        idx = np.flatnonzero(big)[lo : lo + 4096]
        out[idx] = vals
    return out


@dataclass(frozen=True)
class DecayCertificate:
    """|psi(r)| <= amplitude * exp(-rate * sqrt(r)) for r >= r_min (unit scale).

    The bound is fitted to the running-max envelope of tabulated psi on
    [r_min, r_max] and then inflated so it dominates every sample; beyond
    r_max it is an extrapolation.
    """

    d: int
    amplitude: float
    rate: float
    r_min: float
    r_max: float

    def __call__(self, r) -> np.ndarray:
        return self.amplitude * np.exp(-self.rate * np.sqrt(np.asarray(r, dtype=float)))

    def shell_integral(self, rho: float, shift: float = 0.0) -> float:
        """int_{rho}^inf E(u - shift) u^{d-1} du."""
        if rho - shift < self.r_min:
            raise DomainError(f"certificate valid for r >= {self.r_min}, asked from {rho - shift}")
        val, _ = integrate.quad(lambda u: float(self(u - shift)) * u ** (self.d - 1), rho, np.inf, limit=200)
        return float(val)


@dataclass(frozen=True)
class BumpProfile:
    """The cutoff psi~ together with tabulated spatial samples and a decay certificate."""

    d: int
    r_table_max: float = 40.0
    table_step: float = 0.004

    def __call__(self, r):
        return bump_profile(r)

    def sandwich_holds(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        v = np.asarray(bump_profile(r))
        lower = (r <= 0.5).astype(float)
        upper = (r <= 1.0).astype(float)
        return bool(np.all(lower <= v) and np.all(v <= upper))

    def spatial(self, r) -> np.ndarray:
        """psi(r) at unit scale (interpolated on [0, r_table_max], direct beyond)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        spline = _spatial_spline(self.d, self.r_table_max, self.table_step)
        out = np.empty_like(r)
        inside = r <= self.r_table_max
        out[inside] = spline(r[inside])
        if np.any(~inside):
            out[~inside] = spatial_bump(self.d, r[~inside])
        return out

    def spatial_scaled(self, x_norm, t: float) -> np.ndarray:
        """psi_t at points of norm x_norm: t^-d psi(x_norm / t)."""
        return t ** (-self.d) * self.spatial(np.asarray(x_norm, dtype=float) / t)

    def decay_certificate(self, r_min: float = 3.0) -> DecayCertificate:
        return _certificate(self.d, r_min, self.r_table_max, self.table_step)


@lru_cache(maxsize=None)
def _spatial_table(d: int, r_max: float, step: float) -> tuple[np.ndarray, np.ndarray]:
    grid = np.arange(0.0, r_max + step / 2, step)
    return grid, spatial_bump(d, grid)


@lru_cache(maxsize=None)
def _spatial_spline(d: int, r_max: float, step: float) -> CubicSpline:
    return CubicSpline(*_spatial_table(d, r_max, step))


@lru_cache(maxsize=None)
def _certificate(d: int, r_min: float, r_max: float, step: float) -> DecayCertificate:
    grid, vals = _spatial_table(d, r_max, step)
    keep = grid >= r_min
    grid, vals = grid[keep], np.abs(vals[keep])
    env = np.maximum.accumulate(vals[::-1])[::-1]
    root = np.sqrt(grid)
    rate, _ = np.polyfit(root, np.log(env), 1)
    rate = -float(rate)
    if rate <= 0:
        raise NumericalIntegrityError("spatial bump envelope is not decaying")
    amp = float(np.max(env * np.exp(rate * root))) * 1.01
    return DecayCertificate(d, amp, rate, r_min, r_max)


# --------------------------------------------------------------------------
# Sphere measure


def sphere_ft(d: int, xi_norm) -> np.ndarray | float:
    """Fourier transform of the uniform probability measure on the unit sphere in R^d.

    Gamma(d/2) (pi r)^{-nu} J_nu(2 pi r) with nu = (d-2)/2; equals 1 at r = 0.
    """
    if d < 2:
        raise DomainError("sphere_ft needs d >= 2")
    r = np.asarray(xi_norm, dtype=float)
    nu = (d - 2) / 2
    out = np.ones_like(r)
    nz = r > 1e-12
    rr = r[nz]
    with np.errstate(all="raise"):
        try:
            out[nz] = math.gamma(d / 2) * (np.pi * rr) ** (-nu) * besselj(nu, 2 * np.pi * rr)
        except FloatingPointError as exc:
            raise NumericalIntegrityError(f"Bessel evaluation failed: {exc}") from None
    if not np.all(np.isfinite(out)):
        raise NumericalIntegrityError("non-finite sphere transform")
    return float(out) if out.ndim == 0 else out


def sphere_ft_quadrature(d: int, xi_norm: float) -> float:
    """Same transform by direct quadrature of the zonal integral.

    int_{-1}^{1} cos(2 pi r t) (1 - t^2)^{(d-3)/2} dt / B(1/2, (d-1)/2).
    """
    if d < 2:
        raise DomainError("sphere_ft_quadrature needs d >= 2")
    alpha = (d - 3) / 2
    norm = special.beta(0.5, (d - 1) / 2)
    val, _ = integrate.quad(
        lambda t: math.cos(2 * math.pi * xi_norm * t), -1, 1, weight="alg", wvar=(alpha, alpha), limit=max(200, int(40 * xi_norm))
    )
    return val / norm


def stationary_decay_fit(d: int, lo: float = 2.0, hi: float = 100.0, samples: int = 200_001) -> tuple[float, np.ndarray, np.ndarray]:
    """Log-log slope of the local maxima of |sphere_ft| over [lo, hi].

    Returns (slope, peak_positions, peak_values).
    """
    r = np.linspace(lo, hi, samples)
    v = np.abs(sphere_ft(d, r))
    peaks = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    slope = np.polyfit(np.log(r[peaks]), np.log(v[peaks]), 1)[0]
    return float(slope), r[peaks], v[peaks]
