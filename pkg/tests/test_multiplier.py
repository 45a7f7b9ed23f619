import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lacsphere import multiplier as mp
from lacsphere.arith import euler_phi, ramanujan_sum
from lacsphere.bump import bump_profile, sphere_ft
from lacsphere.errors import DomainError
from lacsphere.gauss import gauss_1d_table
from lacsphere.lattice import enumerate_sphere
from lacsphere.operators import sphere_multiplier_grid


def test_dual_grid_order():
    ax = mp.dual_grid_axis(8)
    assert ax.tolist() == [0, 0.125, 0.25, 0.375, -0.5, -0.375, -0.25, -0.125]
    pts = mp.dual_grid_points(2, 4)
    assert pts.shape == (16, 2)
    assert pts[1].tolist() == [0.0, 0.25]


@pytest.mark.parametrize("d, M", [(2, 8), (3, 6), (5, 4)])
def test_orbit_sizes_cover_grid(d, M):
    xi, sizes = mp.orbit_representatives(d, M)
    assert sizes.sum() == M**d
    assert np.all(xi >= 0) and np.all(xi <= 0.5)


def test_sphere_multiplier_at_matches_fft():
    d, M = 4, 8
    xi = mp.dual_grid_points(d, M)
    for lam2 in (1, 3, 6):
        grid = sphere_multiplier_grid(enumerate_sphere(d, lam2), M).reshape(-1)
        assert np.max(np.abs(mp.sphere_multiplier_at(d, lam2, xi) - grid)) < 1e-12


@given(st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3), st.integers(1, 20))
def test_sphere_multiplier_at_direct(xi, lam2):
    k = enumerate_sphere(3, lam2)
    if k.empty:
        return
    want = np.mean(np.cos(2 * np.pi * k.points @ np.asarray(xi)))
    assert mp.sphere_multiplier_at(3, lam2, np.asarray([xi]))[0] == pytest.approx(want, abs=1e-12)


def test_caq_single_arc_q1():
    d, M, lam2 = 5, 8, 9
    c = mp.arc_multiplier_caq(0, 1, lam2, d, M)
    xi = mp.dual_grid_points(d, M)
    want = np.zeros(len(xi))
    for ell in np.indices((3,) * d).reshape(d, -1).T - 1:
        r = np.linalg.norm(xi - ell, axis=1)
        want += bump_profile(r) * sphere_ft(d, 3 * r)
    assert np.max(np.abs(c.values.reshape(-1) - want)) < 1e-14
    # near the origin only the l = 0 arc contributes
    assert c.values[(0,) * d] == pytest.approx(1.0, abs=1e-15)


def test_caq_hermitian_and_triangle_bound():
    c = mp.arc_multiplier_caq(1, 2, 4, 5, 16)
    assert c.is_hermitian()
    T = gauss_1d_table(2)
    bound = 2**5 * np.max(np.abs(T[1])) ** 5  # at most 2^d arcs overlap, each |G| <= max
    assert c.max_abs() <= bound + 1e-12


def test_caq_requires_resolution():
    with pytest.raises(DomainError):
        mp.arc_multiplier_caq(1, 9, 4, 3, 8)


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.integers(1, 6), st.integers(0, 5))
def test_arc_sum_against_explicit_lattice(x, y, q, a):
    a = a % q
    xi = np.array([[x, y]])
    lam2 = 7
    got = mp.arc_multiplier_caq(a, q, lam2, 2, 8, points=xi)[0]
    T = gauss_1d_table(q)
    want = 0j
    for l1 in range(-q - 2, q + 3):
        for l2 in range(-q - 2, q + 3):
            dist = math.hypot(x - l1 / q, y - l2 / q)
            want += T[a, l1 % q] * T[a, l2 % q] * bump_profile(q * dist) * sphere_ft(2, math.sqrt(lam2) * dist)
    assert abs(got - want) < 1e-12


def test_c_lambda_is_real_and_normalized():
    C = mp.c_lambda(16, 5, 8)
    assert C.is_hermitian()
    assert np.max(np.abs(C.values.imag)) < 1e-12
    assert C.values[(0,) * 5].real == pytest.approx(1.0, abs=0.1)
    assert mp.c_lambda(16, 5, 8, N_arcs=0).max_abs() == 0


def test_composite_factorization():
    for lam2 in (4, 16):
        b, u, t = mp.composite_multipliers(2, lam2, 5, 16)
        assert np.max(np.abs(b.values - t.values * u.values)) < 1e-9
        assert b.is_hermitian() and u.is_hermitian()


def test_composite_q1():
    d, M = 5, 8
    b, u, t = mp.composite_multipliers(1, 9, d, M)
    r = np.linalg.norm(mp.dual_grid_points(d, M), axis=1)
    assert np.allclose(u.values.reshape(-1), bump_profile(2 * r), atol=1e-14)
    assert np.allclose(t.values.reshape(-1), bump_profile(4 * r) * sphere_ft(d, 3 * r), atol=1e-14)
    assert np.allclose(b.values, t.values * u.values, atol=1e-14)


def test_composite_overlap_rejected():
    with pytest.raises(DomainError):
        mp.composite_multipliers(3, 4, 3, 8)


def test_u_kernel_torus_closed_form():
    for Q, L in ((2, 8), (2, 16), (3, 12)):
        assembled, closed = mp.u_kernel_torus(Q, 5 if L <= 12 else 5, L) if L != 12 else mp.u_kernel_torus(Q, 4, L)
        assert np.max(np.abs(assembled - closed)) < 1e-12 * np.max(np.abs(closed))


def test_u_kernel_torus_against_lattice_kernel():
    assembled, _ = mp.u_kernel_torus(2, 5, 16)
    ms = np.array([[0, 0, 0, 0, 0], [1, 1, 0, 0, 0], [2, 0, 0, 0, 0], [1, 1, 1, 1, 0], [2, 2, 0, 0, 0]])
    ref = mp.u_kernel_images(2, 5, 16, ms)
    got = np.array([assembled[tuple(m)].real for m in ms])
    assert np.max(np.abs(got - ref) / np.abs(ref)) < 1e-3


def test_freq_multiplier_apply_matches_kernel():
    rng = np.random.default_rng(0)
    mult = mp.FreqMultiplier(3, 8, sphere_multiplier_grid(enumerate_sphere(3, 2), 8))
    f = rng.random((8,) * 3)
    direct = np.zeros_like(f)
    kern = mult.kernel().real
    for idx in np.ndindex(*kern.shape):
        if abs(kern[idx]) > 1e-14:
            direct += kern[idx] * np.roll(f, idx, axis=(0, 1, 2))
    assert np.max(np.abs(mult.apply(f) - direct)) < 1e-9


def test_k_kernel_examples():
    k = mp.k_kernel(64, 4, 5)
    assert 0.5 <= k.mass() <= 2
    assert abs(k.mass() - 1) < 5e-3
    # outside the annulus |K| is far below its peak
    far = mp.mollified_sphere(5, 8.0, 2.0, np.array([8.0 + 3 * 2.0 + 0.5]))[0]
    assert abs(far) < 1e-2 * k.peak()
    # the kernel is concentrated near the sphere; psi's sign-changing lobes leave some negative mass
    assert k.band_mass(3) == pytest.approx(1.0, abs=0.1)
    assert -0.5 < k.negative_mass() < 0


def test_k_kernel_flatness_scaling():
    beta = mp.flatness_beta(5)
    vals = []
    for lam in (16, 32):
        for N in (2, 4):
            k = mp.k_kernel(lam * lam, N, 5, width=lam / N**beta)
            vals.append(k.peak() * lam**5 / N**beta)
    assert max(vals) / min(vals) < 2


def test_m12_examples():
    lam2 = 64
    h = mp.m12_kernel(lam2, 3, 5)
    i = int(np.searchsorted(h.shells, lam2))
    assert h.C[i] == sum(euler_phi(q) for q in range(1, 4))
    one = mp.m12_kernel(lam2, 1, 5)
    assert np.array_equal(one.samples, one.K)
    h2 = mp.m12_kernel(64, 2, 5)
    n = (3, 4, 4, 2, 0)
    r = sum(v * v for v in n)
    kval = mp.mollified_sphere(5, 8.0, 4.0, np.array([math.sqrt(r)]))[0]
    cval = sum(ramanujan_sum(q, 64 - r, "direct") for q in (1, 2))
    assert h2.value_at(n) == pytest.approx(kval * cval, rel=1e-12)


def test_psi2_examples():
    rep = mp.psi2_statistic(64, 1, 4, 5)
    assert rep.value == pytest.approx(1.0, abs=5e-3)
    direct, shell = mp.psi2_direct(256, 2, 4, 5)
    assert direct == pytest.approx(shell, rel=1e-12)
    with pytest.raises(DomainError):
        mp.psi2_statistic(64, 2, 3, 5)
    assert mp.psi2_statistic(9, 2, 4, 5).extra["low_confidence"]
    assert not mp.psi2_statistic(64, 2, 4, 5).extra["low_confidence"]


def test_msw_single_arc_constant():
    rep = mp.msw_single_arc(4, 64, 5, 8)
    assert rep.extra["per_q"][1] == pytest.approx(1.0, abs=1e-12)
    assert rep.value <= 2**5 * 2**2.5
