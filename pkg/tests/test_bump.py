import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from lacsphere import bump


def test_profile_examples():
    assert bump.bump_profile(0.4) == 1.0
    assert bump.bump_profile(1.1) == 0.0
    v = bump.bump_profile(0.75)
    assert 0 < v < 1
    assert bump.bump_profile(0.74) >= v >= bump.bump_profile(0.76)


@given(st.floats(0, 5))
def test_sandwich(r):
    assert bump.BumpProfile(5).sandwich_holds(r)


def test_profile_monotone():
    r = np.linspace(0.5, 1.0, 2001)
    assert np.all(np.diff(bump.bump_profile(r)) <= 0)


def test_spatial_bump_one_dimension_against_quad():
    # d = 1: psi(x) = 2 int_0^1 psi~(s) cos(2 pi x s) ds
    for x in (0.0, 0.3, 1.7, 4.0):
        want, _ = integrate.quad(lambda s: 2 * bump.bump_profile(s) * math.cos(2 * math.pi * x * s), 0, 1, limit=200)
        assert bump.spatial_bump(1, [x])[0] == pytest.approx(want, abs=1e-10)


def test_spatial_bump_dimension_recursion():
    # psi_{d+2}(r) = -(1 / (2 pi r)) d/dr psi_d(r) for radial Fourier pairs
    r = np.array([0.4, 1.1, 2.5])
    h = 1e-4
    deriv = (bump.spatial_bump(3, r + h) - bump.spatial_bump(3, r - h)) / (2 * h)
    assert np.allclose(bump.spatial_bump(5, r), -deriv / (2 * np.pi * r), atol=1e-7)


def test_spatial_table_matches_direct():
    p = bump.BumpProfile(5)
    r = np.array([0.0, 0.123, 2.71, 9.99, 33.3, 45.0])
    assert np.allclose(p.spatial(r), bump.spatial_bump(5, r), atol=1e-9)


def test_spatial_mass_is_profile_at_zero():
    # int psi = psi~(0) = 1
    p = bump.BumpProfile(3)
    r = np.linspace(0, 40, 40001)
    mass = np.trapezoid(p.spatial(r) * 4 * np.pi * r**2, r)
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_decay_certificate_dominates_table():
    p = bump.BumpProfile(5)
    cert = p.decay_certificate()
    r = np.linspace(3, 40, 5000)
    assert np.all(np.abs(p.spatial(r)) <= cert(r))
    assert cert.rate > 0
    assert abs(p.spatial(np.array([40.0]))[0]) < 1e-8


def test_sphere_ft_basics():
    assert bump.sphere_ft(5, 0.0) == 1.0
    assert bump.sphere_ft(3, 0.5) == pytest.approx(math.sin(math.pi) / math.pi, abs=1e-15)
    assert isinstance(bump.sphere_ft(5, 0.1), float)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_sphere_ft_quadrature(d):
    for x in (0.1, 0.7, 2.3, 5.0):
        assert bump.sphere_ft(d, x) == pytest.approx(bump.sphere_ft_quadrature(d, x), abs=1e-6)


def test_sphere_ft_rejects_d1():
    from lacsphere.errors import DomainError

    with pytest.raises(DomainError):
        bump.sphere_ft(1, 0.3)


def test_stationary_decay_fit_d3():
    slope, _, _ = bump.stationary_decay_fit(3, samples=50001)
    assert slope == pytest.approx(-1.0, abs=0.05)
