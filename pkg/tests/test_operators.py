from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lacsphere import operators as ops
from lacsphere.errors import DomainError
from lacsphere.lattice import RadiusSequence, enumerate_sphere
from lacsphere.operators import GridFunction, StoppingTime

RNG = np.random.default_rng(7)


def rand_grid(d=5, M=8, seed=0):
    return GridFunction(d, M, np.random.default_rng(seed).random((M,) * d))


def naive_average(f, kernel):
    """Double loop over sites and sphere points, in Fractions."""
    M, d = f.M, f.d
    out = np.empty(f.values.shape, dtype=object)
    w = Fraction(1, kernel.size)
    for x in np.ndindex(*f.values.shape):
        acc = Fraction(0)
        for n in kernel.points:
            acc += Fraction(f.values[tuple((np.asarray(x) - n) % M)])
        out[x] = acc * w
    return out


def test_grid_function_is_immutable():
    g = rand_grid(3, 4)
    with pytest.raises(ValueError):
        g.values[0, 0, 0] = 1.0


def test_grid_function_validation():
    with pytest.raises(DomainError):
        GridFunction(2, 3, np.zeros((3, 4)))
    with pytest.raises(DomainError):
        GridFunction(1, 2, np.array([np.nan, 0.0]))


def test_constants_preserved():
    f = GridFunction.constant(5, 8)
    for method in ("spatial", "fft"):
        out = ops.spherical_average(f, enumerate_sphere(5, 3), method)
        assert np.allclose(out.values, 1.0, atol=1e-12)


def test_delta_example():
    f = GridFunction.delta(5, 8)
    out = ops.spherical_average(f, enumerate_sphere(5, 1), "spatial").values
    assert np.count_nonzero(out) == 10
    for i in range(5):
        for s in (1, -1):
            idx = [0] * 5
            idx[i] = s % 8
            assert out[tuple(idx)] == pytest.approx(0.1, abs=0)


def test_exact_mode_matches_naive_oracle():
    vals = np.random.default_rng(3).integers(0, 5, size=(8,) * 5).astype(float)
    f = GridFunction(5, 8, vals)
    k = enumerate_sphere(5, 2)
    out = ops.spherical_average(f, k, "exact")
    oracle = naive_average(f, k)
    assert all(a == b for a, b in zip(out.values.reshape(-1), oracle.reshape(-1)))


def test_exact_mode_self_adjoint_and_equivariant():
    rng = np.random.default_rng(11)
    f = GridFunction(5, 4, rng.integers(-3, 4, (4,) * 5).astype(float)).to_exact()
    g = GridFunction(5, 4, rng.integers(-3, 4, (4,) * 5).astype(float)).to_exact()
    k = enumerate_sphere(5, 2)
    Af = ops.spherical_average(f, k, "exact")
    Ag = ops.spherical_average(g, k, "exact")
    assert np.sum(Af.values * g.values) == np.sum(f.values * Ag.values)
    y = (1, 3, 0, 2, 1)
    lhs = ops.spherical_average(f.translate(y), k, "exact").values
    rhs = Af.translate(y).values
    assert np.all(lhs == rhs)


@pytest.mark.parametrize("lam2", [1, 2, 3, 5, 9])
@pytest.mark.parametrize("M", [8, 16])
def test_fft_matches_spatial(lam2, M):
    f = rand_grid(5, M, seed=lam2)
    k = enumerate_sphere(5, lam2)
    a = ops.spherical_average(f, k, "spatial").values
    b = ops.spherical_average(f, k, "fft").values
    assert np.max(np.abs(a - b)) < 1e-9


@given(st.integers(1, 12), st.integers(0, 10**6))
def test_positivity_contraction_mass(lam2, seed):
    f = rand_grid(5, 6, seed)
    out = ops.spherical_average(f, enumerate_sphere(5, lam2)).values
    assert out.min() >= 0
    assert out.max() <= f.values.max() + 1e-15
    assert out.sum() == pytest.approx(f.values.sum(), rel=1e-12)


def test_empty_kernel_rejected():
    f = rand_grid(3, 4)
    with pytest.raises(DomainError):
        ops.spherical_average(f, enumerate_sphere(3, 7))


def test_no_wrap_flag():
    f = GridFunction.delta(5, 8)
    ops.spherical_average(f, enumerate_sphere(5, 4), no_wrap=True)
    with pytest.raises(DomainError):
        ops.spherical_average(f, enumerate_sphere(5, 16), no_wrap=True)
    shifted = f.translate((3, 0, 0, 0, 0))
    with pytest.raises(DomainError):
        ops.spherical_average(shifted, enumerate_sphere(5, 4), no_wrap=True)


def test_maximal_examples():
    f = rand_grid()
    seq1 = RadiusSequence((3,))
    single = ops.maximal_function(f, seq1).values
    assert np.allclose(single, ops.spherical_average(f, enumerate_sphere(5, 3)).values, atol=1e-12)
    ones = ops.maximal_function(GridFunction.constant(5, 8), RadiusSequence((1, 2, 4)))
    assert np.allclose(ones.values, 1.0)
    delta = ops.maximal_function(GridFunction.delta(5, 8), RadiusSequence((1, 2))).values
    assert delta[(1, 0, 0, 0, 0)] == pytest.approx(0.1)
    assert delta[(1, 1, 0, 0, 0)] == pytest.approx(1 / 40)
    assert delta[(0,) * 5] == pytest.approx(0, abs=1e-15)


def test_maximal_monotone_in_sequence():
    f = rand_grid(seed=5)
    small = ops.maximal_function(f, RadiusSequence((1, 4))).values
    big = ops.maximal_function(f, RadiusSequence((1, 2, 4, 8))).values
    assert np.all(big >= small - 1e-15)


def test_stopping_time():
    f = rand_grid(seed=9)
    seq = RadiusSequence((1, 2, 4))
    const = ops.stopping_time_apply(f, seq, StoppingTime.constant(5, 8, 1))
    assert np.allclose(const.values, ops.spherical_average(f, enumerate_sphere(5, 2)).values, atol=1e-12)
    mf, tau = ops.maximal_function(f, seq, return_argmax=True)
    assert np.array_equal(ops.stopping_time_apply(f, seq, tau).values, mf.values)
    rnd = StoppingTime(5, 8, np.random.default_rng(1).integers(0, 3, (8,) * 5))
    assert np.all(ops.stopping_time_apply(f, seq, rnd).values <= mf.values + 1e-15)
    with pytest.raises(DomainError):
        ops.stopping_time_apply(f, seq, StoppingTime.constant(5, 8, 3))


def test_argmax_ties_go_to_lowest_index():
    f = GridFunction.constant(5, 4)
    _, tau = ops.maximal_function(f, RadiusSequence((1, 2, 3)), method="spatial", return_argmax=True)
    assert np.all(tau.k_index == 0)


def test_pairing_examples():
    full = GridFunction.indicator(5, 4, np.ones((4,) * 5))
    rep = ops.pairing_ratio(full, full, RadiusSequence((1, 2)), 1.5)
    assert rep.value == pytest.approx(1.0, rel=1e-12)
    pt = GridFunction.indicator(5, 4, np.zeros((4,) * 5) + (np.indices((4,) * 5).sum(axis=0) == 0))
    assert ops.pairing_ratio(pt, pt, RadiusSequence((1,)), 1.5).value == pytest.approx(0, abs=1e-15)
    empty = GridFunction.indicator(5, 4, np.zeros((4,) * 5))
    with pytest.raises(DomainError):
        ops.pairing_ratio(empty, full, RadiusSequence((1,)), 1.5)
    with pytest.raises(DomainError):
        ops.pairing_ratio(full, full, RadiusSequence((1,)), 1.0)


def test_pairing_study_reproducible():
    seq = RadiusSequence((1, 2, 4, 8), "lacunary")
    a = ops.pairing_study(5, 8, seq, 1.5, trials=10, seed=3)
    b = ops.pairing_study(5, 8, seq, 1.5, trials=10, seed=3)
    assert a.to_dict() == b.to_dict()
    assert 0 < a.extra["mean"] <= a.value < 1


def test_operator_norm_identity_and_average():
    ident = ops.operator_norm_l2(lambda x: x, 5, 4)
    assert ident.value == pytest.approx(1.0, abs=1e-12)
    mult = ops.sphere_multiplier_grid(enumerate_sphere(5, 2), 16)
    op, adj = ops.multiplier_operator(mult)
    rep = ops.operator_norm_l2(op, 5, 16, adjoint=adj, multiplier=mult)
    assert rep.oracle_checked
    assert rep.value == pytest.approx(np.max(np.abs(mult)), abs=1e-6)
    assert rep.value <= 1 + 1e-12


def test_operator_norm_generic_matrix():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((16, 16))
    rep = ops.operator_norm_l2(lambda x: A @ x, 1, 16, adjoint=lambda x: A.T @ x, iters=5000)
    assert rep.value == pytest.approx(np.linalg.norm(A, 2), rel=1e-6)


def test_error_operator_norm_examples():
    zero_arcs = ops.error_operator_norm(4, 0, 5, 16)
    assert zero_arcs.value == pytest.approx(1.0, abs=1e-12)
    unit = ops.error_operator_norm(1, None, 5, 16)
    assert unit.value >= 0
    checked = ops.error_operator_norm(4, None, 5, 16, power_check=True)
    assert checked.oracle_checked
    with pytest.raises(DomainError):
        ops.error_operator_norm(100, None, 5, 16)
