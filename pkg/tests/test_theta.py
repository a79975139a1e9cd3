import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from znthomae.characteristics import RationalCharacteristic, half_integer_characteristics, is_odd_half
from znthomae.errors import DimensionMismatch, NoneFound, NotPositiveDefinite
from znthomae.theta import (
    ThetaTruncation,
    ellipsoid_points,
    find_odd_nonsingular_half_characteristic,
    heat_residual,
    periodicity_residual,
    periodicity_residual_standard,
    theta,
    theta_constant,
)

PI2 = np.array([[1.1j + 0.2, 0.3 + 0.4j], [0.3 + 0.4j, 0.9j - 0.1]])


@given(st.floats(-0.5, 0.5), st.floats(0.5, 2.0), st.floats(-1, 1), st.floats(-0.5, 0.5))
def test_genus_one_matches_jacobi_theta3(tr, ti, zr, zi):
    tau = complex(tr, ti)
    z = complex(zr, zi)
    q = mpmath.exp(1j * mpmath.pi * tau)
    ref = complex(mpmath.jtheta(3, mpmath.pi * z, q))
    assert abs(theta([z], [[tau]]).value - ref) < 1e-11 * max(1, abs(ref))


def test_diagonal_factorizes():
    Pi = np.diag([1.3j, 0.7j + 0.2])
    z = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    prod = theta(z[:1], Pi[:1, :1]).value * theta(z[1:], Pi[1:, 1:]).value
    assert abs(theta(z, Pi).value - prod) < 1e-13


def test_odd_characteristics_vanish_at_zero():
    for c in half_integer_characteristics(2):
        if is_odd_half(c):
            assert abs(theta_constant(PI2, c).value) < 1e-13


def test_hessian_symmetric_and_gradient_consistent():
    z = np.array([0.1 - 0.2j, 0.3 + 0.1j])
    tv = theta(z, PI2, derivs=2)
    assert np.allclose(tv.hessian, tv.hessian.T, atol=1e-13)
    h = 1e-6
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        fd = (theta(z + e, PI2).value - theta(z - e, PI2).value) / (2 * h)
        assert abs(fd - tv.gradient[k]) < 1e-7 * abs(tv.gradient[k])


@given(st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4), st.integers(0, 1), st.integers(0, 1))
def test_heat_equation(zs, k, l):
    z = np.array([complex(zs[0], zs[1]), complex(zs[2], zs[3])])
    th = abs(theta(z, PI2).value)
    assert abs(heat_residual(z, PI2, None, k, l)) < 1e-6 * th


@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4), st.fractions(0, 1, max_denominator=5))
def test_standard_quasi_periodicity(ms, f):
    char = RationalCharacteristic((f, 1 - f), (f, f))
    z = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    shifted = z + np.array(ms[2:]) + PI2 @ np.array(ms[:2])
    scale = max(abs(theta(z, PI2, char).value), abs(theta(shifted, PI2, char).value))
    assert abs(periodicity_residual_standard(z, PI2, char, ms[:2], ms[2:])) < 1e-8 * scale


def test_literal_factor_agrees_only_without_integer_shift():
    z = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    assert abs(periodicity_residual(z, PI2, None, [0, 0], [0, 0])) < 1e-14
    # a pure lattice shift Pi m: the literal factor is 1, the true one is not
    assert abs(periodicity_residual(z, PI2, None, [1, 0], [0, 0])) > 1e-3


def test_truncation_stable():
    z = np.array([0.3 + 0.2j, -0.1 - 0.3j])
    a = theta(z, PI2, trunc=ThetaTruncation(1e-12)).value
    b = theta(z, PI2, trunc=ThetaTruncation(1e-15)).value
    assert abs(a - b) < 1e-12 * abs(b)


def test_ellipsoid_enumeration_complete():
    R = np.linalg.cholesky(PI2.imag).T
    pts = ellipsoid_points(R, np.zeros(2), 4.0)
    brute = [(i, j) for i in range(-5, 6) for j in range(-5, 6)
             if np.sum((R @ np.array([i, j])) ** 2) <= 4.0]
    assert sorted(map(tuple, pts.tolist())) == sorted(brute)


def test_errors():
    with pytest.raises(DimensionMismatch):
        theta([0, 0, 0], PI2)
    with pytest.raises(NotPositiveDefinite):
        theta([0, 0], np.diag([1j, -1j]))
    with pytest.raises(NotPositiveDefinite):
        theta([0, 0], np.diag([1j, 1e-8j]))


def test_odd_nonsingular_found(hutch):
    _, pd = hutch
    c = find_odd_nonsingular_half_characteristic(pd.pi_matrix)
    assert is_odd_half(c)
    assert np.linalg.norm(theta_constant(pd.pi_matrix, c, derivs=1).gradient) > 1e-3
    with pytest.raises(NoneFound):
        find_odd_nonsingular_half_characteristic(pd.pi_matrix, threshold=1e6)
