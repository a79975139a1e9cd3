from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeded_points
from znthomae.characteristics import FAMILY_M, FAMILY_M_PLUS_1, Partition, enumerate_partitions
from znthomae.curve import CurveSpec, point_on_sheet_one
from znthomae.errors import BranchCut, InvalidPartition
from znthomae.szego import (
    exponents_em,
    exponents_em1,
    fay_identity_residual,
    phi,
    phi_coefficients,
    psi_factor,
    second_derivative_identity_residual,
    szego_algebraic,
    szego_algebraic_em,
    szego_pair,
    szego_zero_closed_form,
)


def pairs(spec, n, seed):
    lams = seeded_points(spec, 2 * n, seed)
    return [(point_on_sheet_one(spec, lams[2 * i]), point_on_sheet_one(spec, lams[2 * i + 1])) for i in range(n)]


def test_psi_factor_basics():
    spec = CurveSpec(3, 1, (0.0, 0.3, 1.0))
    P, Q = point_on_sheet_one(spec, 0.2 + 0.5j), point_on_sheet_one(spec, 0.8 + 0.1j)
    assert psi_factor(spec, P, P, 2) == 1
    assert abs(psi_factor(spec, P, Q, 1) * psi_factor(spec, Q, P, 1) - 1) < 1e-15


def test_exponent_tables():
    for N in range(2, 7):
        c = [e[2] for e in exponents_em1(N)]
        base = Fraction(N - 1, 2 * N)
        assert sorted(base - x for x in c) == [Fraction(k, N) for k in range(N)]
        assert [e[:2] for e in exponents_em1(N)] == exponents_em(N)


@pytest.mark.parametrize("key", [(2, 1), (3, 1), (3, 2), (4, 1)])
def test_reduction_to_closed_form(kernel_ctx, key):
    spec = kernel_ctx(*key).spec
    zero = Partition(tuple(range(1, 2 * spec.m + 2, 2)), (), FAMILY_M)
    for P, Q in pairs(spec, 10, 3):
        assert abs(szego_algebraic(spec, zero, P, Q).value - szego_zero_closed_form(spec, P, Q)) < 1e-13


@pytest.mark.parametrize("key, family", [((2, 1), FAMILY_M), ((3, 1), FAMILY_M), ((3, 1), FAMILY_M_PLUS_1),
                                         ((3, 2), FAMILY_M), ((3, 2), FAMILY_M_PLUS_1), ((4, 1), FAMILY_M_PLUS_1)])
def test_magnitude_matches_theta_form(kernel_ctx, key, family):
    ctx = kernel_ctx(*key)
    for part in enumerate_partitions(ctx.spec, family):
        for P, Q in pairs(ctx.spec, 3, 11):
            alg, th = szego_pair(ctx, part, P, Q)
            assert abs(abs(alg) - abs(th)) < 1e-8 * abs(th)


@pytest.mark.parametrize("key", [(3, 1), (3, 2)])
def test_diagonal_expansion(kernel_ctx, key):
    """(dlam) S = 1 + phi dlam^2 + O(dlam^3): no linear term, quadratic coefficient phi."""
    spec = kernel_ctx(*key).spec
    P = point_on_sheet_one(spec, complex(np.mean(spec.branch_points), 0.6))
    for part in enumerate_partitions(spec, FAMILY_M)[:4] + enumerate_partitions(spec, FAMILY_M_PLUS_1)[:2]:
        f = lambda h: szego_algebraic(spec, part, P, point_on_sheet_one(spec, P.lam + h)).value * h
        odd = [abs(f(h) - f(-h)) / (2 * h) for h in (1e-2, 5e-3)]
        assert odd[1] < 0.3 * odd[0] or odd[1] < 1e-12
        c1, c2 = ((f(h) + f(-h) - 2) / (2 * h * h) for h in (1e-2, 5e-3))
        coeff = (4 * c2 - c1) / 3
        target = phi(spec, part, P.lam)
        assert abs(coeff - target) < 1e-6 * max(1, abs(target))


def test_phi_zero_characteristic_form():
    spec = CurveSpec(3, 2, (0, 1, 2, 3, 4))
    zero = Partition((1, 3, 5), (), FAMILY_M)
    lam = 1.3 + 0.4j
    d = sum(1 / (lam - x) for x in (0, 2, 4)) - sum(1 / (lam - x) for x in (1, 3))
    assert abs(phi(spec, zero, lam) - Fraction(8, 216) * d ** 2) < 1e-14


def test_phi_coefficients_exact():
    assert phi_coefficients(2)["cross"] == Fraction(2 * 1 * -3, 96)


@given(st.integers(2, 6), st.floats(-1, 5), st.floats(0.1, 2))
def test_phi_complement_invariance(N, x, y):
    spec = CurveSpec(N, 2, (0, 1, 2, 3, 4))
    for part in enumerate_partitions(spec, FAMILY_M):
        comp = part.complement(spec.m)
        assert abs(phi(spec, part, complex(x, y)) - phi(spec, comp, complex(x, y))) < 1e-12


def test_principal_branch_rule_and_cut():
    spec = CurveSpec(3, 1, (0.0, 0.3, 1.0))
    part = Partition((1,), (2,), FAMILY_M)
    P, Q = point_on_sheet_one(spec, 0.2 + 0.5j), point_on_sheet_one(spec, 0.7 + 0.5j)
    a = szego_algebraic(spec, part, P, Q, branch="principal").value
    b = szego_algebraic(spec, part, P, Q).value
    assert abs(abs(a) - abs(b)) < 1e-12 * abs(b)
    # zero partition: bracket psi_1 psi_3 / psi_2 is real and negative for these real points
    R = point_on_sheet_one(spec, -0.5 + 0j)
    S = point_on_sheet_one(spec, 0.2 + 0j)
    with pytest.raises(BranchCut):
        szego_algebraic(spec, Partition((1, 3), (), FAMILY_M), R, S, branch="principal")


def test_family_mismatch():
    spec = CurveSpec(3, 1, (0.0, 0.3, 1.0))
    P, Q = point_on_sheet_one(spec, 0.2 + 0.5j), point_on_sheet_one(spec, 0.7 + 0.5j)
    with pytest.raises(InvalidPartition):
        szego_algebraic_em(spec, Partition((), (), FAMILY_M_PLUS_1, 1, 2), P, Q)


@pytest.mark.parametrize("key", [(2, 1), (3, 1)])
def test_fay_identity(kernel_ctx, key):
    ctx = kernel_ctx(*key)
    for part in enumerate_partitions(ctx.spec, FAMILY_M)[:3]:
        for P, Q in pairs(ctx.spec, 3, 5):
            fr = fay_identity_residual(ctx, part, P, Q)
            assert abs(fr.lhs_theta - fr.rhs) < 1e-9 * abs(fr.rhs)
            assert abs(fr.lhs_algebraic - fr.rhs) < 1e-9 * abs(fr.rhs)


@pytest.mark.parametrize("key", [(3, 1), (3, 2), (4, 1)])
def test_second_identity_defect_is_characteristic_independent(kernel_ctx, key):
    """The second-derivative identity misses a term that depends on P only."""
    ctx = kernel_ctx(*key)
    parts = enumerate_partitions(ctx.spec, FAMILY_M) + enumerate_partitions(ctx.spec, FAMILY_M_PLUS_1)
    for lam in seeded_points(ctx.spec, 3, 9):
        P = point_on_sheet_one(ctx.spec, lam)
        res = [second_derivative_identity_residual(ctx, part, P) for part in parts]
        ref = res[0].residual
        scale = max(abs(r.rhs) for r in res)
        assert max(abs(r.residual - ref) for r in res) < 1e-10 * scale


@pytest.mark.parametrize("m", [1, 2])
def test_second_identity_defect_polynomial_for_n2(curves, m):
    """For N = 2 the defect times p q is a polynomial of degree 2m - 1."""
    from znthomae.kernels import KernelContext

    spec, pd = curves[2, m]
    ctx = KernelContext(spec, pd)
    part = enumerate_partitions(spec, FAMILY_M)[0]
    lams = np.array(seeded_points(spec, 2 * m + 4, 21))
    vals = np.array([second_derivative_identity_residual(ctx, part, point_on_sheet_one(spec, x)).residual
                     * spec.p(x) * spec.q(x) for x in lams])
    V = np.vander(lams, 2 * m, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    assert np.max(np.abs(V @ coef - vals)) < 1e-9 * np.max(np.abs(vals))
    leading = {1: -0.25, 2: -1.0}[m]
    assert abs(coef[-1] - leading) < 1e-8
