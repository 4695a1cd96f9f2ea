import numpy as np
import pytest

import swerect as sw
from swerect.elliptic import ThetaField, apply_T, apply_T_star
from swerect.errors import BcViolation, RegimeMismatch, ViolatesCondition

from helpers import boundary_flat_theta, params

P_MSUB = params("msub")
C_SWE = sw.swe_elliptic_block(P_MSUB)


def in_v_field(grid):
    """A generic smooth member of V: theta1 = 0 on W+S, theta2 = 0 on E+N."""
    X, Y = grid.meshgrid()
    t1 = np.sin(np.pi * X / grid.l1) * np.sin(0.5 * np.pi * Y / grid.l2) * (1 + 0.3 * X * Y)
    t2 = np.cos(0.5 * np.pi * X / grid.l1) * np.cos(0.5 * np.pi * Y / grid.l2) * (1.2 - 0.2 * Y)
    return ThetaField(t1, t2)


def test_build_coeffs_guards():
    with pytest.raises(ViolatesCondition):
        sw.build_coeffs(-1.0, 1.0, 0.5, -0.5)  # alpha1 <= 0
    with pytest.raises(ViolatesCondition):
        sw.build_coeffs(1.0, 1.0, 1.0, 1.0)  # det = a2 b1 - a1 b2 = 0


def test_swe_block_closed_form():
    p = P_MSUB
    s = p.u0**2 + p.v0**2
    k1 = sw.kappa1(p)
    c = C_SWE
    assert c.alpha1 == pytest.approx(p.u0 / s, rel=1e-15)
    assert c.alpha2 == pytest.approx(p.v0 / s, rel=1e-15)
    assert c.beta1 == pytest.approx(p.g * p.v0 / (k1 * s), rel=1e-15)
    assert c.beta2 == pytest.approx(-p.g * p.u0 / (k1 * s), rel=1e-15)
    # frozen determinant at (1, 1, 1, 9.81): g / (kappa1 * s)
    assert c.det == pytest.approx(0.5603753086599176, rel=1e-14)


def test_swe_block_regime_guard():
    with pytest.raises(RegimeMismatch):
        sw.swe_elliptic_block(params("fhs"))


def test_apply_T_star_is_negative_T():
    grid = sw.Grid(1.0, 1.0, 21, 21)
    th = in_v_field(grid)
    a = apply_T(th, C_SWE, grid)
    b = apply_T_star(th, C_SWE, grid)
    assert np.allclose(a.theta1, -b.theta1)
    assert np.allclose(a.theta2, -b.theta2)


def test_duality_is_discretely_exact():
    """<T a, b> - <a, T* b> vanishes to round-off when a carries the forward
    side conditions and b the adjoint ones: gradient + trapezoid telescope
    exactly, and the boundary products are annihilated row by row."""
    for l1, l2, nx, ny in ((1.0, 1.0, 17, 17), (2.0, 0.7, 25, 19), (1.0, 1.0, 33, 33)):
        grid = sw.Grid(l1, l2, nx, ny)
        a, _ = sw.manufactured_solution_T(C_SWE, grid)
        b, _ = sw.manufactured_solution_T_star(C_SWE, grid)
        lhs = sw.theta_inner(apply_T(a, C_SWE, grid), b, grid)
        rhs = sw.theta_inner(a, apply_T_star(b, C_SWE, grid), grid)
        scale = sw.theta_norm(a, grid) * sw.theta_norm(b, grid)
        assert abs(lhs - rhs) <= 1e-13 * max(scale, 1.0)


def test_duality_defect_without_adjoint_conditions():
    # pairing a forward-domain field against itself leaves genuine boundary
    # terms; the identity must not look trivially true for the wrong reason
    grid = sw.Grid(1.0, 1.0, 17, 17)
    a, _ = sw.manufactured_solution_T(C_SWE, grid)
    lhs = sw.theta_inner(apply_T(a, C_SWE, grid), a, grid)
    rhs = sw.theta_inner(a, apply_T_star(a, C_SWE, grid), grid)
    assert abs(lhs - rhs) > 1e-3


def test_cross_gradient_residual_near_zero_in_v():
    for n in (17, 33):
        grid = sw.Grid(1.0, 1.0, n, n)
        r = sw.cross_gradient_residual(in_v_field(grid), grid)
        assert r < 1e-13


def test_cross_gradient_rejects_outside_v():
    grid = sw.Grid(1.0, 1.0, 17, 17)
    th = in_v_field(grid)
    th.theta1[0, :] = 1.0  # breaks theta1|W = 0
    with pytest.raises(BcViolation):
        sw.cross_gradient_residual(th, grid)


def test_solve_T_manufactured_convergence():
    errs = []
    for n in (17, 33, 65):
        grid = sw.Grid(1.0, 1.0, n, n)
        exact, F = sw.manufactured_solution_T(C_SWE, grid)
        got = sw.solve_T(F, C_SWE, grid)
        d = ThetaField(got.theta1 - exact.theta1, got.theta2 - exact.theta2)
        errs.append(sw.theta_norm(d, grid))
    orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
    assert min(orders) >= 1.0, (errs, orders)


def test_solve_T_star_manufactured_convergence():
    errs = []
    for n in (17, 33, 65):
        grid = sw.Grid(1.0, 1.0, n, n)
        exact, Psi = sw.manufactured_solution_T_star(C_SWE, grid)
        got = sw.solve_T_star(Psi, C_SWE, grid)
        d = ThetaField(got.theta1 - exact.theta1, got.theta2 - exact.theta2)
        errs.append(sw.theta_norm(d, grid))
    orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
    assert min(orders) >= 1.0, (errs, orders)


def test_solve_T_inverts_discrete_apply():
    # with a forcing produced by the discrete stencils themselves, the
    # solve returns that exact grid function (direct sparse factorization)
    grid = sw.Grid(1.0, 1.0, 21, 21)
    th = in_v_field(grid)
    F = apply_T(th, C_SWE, grid)
    got = sw.solve_T(F, C_SWE, grid)
    assert np.max(np.abs(got.theta1 - th.theta1)) < 1e-10
    assert np.max(np.abs(got.theta2 - th.theta2)) < 1e-10


def test_zero_maps_to_zero():
    grid = sw.Grid(1.0, 1.0, 19, 19)
    z = ThetaField.zeros(grid)
    for solver in (sw.solve_T, sw.solve_T_star):
        out = solver(z, C_SWE, grid)
        assert np.max(np.abs(out.theta1)) <= 1e-12
        assert np.max(np.abs(out.theta2)) <= 1e-12


def test_apriori_bounds_with_vanishing_slack():
    slacks = []
    for n in (17, 33, 65):
        grid = sw.Grid(1.0, 1.0, n, n)
        exact, F = sw.manufactured_solution_T(C_SWE, grid)
        got = sw.solve_T(F, C_SWE, grid)
        rep = sw.apriori_check(got, C_SWE, grid)
        assert rep.passed, rep
        slacks.append(rep.slack)
    assert slacks[1] < 0.7 * slacks[0] and slacks[2] < 0.7 * slacks[1]


def test_neumann_crosscheck_second_order_on_flat_data():
    resids = []
    for n in (17, 33, 65):
        grid = sw.Grid(1.0, 1.0, n, n)
        exact = boundary_flat_theta(grid)
        F = apply_T(exact, C_SWE, grid)
        got = sw.solve_T(F, C_SWE, grid)
        east, north = sw.neumann_crosscheck(got, C_SWE, grid)
        resids.append(max(east, north))
    assert resids[1] < 0.5 * resids[0] and resids[2] < 0.5 * resids[1]


def test_transform_round_trip():
    from swerect.elliptic import from_transformed, to_transformed

    grid = sw.Grid(1.0, 1.0, 9, 9)
    X, Y = grid.meshgrid()
    xp, yp = to_transformed(X, Y, C_SWE)
    xb, yb = from_transformed(xp, yp, C_SWE)
    assert np.max(np.abs(xb - X)) < 1e-12
    assert np.max(np.abs(yb - Y)) < 1e-12
