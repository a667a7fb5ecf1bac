"""Acceptance checks at their stated tolerances.

A per-criterion PASS/FAIL line is printed in the terminal summary (see
conftest).  Tolerances here are never loosened to make a check pass.
"""

import math

import numpy as np
import pytest

from scalecalc import (Action, BoxDerivativeConfig, Grid1D, Grid2D, GridFunction1D,
                       GridFunction2D, Lagrangian, NondegeneracyFailure, Trajectory,
                       admissible_variations, admissible_variations_2d, barrow_defect,
                       box_derivative_h, econdition_estimate, el_residual_1d, el_residual_2d,
                       el_residual_higher, el_residual_parameter, estimate_holder_exponent,
                       gateaux_derivative, green_defect, iso_solve, leibniz_defect, natural_bc_1d,
                       natural_bc_2d, scale_derivative, solve_membrane, weierstrass)

from conftest import bending_lagrangian, membrane_lagrangian, quadratic_lagrangian, sample


def acceptance(number, label):
    return pytest.mark.acceptance(number, label)


@acceptance(1, "box derivative exact on x^2 and x^3")
@pytest.mark.parametrize("h", [0.1, 0.01])
def test_exactness_grade(h):
    grid = Grid1D(0.0, 2.0, 2001, ghost=100)
    x = grid.nodes
    inner = grid.interior
    d2 = box_derivative_h(sample(grid, lambda t: t ** 2), h).values[inner]
    d3 = box_derivative_h(sample(grid, lambda t: t ** 3), h).values[inner]
    xi = x[inner]
    assert np.max(np.abs(d2 - (2 * xi + 1j * h))) <= 1e-12
    assert np.max(np.abs(d3 - ((3 * xi ** 2 + h ** 2) + 3j * xi * h))) <= 1e-12


@acceptance(2, "scale limit of sin recovers cos")
def test_smooth_scale_limit():
    grid = Grid1D(0.0, 1.0, 40001, ghost=400)
    f = sample(grid, np.sin)
    limit, result = scale_derivative(f, BoxDerivativeConfig(1e-2, levels=6, ratio=0.5))
    err = np.max(np.abs(limit.interior_values - np.cos(grid.interior_nodes)))
    assert err <= 1e-6
    assert result.convergent.all()


LEIBNIZ_STEPS = [0.02, 0.01, 0.005, 0.0025]


@acceptance(3, "product-rule defect: Weierstrass pair shrinks 4x; constant factor exact")
def test_leibniz_weierstrass_pair_quarter():
    grid = Grid1D(0.0, 1.0, 4001, ghost=80)
    w = weierstrass(0.5, 3, 40, grid)
    report = leibniz_defect(w, w, LEIBNIZ_STEPS)
    assert report.defect_norm[-1] <= 0.25 * report.defect_norm[0], report.defect_norm


@acceptance(3, "product-rule defect: Weierstrass pair shrinks 4x; constant factor exact")
def test_leibniz_constant_factor():
    grid = Grid1D(0.0, 1.0, 4001, ghost=80)
    c = sample(grid, lambda t: 2.5 + 0 * t)
    w = weierstrass(0.5, 3, 40, grid)
    report = leibniz_defect(c, w, LEIBNIZ_STEPS)
    assert max(report.defect_norm) <= 1e-12


@acceptance(4, "integral of box derivative: x^2, affine, E-part of x^2")
def test_barrow():
    grid = Grid1D(0.0, 1.0, 10001, ghost=10)
    assert barrow_defect(sample(grid, lambda t: t ** 2), 1e-3).defect_norm[0] <= 1e-2
    assert barrow_defect(sample(grid, lambda t: 3 * t - 1), 1e-3).defect_norm[0] <= 1e-12
    e = econdition_estimate(sample(grid, lambda t: t ** 2), BoxDerivativeConfig(1e-3, levels=4))
    assert max(e.defect_norm) <= 1e-8


@acceptance(5, "Green's theorem on the unit square")
def test_green():
    grid = Grid2D.square(0.0, 1.0, 201, ghost=1)
    h = grid.axis1.delta
    x2 = sample(grid, lambda a, b: b)
    x1 = sample(grid, lambda a, b: a)
    zero = sample(grid, lambda a, b: 0 * a)
    assert green_defect(x2, x1, h).defect_norm[0] <= 1e-10
    assert green_defect(zero, x1, h).defect_norm[0] <= 10 * h


def _exact_cases():
    g1 = Grid1D(0.0, 1.0, 65, ghost=8)
    g2 = Grid2D.square(0.0, 1.0, 33, ghost=4)
    return [
        ("first_order", quadratic_lagrangian(0.5, 0, 1), sample(g1, lambda t: t ** 2 / 2), g1.delta),
        ("higher_order", bending_lagrangian(), sample(g1, lambda t: t ** 3), g1.delta),
        ("double_integral", membrane_lagrangian(), sample(g2, lambda a, b: a * a - b * b),
         g2.axis1.delta),
    ]


@acceptance(6, "exact Euler-Lagrange cases vanish")
def test_el_exact_cases():
    (_, L1, y1, h1), (_, L2, y2, h2), (_, L3, y3, h3) = _exact_cases()
    assert el_residual_1d(L1, Trajectory.fixed(y1), h1).residual_norm <= 1e-12
    assert el_residual_higher(L2, Trajectory.fixed(y2), h2).residual_norm <= 1e-12
    assert el_residual_2d(L3, Trajectory.fixed(y3), h3).residual_norm <= 1e-12


@acceptance(7, "Gateaux derivative vanishes on exact extremals")
@pytest.mark.parametrize("case", range(3))
def test_gateaux_oracle(case):
    variant, L, y, h = _exact_cases()[case]
    if variant == "double_integral":
        ws = admissible_variations_2d(y.grid, 10, seed=7, margin=2 * h)
    else:
        ws = admissible_variations(y.grid, 10, seed=7, margin=4 * h)
    phi = Action(L, variant)
    values = [abs(gateaux_derivative(phi, y, w, h)) for w in ws]
    assert max(values) <= 1e-6


@acceptance(8, "isoperimetric multiplier and nondegeneracy guard")
def test_isoperimetric():
    grid = Grid1D(0.0, 1.0, 2001, ghost=2)
    h = grid.delta
    L = Lagrangian(lambda x, y, v: v ** 2,
                   partials={"y": lambda x, y, v: 0 * y, "v": lambda x, y, v: 2 * v})
    theta = Lagrangian(lambda x, y, v: y + 0 * v,
                       partials={"y": lambda x, y, v: 1 + 0 * y, "v": lambda x, y, v: 0 * v})
    y = sample(grid, lambda t: (t - t ** 2) / 4)
    report = iso_solve(L, theta, Trajectory.fixed(y), 1 / 24, h)
    assert abs(report.multiplier - 1) <= 1e-6
    # theta = v^2/2 along y = x: its residual vanishes, so y extremises the constraint
    flat = Lagrangian(lambda x, y, v: v ** 2 / 2,
                      partials={"y": lambda x, y, v: 0 * y, "v": lambda x, y, v: v})
    with pytest.raises(NondegeneracyFailure):
        iso_solve(L, flat, Trajectory.fixed(sample(grid, lambda t: t)), 0.5, h)


@acceptance(9, "free parameter solve and parameter integral")
def test_parameter():
    grid = Grid1D(0.0, 1.0, 1001, ghost=2)
    L = Lagrangian(lambda x, y, v, xi: (v - xi) ** 2, uses_xi=True,
                   partials={"y": lambda x, y, v, xi: 0 * y,
                             "v": lambda x, y, v, xi: 2 * (v - xi),
                             "xi": lambda x, y, v, xi: -2 * (v - xi)})
    y = Trajectory.fixed(sample(grid, lambda t: t))
    solved = el_residual_parameter(L, y, None, grid.delta, solve_xi=True)
    assert abs(solved.parameter - 1) <= 1e-12
    at_zero = el_residual_parameter(L, y, 0.0, grid.delta)
    assert abs(at_zero.defect("parameter_integral") - (-2)) <= 1e-9


@acceptance(10, "natural boundary conditions reproduce pass/fail patterns")
def test_natural_boundary_conditions():
    g1 = Grid1D(0.0, 1.0, 65, ghost=2)
    h1 = g1.delta
    half_v2 = quadratic_lagrangian(0.5)
    shifted = Lagrangian(lambda x, y, v: (v - 1) ** 2 / 2,
                         partials={"y": lambda x, y, v: 0 * y, "v": lambda x, y, v: v - 1})
    const = natural_bc_1d(half_v2, Trajectory.free(sample(g1, lambda t: 0.7 + 0 * t)), h1)
    line = natural_bc_1d(half_v2, Trajectory.free(sample(g1, lambda t: t)), h1)
    fixed = natural_bc_1d(shifted, Trajectory.free(sample(g1, lambda t: t)), h1)
    assert const.is_extremal and const.residual_norm == 0
    assert [abs(d) for _, d in const.boundary_defects] == [0, 0]
    assert not line.is_extremal and line.residual_norm == 0
    assert [d for _, d in line.boundary_defects] == [1, 1]
    assert fixed.is_extremal and [abs(d) for _, d in fixed.boundary_defects] == [0, 0]

    g2 = Grid2D.square(0.0, 1.0, 33, ghost=2)
    h2 = g2.axis1.delta
    const2 = natural_bc_2d(membrane_lagrangian(), Trajectory.free(sample(g2, lambda a, b: 0 * a + 3)), h2)
    line2 = natural_bc_2d(membrane_lagrangian(), Trajectory.free(sample(g2, lambda a, b: a)), h2)
    fixed2 = natural_bc_2d(membrane_lagrangian(1.0), Trajectory.free(sample(g2, lambda a, b: a)), h2)
    assert const2.is_extremal and const2.residual_norm == 0
    assert [abs(d) for _, d in const2.boundary_defects] == [0, 0, 0, 0]
    assert not line2.is_extremal
    assert [d for _, d in line2.boundary_defects] == [1, 1, 0, 0]
    assert fixed2.is_extremal and [abs(d) for _, d in fixed2.boundary_defects] == [0, 0, 0, 0]


@acceptance(11, "membrane solve: harmonic quadratic, zero data, residual")
def test_membrane():
    grid = Grid2D.square(0.0, 1.0, 65)
    h = grid.axis1.delta
    u = solve_membrane(lambda a, b: a * a - b * b, grid, h)
    x1, x2 = u.grid.mesh()
    inner = u.grid.interior
    assert np.max(np.abs(u.values - (x1 ** 2 - x2 ** 2))[inner]) <= 1e-8
    zero = solve_membrane(lambda a, b: 0 * a, grid, h)
    assert np.max(np.abs(zero.values)) == 0
    residual = el_residual_2d(membrane_lagrangian(), Trajectory.fixed(u), h)
    assert residual.residual_norm <= 1e-9


@acceptance(12, "Hoelder estimator on Weierstrass and x^2")
def test_holder_estimator():
    grid = Grid1D(0.0, 1.0, 4096)
    assert 0.53 <= estimate_holder_exponent(weierstrass(0.5, 3, 40, grid)) <= 0.73
    assert estimate_holder_exponent(sample(grid, lambda t: t ** 2)) >= 0.9


@acceptance(13, "order-one higher-order residual matches first-order residual bit for bit")
def test_variant_consistency():
    rng = np.random.default_rng(2024)
    grid = Grid1D(-1.0, 1.5, 257, ghost=6)
    for _ in range(5):
        a, b, c, d = rng.normal(size=4)
        p = rng.normal(size=3)
        L = quadratic_lagrangian(a, b, c, d)
        y = Trajectory.fixed(sample(grid, lambda t: p[0] + p[1] * t + p[2] * t ** 2))
        m = int(rng.integers(1, 4))
        h = m * grid.delta
        first = el_residual_1d(L, y, h).residual_field.values
        higher = el_residual_higher(L, y, h).residual_field.values
        assert np.array_equal(first, higher, equal_nan=True)
