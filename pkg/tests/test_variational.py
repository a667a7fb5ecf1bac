import numpy as np
import pytest

from scalecalc import (Action, ArityMismatch, ConstraintViolated, ELReport, Grid1D, Grid2D,
                       GridFunction1D, Lagrangian, NondegeneracyFailure, OutOfDomain, Trajectory,
                       VariationClassViolation, admissible_variations, el_residual_1d,
                       el_residual_2d, el_residual_higher, el_residual_parameter,
                       gateaux_derivative, iso_solve, natural_bc_1d, quad_1d)

from conftest import bending_lagrangian, membrane_lagrangian, quadratic_lagrangian, sample


def _v_squared(weight=1.0, shift=0.0):
    return Lagrangian(lambda x, y, v: weight * v ** 2 + shift + 0 * y,
                      partials={"y": lambda x, y, v: 0 * y, "v": lambda x, y, v: 2 * weight * v})


def _area(scale=1.0):
    return Lagrangian(lambda x, y, v: scale * y + 0 * v,
                      partials={"y": lambda x, y, v: scale + 0 * y, "v": lambda x, y, v: 0 * v})


def test_trajectory_boundary_kind():
    g = Grid1D(0.0, 1.0, 11, ghost=2)
    y = sample(g, np.sin)
    assert Trajectory.fixed(y).boundary == "fixed"
    assert Trajectory.free(y).boundary == "free"
    with pytest.raises(ValueError):
        Trajectory(y, boundary="clamped")


def test_report_rejects_unknown_variant():
    with pytest.raises(ValueError):
        ELReport("sideways", None, 0.0, (), None, None, True, 0.1, 1.0, 1e-8, 1e-8, True)


def test_first_order_examples(dyadic_grid):
    h = dyadic_grid.delta
    report = el_residual_1d(quadratic_lagrangian(0.5, 0, 1), Trajectory.fixed(
        sample(dyadic_grid, lambda t: t ** 2 / 2)), h)
    assert report.is_extremal and report.residual_norm <= 1e-12
    line = el_residual_1d(quadratic_lagrangian(0.5), Trajectory.fixed(sample(dyadic_grid, lambda t: 3 * t - 1)), h)
    assert line.residual_norm == 0 and line.is_extremal
    wrong = el_residual_1d(quadratic_lagrangian(0.5), Trajectory.fixed(sample(dyadic_grid, lambda t: t ** 2)), h)
    assert not wrong.is_extremal
    # -box box x^2 = -(2 + 0i) on the interior
    inner = wrong.residual_field.values[dyadic_grid.ghost + 2:-dyadic_grid.ghost - 2]
    assert np.allclose(inner, -2, atol=1e-12)


def test_first_order_rejects_parameter_lagrangian(dyadic_grid):
    L = Lagrangian(lambda x, y, v, xi: v * xi, uses_xi=True)
    with pytest.raises(ArityMismatch):
        el_residual_1d(L, Trajectory.fixed(sample(dyadic_grid, np.sin)), dyadic_grid.delta)


def test_residual_needs_ghosts_without_fallback():
    g = Grid1D(0.0, 1.0, 65, ghost=1)
    y = Trajectory.fixed(sample(g, np.sin))
    with pytest.raises(OutOfDomain):
        el_residual_1d(quadratic_lagrangian(), y, g.delta)
    assert np.isfinite(el_residual_1d(quadratic_lagrangian(), y, g.delta, fallback=True).residual_norm)


def test_residual_tends_to_classical_equation():
    # L = v^2/2 + y^2/2 along sin: the smooth residual is y - y'' = 2 sin x
    for n in (257, 1025):
        g = Grid1D(0.0, 1.0, n, ghost=4)
        report = el_residual_1d(quadratic_lagrangian(0.5, 0.5), Trajectory.fixed(sample(g, np.sin)), g.delta)
        field = report.residual_field
        inner = slice(g.ghost + 2, g.ghost + g.n - 2)
        err = np.max(np.abs(field.values[inner] - 2 * np.sin(g.nodes[inner])))
        assert err <= 2 * g.delta


def test_gateaux_matches_weighted_residual():
    # for smooth data the first variation equals int R w up to O(h)
    g = Grid1D(0.0, 1.0, 513, ghost=4)
    h = g.delta
    L = quadratic_lagrangian(0.5, 0.5, 0.3)
    y = sample(g, lambda t: np.sin(3 * t))
    residual = el_residual_1d(L, Trajectory.fixed(y), h).residual_field
    for w in admissible_variations(g, 4, seed=3, margin=4 * h):
        weighted = quad_1d(GridFunction1D(g, np.where(np.isfinite(residual.values), residual.values, 0) * w.values))
        assert abs(gateaux_derivative(Action(L, "first_order"), y, w, h) - weighted) <= 20 * h


def test_gateaux_of_v_squared_along_line():
    g = Grid1D(0.0, 1.0, 65, ghost=2)
    h = g.delta
    y = sample(g, lambda t: t)
    w = sample(g, lambda t: t * (1 - t))
    value = gateaux_derivative(Action(_v_squared(), "first_order"), y, w, h)
    assert abs(value.real) <= 1e-8
    assert value.imag == pytest.approx(-2 * h, rel=1e-6)


def test_gateaux_zero_variation_and_class_violation(dyadic_grid):
    phi = Action(quadratic_lagrangian(), "first_order")
    y = sample(dyadic_grid, np.sin)
    assert gateaux_derivative(phi, y, sample(dyadic_grid, lambda t: 0 * t), dyadic_grid.delta) == 0
    with pytest.raises(VariationClassViolation):
        gateaux_derivative(phi, y, sample(dyadic_grid, lambda t: 1 + 0 * t), dyadic_grid.delta)


def test_higher_order_variation_needs_vanishing_box_derivative(dyadic_grid):
    phi = Action(bending_lagrangian(), "higher_order")
    y = sample(dyadic_grid, lambda t: t ** 3)
    w = sample(dyadic_grid, lambda t: np.clip(t * (1 - t), 0, None))
    with pytest.raises(VariationClassViolation):
        gateaux_derivative(phi, y, w, dyadic_grid.delta)


def test_iso_example_and_multiplier_invariances():
    g = Grid1D(0.0, 1.0, 2001, ghost=2)
    h = g.delta
    y = sample(g, lambda t: (t - t ** 2) / 4)
    base = iso_solve(_v_squared(), _area(), Trajectory.fixed(y), 1 / 24, h).multiplier
    assert abs(base - 1) <= 1e-6
    shifted = iso_solve(_v_squared(shift=7.0), _area(), Trajectory.fixed(y), 1 / 24, h).multiplier
    assert shifted == pytest.approx(base, abs=1e-12)
    scaled = iso_solve(_v_squared(), _area(4.0), Trajectory.fixed(y), 4 / 24, h).multiplier
    assert scaled == pytest.approx(base / 4, rel=1e-12)
    stretched = iso_solve(_v_squared(), _area(), Trajectory.fixed(3 * y), 3 / 24, h).multiplier
    assert stretched == pytest.approx(3 * base, rel=1e-9)


def test_iso_guards():
    g = Grid1D(0.0, 1.0, 201, ghost=2)
    y = Trajectory.fixed(sample(g, lambda t: (t - t ** 2) / 4))
    with pytest.raises(ConstraintViolated):
        iso_solve(_v_squared(), _area(), y, 0.5, g.delta)
    with pytest.raises(NondegeneracyFailure):
        iso_solve(_v_squared(), _v_squared(0.5), Trajectory.fixed(sample(g, lambda t: t)), 0.5, g.delta)


def _shift_lagrangian():
    return Lagrangian(lambda x, y, v, xi: (v - xi) ** 2, uses_xi=True,
                      partials={"y": lambda x, y, v, xi: 0 * y,
                                "v": lambda x, y, v, xi: 2 * (v - xi),
                                "xi": lambda x, y, v, xi: -2 * (v - xi)})


def test_parameter_residual_decouples_from_constant_xi():
    g = Grid1D(0.0, 1.0, 257, ghost=2)
    y = Trajectory.fixed(sample(g, lambda t: np.sin(2 * t)))
    a = el_residual_parameter(_shift_lagrangian(), y, 0.0, g.delta).residual_field.values
    b = el_residual_parameter(_shift_lagrangian(), y, 5.0, g.delta).residual_field.values
    assert np.allclose(a, b, atol=1e-9, equal_nan=True)


def test_parameter_solve_and_errors():
    g = Grid1D(0.0, 1.0, 1001, ghost=2)
    y = Trajectory.fixed(sample(g, lambda t: 2 * t))
    solved = el_residual_parameter(_shift_lagrangian(), y, None, g.delta, solve_xi=True)
    assert abs(solved.parameter - 2) <= 1e-12 and solved.is_extremal
    with pytest.raises(ArityMismatch):
        el_residual_parameter(_shift_lagrangian(), y, None, g.delta)
    with pytest.raises(ArityMismatch):
        el_residual_parameter(quadratic_lagrangian(), y, 0.0, g.delta)
    cubic = Lagrangian(lambda x, y, v, xi: xi ** 3 + 0 * v, uses_xi=True)
    with pytest.raises(ValueError):
        el_residual_parameter(cubic, y, None, g.delta, solve_xi=True)


def test_higher_order_quartic(dyadic_grid):
    # box^4 x^4 = 24 exactly, so the residual of v2^2/2 along x^4 is 24
    report = el_residual_higher(bending_lagrangian(), Trajectory.fixed(sample(dyadic_grid, lambda t: t ** 4)),
                                dyadic_grid.delta)
    field = report.residual_field.values
    finite = field[np.isfinite(field) & (np.abs(field) > 0)]
    assert report.residual_norm == pytest.approx(24, abs=1e-9)
    assert finite.size and np.allclose(finite, 24, atol=1e-9)
    assert not report.is_extremal


def test_higher_order_needs_ghosts():
    g = Grid1D(0.0, 1.0, 65, ghost=3)
    with pytest.raises(OutOfDomain):
        el_residual_higher(bending_lagrangian(), Trajectory.fixed(sample(g, lambda t: t ** 3)), g.delta)


def test_natural_bc_requires_free_trajectory(dyadic_grid):
    with pytest.raises(ValueError):
        natural_bc_1d(quadratic_lagrangian(), Trajectory.fixed(sample(dyadic_grid, np.sin)), dyadic_grid.delta)


def test_double_integral_examples(dyadic_square):
    h = dyadic_square.axis1.delta
    harmonic = el_residual_2d(membrane_lagrangian(), Trajectory.fixed(sample(dyadic_square, lambda a, b: a * b)), h)
    assert harmonic.is_extremal and harmonic.residual_norm <= 1e-12
    bowl = el_residual_2d(membrane_lagrangian(), Trajectory.fixed(sample(dyadic_square, lambda a, b: a * a + b * b)), h)
    assert bowl.residual_norm == pytest.approx(4, abs=1e-9)
    with pytest.raises(ArityMismatch):
        el_residual_2d(quadratic_lagrangian(), Trajectory.fixed(sample(dyadic_square, lambda a, b: a)), h)


def test_action_checks_dimension():
    with pytest.raises(ArityMismatch):
        Action(quadratic_lagrangian(), "double_integral")
    with pytest.raises(ValueError):
        Action(quadratic_lagrangian(), "sideways")


def test_admissible_variations_vanish_near_ends():
    g = Grid1D(0.0, 1.0, 101, ghost=4)
    for w in admissible_variations(g, 3, seed=1, margin=0.05):
        near = (g.nodes <= 0.05 + 1e-12) | (g.nodes >= 0.95 - 1e-12)
        assert np.all(w.values[near] == 0)
        assert np.any(w.values != 0)
    with pytest.raises(ValueError):
        admissible_variations(g, 1, margin=0.6)


def test_admissible_variations_are_reproducible():
    g = Grid2D.square(0.0, 1.0, 21, ghost=1)
    from scalecalc import admissible_variations_2d
    a = admissible_variations_2d(g, 2, seed=5)
    b = admissible_variations_2d(g, 2, seed=5)
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))
