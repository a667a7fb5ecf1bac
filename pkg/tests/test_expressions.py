import numpy as np
import pytest

from scalecalc import ConfigInvalid, Grid1D, Grid2D
from scalecalc.expressions import (function_1d, function_2d, lagrangian_from_text, parse_expression,
                                   parse_weierstrass)


@pytest.mark.parametrize("text", [
    "__import__('os')", "x.real", "[x]", "lambda: 1", "x if x else 1", "open('f')",
    "sqrt(x)", "x < 1", "y", "",
])
def test_rejects_anything_outside_the_whitelist(text):
    with pytest.raises(ConfigInvalid):
        parse_expression(text, ["x"])


def test_caret_means_power():
    assert parse_expression("x^3", ["x"]) == parse_expression("x**3", ["x"])


def test_function_1d_and_2d_sample_on_grids():
    g = Grid1D(0.0, 1.0, 11, ghost=2)
    f = function_1d("exp(x) - 2*sin(x)", g)
    assert np.allclose(f.values, np.exp(g.nodes) - 2 * np.sin(g.nodes))
    sq = Grid2D.square(0.0, 1.0, 5)
    u = function_2d("x1*x2 + cos(x2)", sq)
    x1, x2 = sq.mesh()
    assert np.allclose(u.values, x1 * x2 + np.cos(x2))


def test_weierstrass_form():
    params = parse_weierstrass("weierstrass(0.5, 3, 40)")
    assert (params.a, params.b, params.terms) == (0.5, 3, 40)
    assert parse_weierstrass("sin(x)") is None
    with pytest.raises(ConfigInvalid):
        parse_weierstrass("weierstrass(0.5, 3)")
    with pytest.raises(ConfigInvalid):
        parse_weierstrass("weierstrass(0.5, 2.5, 40)")


def test_lagrangian_text_gets_symbolic_partials():
    L = lagrangian_from_text("v^2/2 + y^2 + x*y")
    assert L.order == 1 and not L.uses_xi
    v = np.array([0.3 + 0.2j])
    assert np.allclose(L.partial("v", 0.5, 1.0, (v,)), v)
    assert np.allclose(L.partial("y", 0.5, 1.0, (v,)), 2.5)


def test_lagrangian_text_order_and_parameter():
    assert lagrangian_from_text("v2^2/2").order == 2
    assert lagrangian_from_text("(v - xi)^2").uses_xi
    with pytest.raises(ConfigInvalid):
        lagrangian_from_text("v3^2", order=2)
    with pytest.raises(ConfigInvalid):
        lagrangian_from_text("v + v1")
    membrane = lagrangian_from_text("(v1^2 + v2^2)/2", dims=2)
    assert membrane.dims == 2
