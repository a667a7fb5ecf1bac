"""The small expression vocabulary used by the command line.

Expressions are Python-syntax arithmetic (``^`` accepted for powers) over
numbers, ``pi``, the variables of their context and the functions ``sin``,
``cos`` and ``exp``.  Test-function specs may also be a single call
``weierstrass(a, b, terms)``.  Source text is checked against a syntax
whitelist before sympy sees it; sympy then supplies closed-form partials of
Lagrangians.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass

import numpy as np
import sympy

from .exceptions import ConfigInvalid
from .grid import Grid1D, Grid2D, GridFunction1D, GridFunction2D
from .holder import weierstrass
from .lagrangian import Lagrangian

__all__ = ["parse_expression", "function_1d", "function_2d", "lagrangian_from_text",
           "WeierstrassParams", "parse_weierstrass"]

FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_VNAME = re.compile(r"v[1-9][0-9]?$")


@dataclass(frozen=True)
class WeierstrassParams:
    a: float
    b: int
    terms: int


def _check_tree(node: ast.AST, names: set[str], text: str):
    if isinstance(node, ast.Expression):
        return _check_tree(node.body, names, text)
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        _check_tree(node.left, names, text)
        return _check_tree(node.right, names, text)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        return _check_tree(node.operand, names, text)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return
    if isinstance(node, ast.Name):
        if node.id == "pi" or node.id in names:
            return
        raise ConfigInvalid(f"unknown name {node.id!r} in {text!r}; allowed: "
                            f"{', '.join(sorted(names | {'pi'}))}")
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in FUNCTIONS and len(node.args) == 1 and not node.keywords:
        return _check_tree(node.args[0], names, text)
    raise ConfigInvalid(f"unsupported syntax {type(node).__name__} in {text!r}")


def _parse_tree(text: str) -> ast.Expression:
    if not isinstance(text, str) or not text.strip():
        raise ConfigInvalid("empty expression")
    src = text.strip().replace("^", "**")
    try:
        return ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ConfigInvalid(f"cannot parse expression {text!r}: {exc.msg}") from None


def parse_expression(text: str, names) -> sympy.Expr:
    """Validate ``text`` against the vocabulary and return the sympy expression."""
    names = set(names)
    tree = _parse_tree(text)
    _check_tree(tree, names, text)
    local = {n: sympy.Symbol(n) for n in names}
    local.update(FUNCTIONS)
    local["pi"] = sympy.pi
    return sympy.sympify(ast.unparse(tree), locals=local, rational=False)


def parse_weierstrass(text: str) -> WeierstrassParams | None:
    """``WeierstrassParams`` if ``text`` is a single ``weierstrass(a, b, terms)`` call."""
    tree = _parse_tree(text).body
    if not (isinstance(tree, ast.Call) and isinstance(tree.func, ast.Name)
            and tree.func.id == "weierstrass"):
        return None
    if len(tree.args) != 3 or tree.keywords:
        raise ConfigInvalid("weierstrass takes exactly three arguments (a, b, terms)")
    try:
        a, b, terms = (float(sympy.sympify(ast.unparse(arg), locals={})) for arg in tree.args)
    except (sympy.SympifyError, TypeError) as exc:
        raise ConfigInvalid(f"weierstrass arguments must be numbers: {text!r}") from exc
    if b != int(b) or terms != int(terms):
        raise ConfigInvalid("weierstrass b and terms must be integers")
    return WeierstrassParams(a, int(b), int(terms))


def _numeric(expr: sympy.Expr, symbols):
    fn = sympy.lambdify(symbols, expr, modules="numpy")

    def call(*args):
        with np.errstate(all="ignore"):
            out = fn(*args)
        return np.broadcast_to(np.asarray(out, dtype=complex),
                               np.broadcast(*[np.asarray(a) for a in args]).shape)

    return call


def function_1d(text: str, grid: Grid1D) -> GridFunction1D:
    """Sample a function of ``x`` (or a Weierstrass call) on every node of ``grid``."""
    params = parse_weierstrass(text)
    if params is not None:
        return weierstrass(params.a, params.b, params.terms, grid, allow_smooth=True)
    x = sympy.Symbol("x")
    expr = parse_expression(text, {"x"})
    return GridFunction1D.from_callable(grid, _numeric(expr, [x]))


def function_2d(text: str, grid: Grid2D) -> GridFunction2D:
    """Sample a function of ``x1, x2`` on every node of ``grid``."""
    x1, x2 = sympy.symbols("x1 x2")
    expr = parse_expression(text, {"x1", "x2"})
    return GridFunction2D.from_callable(grid, _numeric(expr, [x1, x2]))


def lagrangian_from_text(text: str, dims: int = 1, order: int | None = None) -> Lagrangian:
    """Build a :class:`Lagrangian` with sympy-derived closed-form partials.

    One-dimensional Lagrangians use ``x, y, v`` (``v`` means ``v1``),
    ``v1 ... vn`` for higher order and optionally ``xi``; two-dimensional
    ones use ``x1, x2, y, v1, v2``.  The order defaults to the highest
    ``v`` index present (at least 1).
    """
    tree = _parse_tree(text)
    used = {n.id for n in ast.walk(tree) if isinstance(n, ast.Name)}
    if dims == 2:
        n_v = 2
        xs = ["x1", "x2"]
    else:
        idx = [int(n[1:]) for n in used if _VNAME.match(n)]
        n_v = order if order is not None else max(idx + [1])
        if idx and max(idx) > n_v:
            raise ConfigInvalid(f"{text!r} uses v{max(idx)} but order is {n_v}")
        xs = ["x"]
    vnames = [f"v{i}" for i in range(1, n_v + 1)]
    uses_xi = dims == 1 and "xi" in used
    allowed = set(xs) | {"y"} | set(vnames) | ({"v"} if dims == 1 else set())
    allowed |= {"xi"} if uses_xi else set()
    _check_tree(tree, allowed, text)
    expr = parse_expression(text, allowed)
    if "v" in used and "v1" in used:
        raise ConfigInvalid(f"{text!r} uses both v and v1")
    expr = expr.subs(sympy.Symbol("v"), sympy.Symbol("v1"))
    slots = ["y"] + vnames + (["xi"] if uses_xi else [])
    symbols = [sympy.Symbol(n) for n in xs + slots]
    partials = {s: _numeric(sympy.diff(expr, sympy.Symbol(s)), symbols) for s in slots}
    return Lagrangian(_numeric(expr, symbols), order=1 if dims == 2 else n_v, dims=dims,
                      uses_xi=uses_xi, partials=partials, name=text.strip())
