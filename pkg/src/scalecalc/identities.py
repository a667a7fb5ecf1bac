"""Trapezoid quadrature and defect meters for the box-calculus identities.

Each meter evaluates both sides of an identity at one or more fixed steps h
and reports the gap in a :class:`DefectReport`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .box import box_derivative_h, partial_box_derivative_h
from .exceptions import BoundaryNotZero, FitDegenerate, GridMismatch, OutOfDomain
from .grid import Grid1D, GridFunction1D, GridFunction2D
from .scale_limit import BoxDerivativeConfig, box_quotient_stack, fit_scale_limit

__all__ = [
    "DefectReport",
    "quad_1d",
    "quad_2d",
    "boundary_integral",
    "leibniz_defect",
    "barrow_defect",
    "econdition_estimate",
    "green_defect",
    "byparts2d_defect",
    "loglog_slope",
]

IDENTITIES = ("leibniz", "barrow", "econdition", "green", "byparts2d", "byparts2d_zero_boundary")


@dataclass(frozen=True)
class DefectReport:
    """Measured defect of one identity over a strictly decreasing h-sequence."""

    identity: str
    h_sequence: tuple[float, ...]
    defect_norm: tuple[float, ...]
    fitted_slope: float
    passed: bool
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.identity not in IDENTITIES:
            raise ValueError(f"unknown identity {self.identity!r}")
        if len(self.h_sequence) != len(self.defect_norm):
            raise ValueError("h_sequence and defect_norm lengths differ")
        if any(np.diff(self.h_sequence) >= 0):
            raise ValueError("h_sequence must be strictly decreasing")
        if any(d < 0 for d in self.defect_norm):
            raise ValueError("defects must be nonnegative")


def loglog_slope(hs: Sequence[float], defects: Sequence[float]) -> float:
    """Least-squares slope of log(defect) against log(h); NaN if under two positive defects."""
    hs = np.asarray(hs, float)
    d = np.asarray(defects, float)
    keep = d > 0
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(hs[keep]), np.log(d[keep]), 1)[0])


def _h_levels(h, grid: Grid1D | None = None) -> np.ndarray:
    if isinstance(h, BoxDerivativeConfig):
        return h.h_sequence(grid)
    hs = np.atleast_1d(np.asarray(h, dtype=float))
    if hs.ndim != 1 or hs.size == 0:
        raise ValueError("h must be a positive number or a 1-D sequence")
    if np.any(np.diff(hs) >= 0):
        raise ValueError("h-sequence must be strictly decreasing")
    if grid is not None:
        for hk in hs:
            grid.steps(hk)
    return hs


def _trapezoid(u: np.ndarray, delta: float, axis: int = -1):
    u = np.moveaxis(np.asarray(u), axis, -1)
    return delta * (u.sum(axis=-1) - 0.5 * (u[..., 0] + u[..., -1]))


def _span_slice(grid: Grid1D, a: float | None, b: float | None) -> slice:
    lo = grid.ghost if a is None else grid.index_of(a)
    hi = grid.ghost + grid.n - 1 if b is None else grid.index_of(b)
    if hi <= lo:
        raise OutOfDomain(f"empty or reversed integration range [{a}, {b}]")
    return slice(lo, hi + 1)


def quad_1d(f: GridFunction1D, a: float | None = None, b: float | None = None) -> complex:
    """Trapezoid rule over the nodes of ``[a, b]`` (default: the grid interval).

    ``a`` and ``b`` must be grid nodes, ghost nodes included.
    """
    sl = _span_slice(f.grid, a, b)
    u = f.values[sl]
    if not np.all(np.isfinite(u)):
        raise OutOfDomain("integrand undefined on part of the integration range")
    return complex(_trapezoid(u, f.grid.delta))


def quad_2d(f: GridFunction2D) -> complex:
    """Tensor trapezoid rule over the rectangle ``[a, b] x [c, d]``."""
    u = f.interior_values
    if not np.all(np.isfinite(u)):
        raise OutOfDomain("integrand undefined on part of the rectangle")
    inner = _trapezoid(u, f.grid.axis2.delta, axis=1)
    return complex(_trapezoid(inner, f.grid.axis1.delta))


def boundary_integral(f: GridFunction2D, g: GridFunction2D, orientation: int = 1) -> complex:
    """Line integral of ``f dx1 + g dx2`` around the rectangle.

    Evaluated edge-wise as ``int_a^b f(x1,c) - f(x1,d) dx1 +
    int_c^d g(b,x2) - g(a,x2) dx2``; ``orientation=1`` is counterclockwise,
    ``-1`` reverses the contour.
    """
    _same_grid(f, g)
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    i1, i2 = f.grid.interior
    lo1, hi1 = i1.start, i1.stop - 1
    lo2, hi2 = i2.start, i2.stop - 1
    bottom_top = f.values[i1, lo2] - f.values[i1, hi2]
    right_left = g.values[hi1, i2] - g.values[lo1, i2]
    total = (_trapezoid(bottom_top, f.grid.axis1.delta)
             + _trapezoid(right_left, f.grid.axis2.delta))
    return complex(orientation * total)


def _same_grid(*funcs):
    first = funcs[0]
    for other in funcs[1:]:
        if type(other) is not type(first) or not first.grid.same_nodes(other.grid):
            raise GridMismatch("grid functions must share one grid")


def _sup(u) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u))) if u.size else 0.0


def _check_holder_pair(alpha, beta, what: str):
    if alpha is not None and beta is not None and alpha + beta <= 1:
        warnings.warn(f"{what}: Hoelder exponents sum to {alpha + beta:.3f} <= 1; "
                      "the identity need not hold in the limit", stacklevel=3)


def leibniz_defect(f: GridFunction1D, g: GridFunction1D, h) -> DefectReport:
    """Defect of the product rule ``box(fg) = box(f) g + f box(g)`` at each step.

    ``h`` is a step, a decreasing sequence of steps, or a
    :class:`BoxDerivativeConfig`.  The sup-norm over ``[a, b]`` is recorded
    per step; the meter passes when the defect at the finest step is at most
    a quarter of the coarsest (a single step passes only if the defect is at
    rounding level).
    """
    _same_grid(f, g)
    _check_holder_pair(f.holder_alpha, g.holder_alpha, "leibniz")
    hs = _h_levels(h, f.grid)
    fg = f * g
    inner = f.grid.interior
    defects = []
    for hk in hs:
        lhs = box_derivative_h(fg, hk).values
        rhs = box_derivative_h(f, hk).values * g.values + f.values * box_derivative_h(g, hk).values
        defects.append(_sup((lhs - rhs)[inner]))
    scale = max(_sup(f.interior_values) * _sup(g.interior_values), 1.0)
    if len(hs) > 1:
        passed = defects[-1] <= 0.25 * defects[0]
    else:
        passed = defects[0] <= 1e-12 * scale
    return DefectReport("leibniz", tuple(map(float, hs)), tuple(defects),
                        loglog_slope(hs, defects), bool(passed))


def barrow_defect(f: GridFunction1D, cfg) -> DefectReport:
    """Gap ``|int_a^b box_h f dx - (f(b) - f(a))|`` for each step of ``cfg``.

    Passes when the gap is at rounding level throughout, or when it shrinks
    from the coarsest to the finest step with a positive log-log slope.  A
    single step passes when the gap is at most ``10 h sup|f|``.
    """
    hs = _h_levels(cfg, f.grid)
    grid = f.grid
    jump = f.values[grid.ghost + grid.n - 1] - f.values[grid.ghost]
    defects = [abs(quad_1d(box_derivative_h(f, hk)) - jump) for hk in hs]
    slope = loglog_slope(hs, defects)
    scale = max(_sup(f.interior_values), 1.0)
    exact = all(d <= 1e-12 * scale for d in defects)
    if len(hs) > 1:
        shrinking = slope > 0 and defects[-1] < defects[0]
    else:
        shrinking = defects[0] <= 10 * hs[0] * scale
    return DefectReport("barrow", tuple(map(float, hs)), tuple(map(float, defects)), slope,
                        bool(exact or shrinking), {"jump": jump})


def econdition_estimate(f: GridFunction1D, cfg: BoxDerivativeConfig) -> DefectReport:
    """Integral over ``[a, b]`` of the numerical E-part at each step of ``cfg``.

    The E-part is the box quotient minus the fitted convergent model used by
    the scale derivative.  Passes when the last integral is below
    ``1e-3 (b - a) sup|f|`` and no larger than the first.
    """
    hs = cfg.h_sequence(f.grid)
    if len(hs) < 3:
        raise FitDegenerate(f"E-part estimate needs at least 3 h levels, got {len(hs)}")
    fit = fit_scale_limit(box_quotient_stack(f, hs), hs, cfg.econv_threshold)
    integrals = [abs(complex(_trapezoid(e, f.grid.delta))) for e in fit.epart]
    tol = 1e-3 * (f.grid.b - f.grid.a) * _sup(f.interior_values)
    passed = integrals[-1] <= tol and (integrals[-1] <= integrals[0] or max(integrals) <= tol)
    return DefectReport("econdition", tuple(map(float, hs)), tuple(integrals),
                        loglog_slope(hs, integrals), bool(passed), {"tolerance": tol})


def _identity_pass(defects, hs, scale) -> bool:
    return all(d <= max(10 * hk * scale, 1e-10) for d, hk in zip(defects, hs))


def green_defect(f: GridFunction2D, g: GridFunction2D, h) -> DefectReport:
    """Gap between the contour integral of ``f dx1 + g dx2`` and the area integral
    of ``box g/box x1 - box f/box x2``.

    Passes when every defect is at most ``max(10 h (sup|f| + sup|g|), 1e-10)``.
    """
    _same_grid(f, g)
    hs = _h_levels(h, f.grid.axis1)
    lhs = boundary_integral(f, g)
    defects, rhs_values = [], []
    for hk in hs:
        curl = partial_box_derivative_h(g, hk, 1) - partial_box_derivative_h(f, hk, 2)
        rhs = quad_2d(curl)
        rhs_values.append(rhs)
        defects.append(abs(lhs - rhs))
    scale = _sup(f.interior_values) + _sup(g.interior_values)
    return DefectReport("green", tuple(map(float, hs)), tuple(map(float, defects)),
                        loglog_slope(hs, defects), _identity_pass(defects, hs, scale),
                        {"lhs": lhs, "rhs": rhs_values})


def byparts2d_defect(F: GridFunction2D, G: GridFunction2D, w: GridFunction2D, h,
                     zero_boundary: bool = False) -> DefectReport:
    """Defect of the two-dimensional integration-by-parts formula.

    Left side ``int_R G box w/box x1 + F box w/box x2``; right side the
    contour integral of ``-F w dx1 + G w dx2`` minus
    ``int_R (box G/box x1 + box F/box x2) w``.  With ``zero_boundary`` the
    contour term is dropped, which requires ``w`` to vanish on the boundary.
    """
    _same_grid(F, G, w)
    _check_holder_pair(F.holder_alpha, w.holder_alpha, "byparts2d")
    _check_holder_pair(G.holder_alpha, w.holder_alpha, "byparts2d")
    i1, i2 = w.grid.interior
    rim = np.concatenate([w.values[i1.start, i2], w.values[i1.stop - 1, i2],
                          w.values[i1, i2.start], w.values[i1, i2.stop - 1]])
    if zero_boundary and _sup(rim) > 1e-12:
        raise BoundaryNotZero(f"w reaches {_sup(rim):.3g} on the boundary")
    hs = _h_levels(h, w.grid.axis1)
    contour = 0j if zero_boundary else boundary_integral(-(F * w), G * w)
    defects = []
    for hk in hs:
        lhs = quad_2d(G * partial_box_derivative_h(w, hk, 1) + F * partial_box_derivative_h(w, hk, 2))
        div = partial_box_derivative_h(G, hk, 1) + partial_box_derivative_h(F, hk, 2)
        rhs = contour - quad_2d(div * w)
        defects.append(abs(lhs - rhs))
    scale = _sup((F * w).interior_values) + _sup((G * w).interior_values)
    name = "byparts2d_zero_boundary" if zero_boundary else "byparts2d"
    return DefectReport(name, tuple(map(float, hs)), tuple(map(float, defects)),
                        loglog_slope(hs, defects), _identity_pass(defects, hs, scale),
                        {"contour": contour})
