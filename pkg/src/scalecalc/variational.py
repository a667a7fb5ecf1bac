"""Euler-Lagrange residuals for box-derivative Lagrangians.

All residuals are evaluated at a fixed step h with the complex box rule
applied at every stage.  Every variant returns an :class:`ELReport`.
:func:`gateaux_derivative` differentiates the action itself and serves as an
independent check on the residual fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence, Union

import numpy as np

from .box import box_stencil
from .exceptions import (
    ArityMismatch,
    ConstraintViolated,
    GridMismatch,
    NondegeneracyFailure,
    OutOfDomain,
    VariationClassViolation,
)
from .grid import Grid1D, Grid2D, GridFunction1D, GridFunction2D
from .identities import quad_1d, quad_2d
from .lagrangian import Lagrangian

__all__ = [
    "Trajectory",
    "ELReport",
    "Action",
    "el_residual_1d",
    "natural_bc_1d",
    "iso_solve",
    "el_residual_parameter",
    "el_residual_higher",
    "el_residual_2d",
    "natural_bc_2d",
    "gateaux_derivative",
    "admissible_variations",
    "admissible_variations_2d",
    "VARIANTS",
]

VARIANTS = ("first_order", "natural_bc", "isoperimetric", "parameter", "higher_order",
            "double_integral", "natural_bc_2d")
FIXED_BOUNDARY = {"first_order", "isoperimetric", "parameter", "higher_order", "double_integral"}

EXACT_RTOL = 1e-8
LIMIT_C = 10.0
VARIATION_ATOL = 1e-12

GridFunction = Union[GridFunction1D, GridFunction2D]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A candidate extremal with its boundary regime.

    For ``boundary="fixed"`` the endpoint values (1D) or the boundary rim
    (2D) are stored and must coincide with the samples.  Box derivatives are
    cached per ``(h, order)``.
    """

    y: GridFunction
    boundary: Literal["fixed", "free"] = "free"
    boundary_values: Optional[np.ndarray] = None
    box_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.boundary not in ("fixed", "free"):
            raise ValueError(f"boundary must be 'fixed' or 'free', got {self.boundary!r}")
        if self.boundary == "fixed":
            rim = _rim(self.y)
            if self.boundary_values is None:
                object.__setattr__(self, "boundary_values", rim.copy())
            elif not np.array_equal(np.asarray(self.boundary_values, complex), rim):
                raise ValueError("stored boundary values differ from the trajectory samples")

    @classmethod
    def fixed(cls, y: GridFunction) -> "Trajectory":
        return cls(y, "fixed")

    @classmethod
    def free(cls, y: GridFunction) -> "Trajectory":
        return cls(y, "free")

    @property
    def grid(self):
        return self.y.grid

    def box(self, h: float, k: int = 1, fallback: bool = False) -> np.ndarray:
        """Values of the k-th box derivative at step h on every node (NaN where undefined)."""
        key = (float(h), int(k), bool(fallback))
        if key not in self.box_cache:
            if k == 0:
                self.box_cache[key] = (self.y.values, self.y.trusted)
            else:
                prev = self.box(h, k - 1, fallback)
                t = self.box_trusted(h, k - 1, fallback)
                m = self.y.grid.steps(h)
                vals, trusted, _ = box_stencil(prev, m, h, trusted=t, fallback=fallback)
                self.box_cache[key] = (vals, trusted)
        return self.box_cache[key][0]

    def box_trusted(self, h: float, k: int = 1, fallback: bool = False) -> np.ndarray:
        self.box(h, k, fallback)
        return self.box_cache[(float(h), int(k), bool(fallback))][1]

    def partial_box(self, h: float, axis: int, fallback: bool = False):
        key = ("partial", float(h), int(axis), bool(fallback))
        if key not in self.box_cache:
            m = self.y.grid.axis(axis).steps(h)
            vals, trusted, _ = box_stencil(self.y.values, m, h, axis=axis - 1,
                                           trusted=self.y.trusted, fallback=fallback)
            self.box_cache[key] = (vals, trusted)
        return self.box_cache[key]


def _rim(y: GridFunction) -> np.ndarray:
    if isinstance(y, GridFunction1D):
        g = y.grid
        return np.array([y.values[g.ghost], y.values[g.ghost + g.n - 1]])
    i1, i2 = y.grid.interior
    return np.concatenate([y.values[i1.start, i2], y.values[i1.stop - 1, i2],
                           y.values[i1, i2.start], y.values[i1, i2.stop - 1]])


def _as_trajectory(y) -> Trajectory:
    return y if isinstance(y, Trajectory) else Trajectory(y)


@dataclass(frozen=True, eq=False)
class ELReport:
    """Residual field and verdict for one Euler-Lagrange variant.

    ``tol`` is the exact-family tolerance ``1e-8 * scale`` unless overridden;
    ``tol_limit = 10 * scale * h`` is the smooth-limit tolerance.  Both
    verdicts are reported.
    """

    variant: str
    residual_field: GridFunction
    residual_norm: float
    boundary_defects: tuple = ()
    multiplier: Optional[complex] = None
    parameter: Optional[complex] = None
    is_extremal: bool = False
    h: float = math.nan
    scale: float = 1.0
    tol: float = math.nan
    tol_limit: float = math.nan
    is_extremal_limit: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    def defect(self, name: str) -> complex:
        return dict(self.boundary_defects)[name]


def _interior_mask(g) -> np.ndarray:
    if isinstance(g, Grid1D):
        mask = np.zeros(g.size, bool)
        mask[g.interior] = True
    else:
        mask = np.zeros(g.shape, bool)
        mask[g.interior] = True
    return mask


def _sup_trusted(values: np.ndarray, trusted: np.ndarray, grid) -> float:
    sel = _interior_mask(grid) & trusted
    return float(np.max(np.abs(values[sel]))) if sel.any() else math.nan


def _sup_interior(values: np.ndarray, grid) -> float:
    u = np.abs(values[_interior_mask(grid)])
    u = u[np.isfinite(u)]
    return float(u.max()) if u.size else 0.0


def _require_ghost(grid, stages: int, h: float, fallback: bool, what: str):
    axes = [grid] if isinstance(grid, Grid1D) else [grid.axis1, grid.axis2]
    for g in axes:
        need = stages * g.steps(h)
        if g.ghost < need and not fallback:
            raise OutOfDomain(
                f"{what} at h={h!r} needs a ghost band of {need} node(s); grid has {g.ghost}"
            )


def _check_1d(L: Lagrangian, order: int | None = 1):
    if L.dims != 1 or (order is not None and L.order != order):
        raise ArityMismatch(
            f"expected a 1-D Lagrangian of order {order}, got dims={L.dims}, order={L.order}"
        )


def _first_order_fields(L: Lagrangian, traj: Trajectory, h: float, xi, fallback: bool):
    """``(q, p, residual, trusted)`` with q = dL/dy, p = dL/dv, residual = q - box(p)."""
    grid = traj.grid
    _require_ghost(grid, 2, h, fallback, "first-order residual")
    y = traj.y
    v = traj.box(h, 1, fallback)
    t_v = traj.box_trusted(h, 1, fallback)
    x = grid.nodes
    q = L.partial("y", x, y.values, (v,), xi)
    p = L.partial("v1", x, y.values, (v,), xi)
    bp, t_bp, _ = box_stencil(p, grid.steps(h), h, trusted=t_v & y.trusted, fallback=fallback)
    residual = q - bp
    trusted = t_bp & t_v & y.trusted
    return q, p, residual, trusted


def _open_domain(traj: Trajectory, trusted: np.ndarray) -> np.ndarray:
    """Drop the boundary rim for fixed trajectories; the equation holds inside only."""
    if traj.boundary != "fixed":
        return trusted
    out = trusted.copy()
    g = traj.grid
    if isinstance(g, Grid1D):
        out[g.ghost] = out[g.ghost + g.n - 1] = False
    else:
        i1, i2 = g.interior
        out[i1.start, i2] = out[i1.stop - 1, i2] = False
        out[i1, i2.start] = out[i1, i2.stop - 1] = False
    return out


def _scale(*arrays_and_grid) -> float:
    *arrays, grid = arrays_and_grid
    return max([1.0] + [_sup_interior(a, grid) for a in arrays])


def _report(variant, grid, residual, trusted, h, scale, tol, *, boundary=(), extra_ok=True,
            multiplier=None, parameter=None, cls=GridFunction1D, gate_boundary=True) -> ELReport:
    norm = _sup_trusted(residual, trusted, grid)
    tol = EXACT_RTOL * scale if tol is None else tol
    tol_limit = LIMIT_C * scale * h
    defects = [abs(d) for _, d in boundary] if gate_boundary else []
    exact_ok = norm <= tol and all(d <= tol for d in defects)
    limit_ok = norm <= tol_limit and all(d <= tol_limit for d in defects)
    field_ = cls(grid, residual, trusted=trusted)
    return ELReport(variant, field_, norm, tuple(boundary), multiplier, parameter,
                    bool(exact_ok and extra_ok), h, scale, tol, tol_limit,
                    bool(limit_ok and extra_ok))


def el_residual_1d(L: Lagrangian, y, h: float, tol: float | None = None,
                   fallback: bool = False) -> ELReport:
    """Residual ``dL/dy[y] - box_h(dL/dv[y])`` of the first-order equation.

    Examples
    --------
    ``L = v**2/2 + y`` and ``y = x**2/2`` give a residual that vanishes
    identically at every h; with ``y = x`` the residual is 1 everywhere.
    """
    _check_1d(L)
    if L.uses_xi:
        raise ArityMismatch("Lagrangian depends on xi; use el_residual_parameter")
    traj = _as_trajectory(y)
    q, p, residual, trusted = _first_order_fields(L, traj, h, None, fallback)
    return _report("first_order", traj.grid, residual, _open_domain(traj, trusted), h,
                   _scale(q, p, traj.grid), tol)


def natural_bc_1d(L: Lagrangian, y, h: float, tol: float | None = None,
                  fallback: bool = False) -> ELReport:
    """Interior residual plus ``dL/dv`` at both endpoints, for free boundaries."""
    _check_1d(L)
    traj = _as_trajectory(y)
    if traj.boundary != "free":
        raise ValueError("natural boundary conditions apply to free trajectories only")
    q, p, residual, trusted = _first_order_fields(L, traj, h, None, fallback)
    g = traj.grid
    boundary = (("dL/dv(a)", complex(p[g.ghost])), ("dL/dv(b)", complex(p[g.ghost + g.n - 1])))
    return _report("natural_bc", g, residual, trusted, h, _scale(q, p, g), tol,
                   boundary=boundary)


def iso_solve(L: Lagrangian, theta: Lagrangian, y, Cval: complex, h: float,
              tol: float | None = None, fallback: bool = False) -> ELReport:
    """Multiplier and combined residual for the constrained first-order problem.

    The multiplier minimises ``||R_L - lambda R_theta||`` over the interior,
    where ``R_L`` and ``R_theta`` are the first-order residual fields of the
    action and of the constraint.

    Raises
    ------
    ConstraintViolated
        If ``int theta[y]`` misses ``Cval`` by more than ``1e-6 max(1, |Cval|)``.
    NondegeneracyFailure
        If ``y`` is itself an extremal of the constraint functional.
    """
    _check_1d(L)
    _check_1d(theta)
    traj = _as_trajectory(y)
    g = traj.grid
    v = traj.box(h, 1, fallback)
    x = g.nodes
    theta_vals = GridFunction1D(g, theta(x, traj.y.values, (v,)))
    level = quad_1d(theta_vals)
    if abs(level - Cval) > 1e-6 * max(1.0, abs(Cval)):
        raise ConstraintViolated(f"constraint integral {level} differs from C={Cval}")
    qL, pL, RL, tL = _first_order_fields(L, traj, h, None, fallback)
    qT, pT, RT, tT = _first_order_fields(theta, traj, h, None, fallback)
    sel = _interior_mask(g) & tL & tT
    scale_theta = _scale(qT, pT, g)
    if not sel.any() or np.max(np.abs(RT[sel])) <= EXACT_RTOL * scale_theta:
        raise NondegeneracyFailure("trajectory is an extremal of the constraint functional")
    lam = complex(np.vdot(RT[sel], RL[sel]) / np.vdot(RT[sel], RT[sel]))
    combined = RL - lam * RT
    return _report("isoperimetric", g, combined, _open_domain(traj, tL & tT), h,
                   max(_scale(qL, pL, g), abs(lam) * scale_theta), tol,
                   boundary=(("constraint", complex(level - Cval)),), multiplier=lam,
                   gate_boundary=False)


def _parameter_integral(L, traj, h, xi, fallback):
    v = traj.box(h, 1, fallback)
    dxi = L.partial("xi", traj.grid.nodes, traj.y.values, (v,), xi)
    return quad_1d(GridFunction1D(traj.grid, dxi))


def el_residual_parameter(L: Lagrangian, y, xi: complex | None, h: float,
                          solve_xi: bool = False, tol: float | None = None,
                          fallback: bool = False) -> ELReport:
    """Residual in y at fixed ``xi`` plus the scalar condition ``int dL/dxi = 0``.

    With ``solve_xi=True`` the scalar condition is solved for ``xi``, which
    requires ``dL/dxi`` to be affine in ``xi``; the report is then evaluated
    at the solution.
    """
    _check_1d(L)
    if not L.uses_xi:
        raise ArityMismatch("Lagrangian does not depend on a parameter xi")
    traj = _as_trajectory(y)
    if solve_xi:
        i0, i1, i2 = (_parameter_integral(L, traj, h, z, fallback) for z in (0.0, 1.0, 2.0))
        size = max(1.0, abs(i0), abs(i1), abs(i2))
        if abs(i2 - 2 * i1 + i0) > 1e-9 * size:
            raise ValueError("dL/dxi is not affine in xi; cannot solve for the parameter")
        slope = i1 - i0
        if abs(slope) <= 1e-14 * size:
            if abs(i0) > 1e-12 * size:
                raise ValueError("parameter condition has no solution: integral is constant nonzero")
            xi = 0.0 if xi is None else xi
        else:
            xi = -i0 / slope
    if xi is None:
        raise ArityMismatch("xi is required unless solve_xi=True")
    xi = complex(xi)
    q, p, residual, trusted = _first_order_fields(L, traj, h, xi, fallback)
    integral = _parameter_integral(L, traj, h, xi, fallback)
    return _report("parameter", traj.grid, residual, _open_domain(traj, trusted), h, _scale(q, p, traj.grid), tol,
                   boundary=(("parameter_integral", complex(integral)),), parameter=xi)


def el_residual_higher(L: Lagrangian, y, h: float, tol: float | None = None,
                       fallback: bool = False) -> ELReport:
    """Residual ``dL/dy + sum_i (-1)^i box_h^i(dL/dv_i)`` for an order-n Lagrangian.

    Needs a ghost band of ``2 n h / delta`` nodes.  For ``n = 1`` the field
    coincides bit for bit with :func:`el_residual_1d`.
    """
    _check_1d(L, order=None)
    if L.uses_xi:
        raise ArityMismatch("Lagrangian depends on xi")
    traj = _as_trajectory(y)
    g = traj.grid
    n = L.order
    _require_ghost(g, 2 * n, h, fallback, f"order-{n} residual")
    m = g.steps(h)
    vs = tuple(traj.box(h, k, fallback) for k in range(1, n + 1))
    t_in = traj.y.trusted.copy()
    for k in range(1, n + 1):
        t_in &= traj.box_trusted(h, k, fallback)
    x = g.nodes
    residual = L.partial("y", x, traj.y.values, vs)
    trusted = t_in.copy()
    ps = []
    for i in range(1, n + 1):
        p = L.partial(f"v{i}", x, traj.y.values, vs)
        ps.append(p)
        term, t_term = p, t_in
        for _ in range(i):
            term, t_term, _ = box_stencil(term, m, h, trusted=t_term, fallback=fallback)
        residual = residual - term if i % 2 else residual + term
        trusted &= t_term
    q = L.partial("y", x, traj.y.values, vs)
    return _report("higher_order", g, residual, _open_domain(traj, trusted), h, _scale(q, *ps, g), tol)


def _fields_2d(L: Lagrangian, traj: Trajectory, h: float, fallback: bool):
    if L.dims != 2:
        raise ArityMismatch("expected a two-dimensional Lagrangian")
    if not isinstance(traj.y, GridFunction2D):
        raise GridMismatch("double-integral residuals need a GridFunction2D trajectory")
    g = traj.grid
    _require_ghost(g, 2, h, fallback, "double-integral residual")
    v1, t1 = traj.partial_box(h, 1, fallback)
    v2, t2 = traj.partial_box(h, 2, fallback)
    x = g.mesh()
    yv = traj.y.values
    q = L.partial("y", x, yv, (v1, v2))
    p1 = L.partial("v1", x, yv, (v1, v2))
    p2 = L.partial("v2", x, yv, (v1, v2))
    t_in = traj.y.trusted & t1 & t2
    b1, tb1, _ = box_stencil(p1, g.axis1.steps(h), h, axis=0, trusted=t_in, fallback=fallback)
    b2, tb2, _ = box_stencil(p2, g.axis2.steps(h), h, axis=1, trusted=t_in, fallback=fallback)
    residual = q - b1 - b2
    return q, p1, p2, residual, t_in & tb1 & tb2


def el_residual_2d(L: Lagrangian, y, h: float, tol: float | None = None,
                   fallback: bool = False) -> ELReport:
    """Residual ``dL/dy - box_1(dL/dv1) - box_2(dL/dv2)`` over the rectangle."""
    traj = _as_trajectory(y)
    q, p1, p2, residual, trusted = _fields_2d(L, traj, h, fallback)
    return _report("double_integral", traj.grid, residual, _open_domain(traj, trusted), h,
                   _scale(q, p1, p2, traj.grid), tol, cls=GridFunction2D)


def natural_bc_2d(L: Lagrangian, y, h: float, tol: float | None = None,
                  fallback: bool = False) -> ELReport:
    """Interior residual plus edge-wise sup-norms of ``dL/dv1`` (x1 = a, b)
    and ``dL/dv2`` (x2 = c, d)."""
    traj = _as_trajectory(y)
    if traj.boundary != "free":
        raise ValueError("natural boundary conditions apply to free trajectories only")
    q, p1, p2, residual, trusted = _fields_2d(L, traj, h, fallback)
    i1, i2 = traj.grid.interior
    edges = (
        ("dL/dv1(x1=a)", np.max(np.abs(p1[i1.start, i2]))),
        ("dL/dv1(x1=b)", np.max(np.abs(p1[i1.stop - 1, i2]))),
        ("dL/dv2(x2=c)", np.max(np.abs(p2[i1, i2.start]))),
        ("dL/dv2(x2=d)", np.max(np.abs(p2[i1, i2.stop - 1]))),
    )
    boundary = tuple((name, complex(val)) for name, val in edges)
    return _report("natural_bc_2d", traj.grid, residual, trusted, h,
                   _scale(q, p1, p2, traj.grid), tol, boundary=boundary, cls=GridFunction2D)


@dataclass(frozen=True)
class Action:
    """The functional ``Phi(y) = int L[y]`` for one variant, at fixed step h."""

    lagrangian: Lagrangian
    variant: str = "first_order"
    xi: Optional[complex] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if (self.lagrangian.dims == 2) != (self.variant in ("double_integral", "natural_bc_2d")):
            raise ArityMismatch(f"variant {self.variant!r} does not match dims={self.lagrangian.dims}")

    @property
    def fixed_boundary(self) -> bool:
        return self.variant in FIXED_BOUNDARY

    def __call__(self, y: GridFunction, h: float, xi=None) -> complex:
        L = self.lagrangian
        xi = self.xi if xi is None else xi
        if L.dims == 2:
            traj = Trajectory(y)
            v1, _ = traj.partial_box(h, 1)
            v2, _ = traj.partial_box(h, 2)
            vals = L(y.grid.mesh(), y.values, (v1, v2), xi)
            return quad_2d(GridFunction2D(y.grid, vals))
        traj = Trajectory(y)
        vs = tuple(traj.box(h, k) for k in range(1, L.order + 1))
        vals = L(y.grid.nodes, y.values, vs, xi)
        return quad_1d(GridFunction1D(y.grid, vals))


def _check_variation(phi: Action, y: GridFunction, w: GridFunction, h: float):
    if type(w) is not type(y) or not w.grid.same_nodes(y.grid):
        raise GridMismatch("variation must live on the trajectory's grid")
    if not phi.fixed_boundary:
        return
    rim = _rim(w)
    if np.max(np.abs(rim)) > VARIATION_ATOL:
        raise VariationClassViolation(
            f"variation reaches {np.max(np.abs(rim)):.3g} on the boundary; fixed-boundary "
            "variants need w = 0 there"
        )
    if phi.variant == "higher_order":
        traj = Trajectory(w)
        g = w.grid
        for k in range(1, phi.lagrangian.order):
            bk = traj.box(h, k)
            ends = np.array([bk[g.ghost], bk[g.ghost + g.n - 1]])
            if not np.all(np.isfinite(ends)) or np.max(np.abs(ends)) > VARIATION_ATOL:
                raise VariationClassViolation(
                    f"order-{k} box derivative of the variation does not vanish at the endpoints"
                )


def gateaux_derivative(phi: Action, y, w: GridFunction, h: float,
                       xi_direction: complex = 0.0) -> complex:
    """Directional derivative ``d/de Phi(y + e w, xi + e delta)`` at ``e = 0``.

    Central difference with ``e = 1e-5 * scale``, refined once by Richardson
    extrapolation over ``e`` and ``e/2``.  Independent of every residual
    routine, so it cross-checks them.

    Raises
    ------
    VariationClassViolation
        If ``w`` breaks the endpoint conditions of a fixed-boundary variant.
    """
    y = y.y if isinstance(y, Trajectory) else y
    _check_variation(phi, y, w, h)
    w_size = float(np.max(np.abs(w.values[np.isfinite(w.values)]), initial=0.0))
    if w_size == 0.0 and xi_direction == 0:
        return 0j
    y_size = max(1.0, _sup_interior(y.values, y.grid))
    eps = 1e-5 * y_size / max(w_size, abs(xi_direction), 1e-300)
    xi0 = phi.xi

    def central(e):
        xi_up = None if xi0 is None else xi0 + e * xi_direction
        xi_dn = None if xi0 is None else xi0 - e * xi_direction
        return (phi(y + e * w, h, xi_up) - phi(y - e * w, h, xi_dn)) / (2 * e)

    return complex((4 * central(eps / 2) - central(eps)) / 3)


def _window(t: np.ndarray, lo: float, hi: float, power: int) -> np.ndarray:
    half = (hi - lo) / 2
    return np.maximum(0.0, (t - lo) * (hi - t) / half ** 2) ** power


def admissible_variations(grid: Grid1D, count: int, seed: int = 0, margin: float = 0.0,
                          degree: int = 4, power: int = 4) -> list[GridFunction1D]:
    """Pseudo-random polynomial-windowed variations vanishing near both endpoints.

    Each variation is a random Legendre polynomial of the given degree times
    the clipped window ``max(0, (x - a - margin)(b - margin - x))**power``,
    so it and its box derivatives vanish on ``[a, a + margin]`` and
    ``[b - margin, b]`` (and on the ghost band).
    """
    rng = np.random.default_rng(seed)
    x = grid.nodes
    lo, hi = grid.a + margin, grid.b - margin
    if not hi > lo:
        raise ValueError("margin leaves no room for the variation")
    t = 2 * (x - grid.a) / (grid.b - grid.a) - 1
    win = _window(x, lo, hi, power)
    out = []
    for _ in range(count):
        coeffs = rng.standard_normal(degree + 1)
        out.append(GridFunction1D(grid, win * np.polynomial.legendre.legval(t, coeffs),
                                  source="closed-form"))
    return out


def admissible_variations_2d(grid: Grid2D, count: int, seed: int = 0, margin: float = 0.0,
                             degree: int = 3, power: int = 4) -> list[GridFunction2D]:
    """Two-dimensional analogue of :func:`admissible_variations` (tensor windows)."""
    rng = np.random.default_rng(seed)
    x1, x2 = grid.mesh()
    win = (_window(x1, grid.a + margin, grid.b - margin, power)
           * _window(x2, grid.c + margin, grid.d - margin, power))
    t1 = 2 * (x1 - grid.a) / (grid.b - grid.a) - 1
    t2 = 2 * (x2 - grid.c) / (grid.d - grid.c) - 1
    out = []
    for _ in range(count):
        coeffs = rng.standard_normal((degree + 1, degree + 1))
        out.append(GridFunction2D(grid, win * np.polynomial.legendre.legval2d(t1, t2, coeffs),
                                  source="closed-form"))
    return out
