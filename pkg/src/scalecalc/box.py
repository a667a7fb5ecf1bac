"""Directional h-derivatives and complex box derivatives.

For a step ``h = m * delta`` the box derivative at a node combines the two
one-sided quotients::

    D+ = (f(x+h) - f(x)) / h,    D- = (f(x) - f(x-h)) / h
    box_h f = (D+ + D-)/2 + i (D+ - D-)/2

i.e. a central difference in the real slot and half a second difference
over h in the imaginary slot.  Complex inputs are handled by linearity,
``box_h(u + iv) = box_h u + i box_h v``.
"""

from __future__ import annotations

import numpy as np

from .exceptions import OutOfDomain, ParameterOutOfRange
from .grid import GridFunction1D, GridFunction2D

__all__ = [
    "h_derivative",
    "box_derivative_h",
    "box_derivative_n",
    "partial_box_derivative_h",
    "partial_box_derivative_n",
    "box_stencil",
]


def h_derivative(f: GridFunction1D, x: float, h: float, sigma: int) -> complex:
    """One-sided quotient ``sigma * (f(x + sigma*h) - f(x)) / h`` at the node ``x``."""
    if sigma not in (1, -1):
        raise ParameterOutOfRange(f"sigma must be +1 or -1, got {sigma}")
    m = f.grid.steps(h)
    k = f.grid.index_of(x)
    j = k + sigma * m
    if not 0 <= j < f.grid.size or not np.isfinite(f.values[j]):
        raise OutOfDomain(f"x + sigma*h = {x + sigma * h!r} is not an available node")
    return complex(sigma * (f.values[j] - f.values[k]) / h)


def box_stencil(u: np.ndarray, m: int, h: float, axis: int = 0,
                trusted: np.ndarray | None = None, fallback: bool = False):
    """Apply the box derivative along one array axis.

    Returns ``(values, trusted, fallback_mask)``.  Nodes whose stencil leaves
    the array (or touches NaN) are NaN unless ``fallback`` is set, in which
    case a one-sided quotient ``D^sigma`` fills the real slot and the
    imaginary slot is zero (both slots taken from the same one-sided pair).
    """
    u = np.moveaxis(np.asarray(u, dtype=complex), axis, 0)
    t = np.isfinite(u) if trusted is None else np.moveaxis(np.asarray(trusted, bool), axis, 0)
    n = u.shape[0]
    out = np.full(u.shape, np.nan + 0j)
    t_out = np.zeros(u.shape, bool)
    used_fallback = np.zeros(u.shape, bool)
    if n > 2 * m:
        up, mid, dn = u[2 * m:], u[m:n - m], u[:n - 2 * m]
        out[m:n - m] = (up - dn) / (2 * h) + 1j * ((up - 2 * mid + dn) / (2 * h))
        t_out[m:n - m] = t[2 * m:] & t[m:n - m] & t[:n - 2 * m]
    if fallback and n > m:
        missing = ~np.isfinite(out)
        fwd = np.full(u.shape, np.nan + 0j)
        fwd[:n - m] = (u[m:] - u[:n - m]) / h
        bwd = np.full(u.shape, np.nan + 0j)
        bwd[m:] = (u[m:] - u[:n - m]) / h
        use_fwd = missing & np.isfinite(fwd)
        out[use_fwd] = fwd[use_fwd]
        use_bwd = missing & ~use_fwd & np.isfinite(bwd)
        out[use_bwd] = bwd[use_bwd]
        used_fallback = use_fwd | use_bwd
    t_out &= np.isfinite(out) & ~used_fallback
    return (np.moveaxis(out, 0, axis), np.moveaxis(t_out, 0, axis),
            np.moveaxis(used_fallback, 0, axis))


def _merge_fallback(old, new):
    if old is None:
        return new if new.any() else None
    return old | new


def box_derivative_h(f: GridFunction1D, h: float, fallback: bool = False) -> GridFunction1D:
    """Complex box derivative of ``f`` at fixed step ``h``.

    The result is defined wherever the shifted nodes exist; every node of
    ``[a, b]`` must be covered (ghost band of at least ``h/delta`` nodes,
    or ``fallback=True`` for one-sided boundary quotients).

    Raises
    ------
    NonUniformShift
        If ``h`` is not a whole number of grid steps.
    OutOfDomain
        If some node of ``[a, b]`` cannot be computed.
    """
    m = f.grid.steps(h)
    values, trusted, fb = box_stencil(f.values, m, h, trusted=f.trusted, fallback=fallback)
    if not np.all(np.isfinite(values[f.grid.interior])):
        raise OutOfDomain(
            f"box derivative with h={h!r} needs {m} ghost node(s) per side "
            f"(grid has {f.grid.ghost}); extend the grid or enable fallback"
        )
    return GridFunction1D(f.grid, values, source=f.source, trusted=trusted,
                          fallback_mask=_merge_fallback(f.fallback_mask, fb))


def box_derivative_n(f: GridFunction1D, h: float, n: int, fallback: bool = False) -> GridFunction1D:
    """n-fold box derivative at fixed ``h``; ``n = 0`` returns ``f`` itself."""
    if int(n) != n or n < 0:
        raise ParameterOutOfRange(f"order must be a nonnegative integer, got {n}")
    out = f
    for _ in range(int(n)):
        out = box_derivative_h(out, h, fallback=fallback)
    return out


def partial_box_derivative_h(f: GridFunction2D, h: float, axis: int,
                             fallback: bool = False) -> GridFunction2D:
    """Box derivative along x1 (``axis=1``) or x2 (``axis=2``), other coordinate fixed."""
    g = f.grid.axis(axis)
    m = g.steps(h)
    values, trusted, fb = box_stencil(f.values, m, h, axis=axis - 1, trusted=f.trusted,
                                      fallback=fallback)
    if not np.all(np.isfinite(values[f.grid.interior])):
        raise OutOfDomain(
            f"partial box derivative along x{axis} with h={h!r} needs {m} ghost node(s) "
            f"(grid has {g.ghost}); extend the grid or enable fallback"
        )
    return GridFunction2D(f.grid, values, source=f.source, trusted=trusted,
                          fallback_mask=_merge_fallback(f.fallback_mask, fb))


def partial_box_derivative_n(f: GridFunction2D, h: float, axis: int, n: int,
                             fallback: bool = False) -> GridFunction2D:
    out = f
    for _ in range(int(n)):
        out = partial_box_derivative_h(out, h, axis, fallback=fallback)
    return out
