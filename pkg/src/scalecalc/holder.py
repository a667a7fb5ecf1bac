"""Hoelder-exponent estimation and the Weierstrass test-function generator."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .exceptions import InsufficientResolution, ParameterOutOfRange
from .grid import Grid1D, GridFunction1D

__all__ = ["estimate_holder_exponent", "weierstrass", "weierstrass_values"]

MIN_NODES = 64


def estimate_holder_exponent(f: GridFunction1D, full_output: bool = False):
    """Regression estimate of the Hoelder exponent from the sampled oscillation.

    For dyadic lags ``s = delta, 2 delta, 4 delta, ...`` up to ``(b - a)/4``
    the oscillation ``max_x |f(x + s) - f(x)|`` is computed over ``[a, b]``;
    the least-squares slope of log-oscillation against log-lag, clamped to
    ``(0, 1]``, is the estimate.

    Parameters
    ----------
    f : GridFunction1D
        At least 64 interior nodes.
    full_output : bool
        Also return a flag that is True when ``f`` is flat (zero oscillation),
        in which case the estimate is 1.

    Returns
    -------
    alpha : float
    flat : bool
        Only with ``full_output=True``.
    """
    n = f.grid.n
    if n < MIN_NODES:
        raise InsufficientResolution(f"need at least {MIN_NODES} nodes, got {n}")
    u = f.interior_values
    lags, osc = [], []
    span = f.grid.b - f.grid.a
    s = 1
    while s * f.grid.delta <= span / 4 * (1 + 1e-12):
        lags.append(s * f.grid.delta)
        osc.append(np.max(np.abs(u[s:] - u[:-s])))
        s *= 2
    osc = np.array(osc)
    scale = np.max(np.abs(u)) if u.size else 0.0
    flat = bool(np.all(osc <= 1e-14 * max(scale, 1.0)))
    if flat:
        alpha = 1.0
    else:
        keep = osc > 0
        slope = np.polyfit(np.log(np.array(lags)[keep]), np.log(osc[keep]), 1)[0]
        alpha = float(np.clip(slope, np.finfo(float).tiny, 1.0))
    return (alpha, flat) if full_output else alpha


def weierstrass_values(x, a: float, b: int, terms: int) -> np.ndarray:
    """Truncated Weierstrass sum ``sum_{k < terms} a**k cos(b**k pi x)``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k in range(terms):
        out += a ** k * np.cos(float(b) ** k * np.pi * x)
    return out


def weierstrass(a: float, b: int, terms: int, grid: Grid1D,
                allow_smooth: bool = False) -> GridFunction1D:
    """Sample a truncated Weierstrass function on every node of ``grid``.

    The result carries ``holder_alpha = ln(1/a) / ln(b)``.  The truncation
    error is bounded uniformly by ``a**terms / (1 - a)``, so ``terms`` must
    push ``a**terms`` below 1e-12.

    ``a * b <= 1`` gives a differentiable sum; it is rejected unless
    ``allow_smooth`` is set, and then no Hoelder metadata is attached.
    """
    if not 0 < a < 1:
        raise ParameterOutOfRange(f"need 0 < a < 1, got a={a}")
    if int(b) != b or b < 3 or int(b) % 2 == 0:
        raise ParameterOutOfRange(f"b must be an odd integer >= 3, got {b}")
    if int(terms) != terms or terms < 1 or a ** terms >= 1e-12:
        raise ParameterOutOfRange(
            f"terms={terms} leaves a tail a**terms={a ** terms:.3g}; need < 1e-12"
        )
    alpha = math.log(1 / a) / math.log(b)
    if a * b <= 1:
        if not allow_smooth:
            raise ParameterOutOfRange(f"a*b = {a * b:.4g} <= 1 is not the nondifferentiable regime")
        warnings.warn("a*b <= 1: Weierstrass sum is differentiable", stacklevel=2)
        alpha = None
    values = weierstrass_values(grid.nodes, a, int(b), int(terms))
    return GridFunction1D.from_callable(grid, lambda _: values, holder_alpha=alpha)
