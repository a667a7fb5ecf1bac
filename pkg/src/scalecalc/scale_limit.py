"""Numerical realisation of the h -> 0 scale-limit operator.

The box quotient at each node is sampled on a geometric h-sequence and the
model ``c0 + c1 * h**gamma`` (gamma in [0.3, 2]) is fitted by least squares,
separately for the real and imaginary parts.  ``c0`` is the convergent part;
what the model does not explain is treated as the non-convergent E-part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .box import box_stencil
from .exceptions import FitDegenerate, OutOfDomain, ParameterOutOfRange
from .grid import Grid1D, GridFunction1D

__all__ = ["BoxDerivativeConfig", "ScaleLimitResult", "ScaleFit", "fit_scale_limit",
           "scale_derivative", "box_quotient_stack"]

GAMMA_RANGE = (0.3, 2.0)
_GAMMAS = np.round(np.arange(GAMMA_RANGE[0], GAMMA_RANGE[1] + 5e-3, 0.01), 10)


@dataclass(frozen=True)
class BoxDerivativeConfig:
    """Base step, geometric h-sequence and the non-convergence threshold tau.

    ``h_k = h * ratio**k`` for ``k < levels``, each snapped to the nearest
    multiple of the grid spacing when a grid is supplied.
    """

    h: float
    levels: int = 6
    ratio: float = 0.5
    econv_threshold: float = 0.1

    def __post_init__(self):
        if not self.h > 0:
            raise ParameterOutOfRange(f"h must be positive, got {self.h}")
        if int(self.levels) != self.levels or self.levels < 1:
            raise ParameterOutOfRange(f"levels must be a positive integer, got {self.levels}")
        if not 0 < self.ratio < 1:
            raise ParameterOutOfRange(f"ratio must lie in (0, 1), got {self.ratio}")
        if not self.econv_threshold > 0:
            raise ParameterOutOfRange("econv_threshold must be positive")

    def h_sequence(self, grid: Grid1D | None = None) -> np.ndarray:
        raw = self.h * self.ratio ** np.arange(self.levels)
        if grid is None:
            return raw
        grid.steps(self.h)
        if raw[-1] < grid.delta * (1 - 1e-9):
            raise ParameterOutOfRange(
                f"finest step {raw[-1]:.3g} is below the grid spacing {grid.delta:.3g}"
            )
        m = np.maximum(np.rint(raw / grid.delta).astype(int), 1)
        if np.any(np.diff(m) >= 0):
            raise ParameterOutOfRange(
                f"h-sequence collapses after snapping to grid multiples: steps {m.tolist()}"
            )
        return m * grid.delta


@dataclass(frozen=True, eq=False)
class ScaleLimitResult:
    """Outcome of the scale-limit fit; array fields hold one entry per node.

    Index with ``result[k]`` to get the scalar result at node ``k``.
    """

    limit: np.ndarray
    fit_residual: np.ndarray
    convergent: np.ndarray
    epart_magnitude: np.ndarray
    gamma: np.ndarray | None = None

    def __getitem__(self, k) -> "ScaleLimitResult":
        return ScaleLimitResult(
            limit=complex(self.limit[k]),
            fit_residual=float(self.fit_residual[k]),
            convergent=bool(self.convergent[k]),
            epart_magnitude=float(self.epart_magnitude[k]),
            gamma=None if self.gamma is None else self.gamma[k],
        )


@dataclass(frozen=True, eq=False)
class ScaleFit:
    """Per-level detail of a fit: the quotients, the model and its residual."""

    h_sequence: np.ndarray
    quotients: np.ndarray
    model: np.ndarray
    result: ScaleLimitResult

    @property
    def epart(self) -> np.ndarray:
        return self.quotients - self.model


def _power_fit(d: np.ndarray, hs: np.ndarray):
    """Best ``c0 + c1 h**gamma`` per column of ``d`` (shape (K, N)), gamma on a grid."""
    dm = d.mean(axis=0)
    dc = d - dm
    sst = np.einsum("kn,kn->n", dc, dc)
    best = np.full(d.shape[1], np.inf)
    c0 = dm.copy()
    c1 = np.zeros_like(dm)
    gam = np.full(d.shape[1], _GAMMAS[0])
    for g in _GAMMAS:
        t = hs ** g
        tc = t - t.mean()
        stt = tc @ tc
        slope = (tc @ dc) / stt
        resid = dc - np.outer(tc, slope)
        ssr = np.einsum("kn,kn->n", resid, resid)
        better = ssr < best * (1 - 1e-12)
        best = np.where(better, ssr, best)
        c1 = np.where(better, slope, c1)
        c0 = np.where(better, dm - slope * t.mean(), c0)
        gam = np.where(better, g, gam)
    floor = 1e-9 * np.max(np.abs(d), axis=0) + 1e-300
    misfit = np.sqrt(np.maximum(best, 0.0)) / np.maximum(np.sqrt(sst), floor)
    return c0, c1, gam, misfit


def fit_scale_limit(quotients: np.ndarray, hs: np.ndarray, tau: float = 0.1) -> ScaleFit:
    """Fit the scale-limit model to a stack of quotients ``(K, N)`` over steps ``hs``."""
    hs = np.asarray(hs, dtype=float)
    if len(hs) < 3:
        raise FitDegenerate(f"scale limit needs at least 3 h levels, got {len(hs)}")
    q = np.asarray(quotients, dtype=complex)
    re = _power_fit(q.real, hs)
    im = _power_fit(q.imag, hs)
    limit = re[0] + 1j * im[0]
    hcol = hs[:, None]
    model = (re[0] + re[1] * hcol ** re[2]) + 1j * (im[0] + im[1] * hcol ** im[2])
    misfit = np.maximum(re[3], im[3])
    result = ScaleLimitResult(
        limit=limit,
        fit_residual=misfit,
        convergent=misfit <= tau,
        epart_magnitude=np.abs(q[-1] - model[-1]),
        gamma=re[2] + 1j * im[2],
    )
    return ScaleFit(hs, q, model, result)


def box_quotient_stack(f: GridFunction1D, hs, fallback: bool = False) -> np.ndarray:
    """Box quotients of ``f`` on the interior nodes for every step in ``hs``."""
    rows = []
    for h in hs:
        values, _, _ = box_stencil(f.values, f.grid.steps(h), h, trusted=f.trusted,
                                   fallback=fallback)
        inner = values[f.grid.interior]
        if not np.all(np.isfinite(inner)):
            raise OutOfDomain(
                f"step h={h:.6g} needs {f.grid.steps(h)} ghost node(s); grid has {f.grid.ghost}"
            )
        rows.append(inner)
    return np.array(rows)


def scale_derivative(f: GridFunction1D, cfg: BoxDerivativeConfig, fallback: bool = False):
    """Scale derivative of ``f`` on the interior nodes of its grid.

    Returns ``(limit, result)``: a grid function holding the extracted limit
    on ``[a, b]`` (NaN on the ghost band) and the per-node fit diagnostics.
    For ``f`` in C^1 the limit approximates ``f'``.
    """
    hs = cfg.h_sequence(f.grid)
    if len(hs) < 3:
        raise FitDegenerate(f"scale limit needs at least 3 h levels, got {len(hs)}")
    fit = fit_scale_limit(box_quotient_stack(f, hs, fallback), hs, cfg.econv_threshold)
    values = np.full(f.grid.size, np.nan + 0j)
    values[f.grid.interior] = fit.result.limit
    trusted = np.zeros(f.grid.size, bool)
    trusted[f.grid.interior] = fit.result.convergent
    return GridFunction1D(f.grid, values, source=f.source, trusted=trusted), fit.result
