"""Uniform grids and complex-valued grid functions in one and two dimensions.

Every grid carries an optional ghost band: extra nodes beyond the interval on
each side.  Closed-form functions are sampled on the whole extended node set,
so shifted stencils near the endpoints stay central.  Values are stored as
complex arrays throughout; real inputs simply have zero imaginary part.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Optional

import numpy as np

from .exceptions import GridMismatch, NonUniformShift, OutOfDomain, ParameterOutOfRange

__all__ = ["Grid1D", "Grid2D", "GridFunction1D", "GridFunction2D"]

Source = Literal["closed-form", "sampled"]

# relative slack when deciding whether h is a whole number of grid steps
_SNAP_RTOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on ``[a, b]`` with ``n`` nodes and ``ghost`` extra nodes per side."""

    a: float
    b: float
    n: int
    ghost: int = 0

    def __post_init__(self):
        if not self.b > self.a:
            raise ParameterOutOfRange(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.n) != self.n or self.n < 3:
            raise ParameterOutOfRange(f"need an integer n >= 3, got {self.n}")
        if int(self.ghost) != self.ghost or self.ghost < 0:
            raise ParameterOutOfRange(f"ghost must be a nonnegative integer, got {self.ghost}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "ghost", int(self.ghost))

    @property
    def delta(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def size(self) -> int:
        """Total node count including both ghost bands."""
        return self.n + 2 * self.ghost

    @property
    def interior(self) -> slice:
        return slice(self.ghost, self.ghost + self.n)

    @property
    def nodes(self) -> np.ndarray:
        return self.a + (np.arange(self.size) - self.ghost) * self.delta

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[self.interior]

    def node(self, k: int) -> float:
        if not 0 <= k < self.size:
            raise OutOfDomain(f"node index {k} outside [0, {self.size})")
        return self.a + (k - self.ghost) * self.delta

    def index_of(self, x: float) -> int:
        """Index of the node at ``x``; raises if ``x`` is not a grid node."""
        pos = (x - self.a) / self.delta + self.ghost
        k = int(round(pos))
        if abs(pos - k) > 1e-6 or not 0 <= k < self.size:
            raise OutOfDomain(f"x={x!r} is not a node of {self}")
        return k

    def steps(self, h: float) -> int:
        """Number of grid steps m with ``h == m * delta``."""
        if not h > 0:
            raise ParameterOutOfRange(f"h must be positive, got {h}")
        ratio = h / self.delta
        m = int(round(ratio))
        if m < 1 or abs(ratio - m) > _SNAP_RTOL * max(1.0, ratio):
            raise NonUniformShift(
                f"h={h!r} is not a positive integer multiple of delta={self.delta!r}"
            )
        return m

    def with_ghost(self, ghost: int) -> "Grid1D":
        return replace(self, ghost=ghost)

    def same_nodes(self, other: "Grid1D") -> bool:
        return (
            self.n == other.n
            and self.ghost == other.ghost
            and np.isclose(self.a, other.a, rtol=0, atol=1e-12 * (self.b - self.a))
            and np.isclose(self.b, other.b, rtol=0, atol=1e-12 * (self.b - self.a))
        )


@dataclass(frozen=True)
class Grid2D:
    """Tensor grid on the rectangle ``[a, b] x [c, d]``.

    ``axis1`` runs along x1 (array axis 0) and ``axis2`` along x2 (array
    axis 1), so values are indexed ``values[i1, i2]``.
    """

    axis1: Grid1D
    axis2: Grid1D

    @classmethod
    def square(cls, a: float, b: float, n: int, ghost: int = 0) -> "Grid2D":
        g = Grid1D(a, b, n, ghost)
        return cls(g, g)

    @classmethod
    def rectangle(cls, a, b, c, d, n1, n2, ghost: int = 0) -> "Grid2D":
        return cls(Grid1D(a, b, n1, ghost), Grid1D(c, d, n2, ghost))

    a = property(lambda self: self.axis1.a)
    b = property(lambda self: self.axis1.b)
    c = property(lambda self: self.axis2.a)
    d = property(lambda self: self.axis2.b)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis1.size, self.axis2.size)

    @property
    def interior(self) -> tuple[slice, slice]:
        return (self.axis1.interior, self.axis2.interior)

    def axis(self, j: int) -> Grid1D:
        if j == 1:
            return self.axis1
        if j == 2:
            return self.axis2
        raise ValueError(f"axis must be 1 or 2, got {j}")

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis1.nodes, self.axis2.nodes, indexing="ij")

    def with_ghost(self, ghost: int) -> "Grid2D":
        return Grid2D(self.axis1.with_ghost(ghost), self.axis2.with_ghost(ghost))

    def same_nodes(self, other: "Grid2D") -> bool:
        return self.axis1.same_nodes(other.axis1) and self.axis2.same_nodes(other.axis2)


def _as_complex(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.shape != shape:
        raise GridMismatch(f"values have shape {arr.shape}, grid expects {shape}")
    arr.setflags(write=False)
    return arr


class _GridFunctionOps:
    """Pointwise arithmetic shared by the 1D and 2D grid functions."""

    def _combine(self, other, op):
        if isinstance(other, type(self)):
            if not self.grid.same_nodes(other.grid):
                raise GridMismatch("grid functions live on different grids")
            values = op(self.values, other.values)
            trusted = self.trusted & other.trusted
        else:
            values = op(self.values, other)
            trusted = self.trusted
        return replace(self, values=values, trusted=trusted, holder_alpha=None,
                       fallback_mask=None)

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __rsub__(self, other):
        return self._combine(other, lambda u, v: v - u)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(other, np.true_divide)

    def __neg__(self):
        return self._combine(-1.0, np.multiply)

    def map(self, func: Callable[[np.ndarray], np.ndarray]):
        """Apply an elementwise function to the values."""
        return replace(self, values=func(self.values), holder_alpha=None, fallback_mask=None)

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.values)


@dataclass(frozen=True, eq=False)
class GridFunction1D(_GridFunctionOps):
    """Complex samples of a function on every node of a :class:`Grid1D`.

    ``trusted`` marks nodes whose value came from central stencils on trusted
    inputs; one-sided boundary fallbacks clear it.  Undefined nodes hold NaN.
    """

    grid: Grid1D
    values: np.ndarray
    holder_alpha: Optional[float] = None
    source: Source = "sampled"
    trusted: Optional[np.ndarray] = None
    fallback_mask: Optional[np.ndarray] = None

    def __post_init__(self):
        values = _as_complex(self.values, (self.grid.size,))
        object.__setattr__(self, "values", values)
        trusted = np.isfinite(values) if self.trusted is None else np.asarray(self.trusted, bool)
        if trusted.shape != values.shape:
            raise GridMismatch("trusted mask does not match the node count")
        object.__setattr__(self, "trusted", trusted & np.isfinite(values))
        if self.holder_alpha is not None and not 0 < self.holder_alpha < 1:
            raise ParameterOutOfRange(f"holder_alpha must lie in (0, 1), got {self.holder_alpha}")
        if self.source not in ("closed-form", "sampled"):
            raise ValueError(f"unknown source {self.source!r}")

    @classmethod
    def from_callable(cls, grid: Grid1D, func: Callable[[np.ndarray], np.ndarray],
                      holder_alpha: Optional[float] = None, check_holder: bool = True):
        """Sample ``func`` on all nodes, ghost band included.

        With ``holder_alpha`` given (and at least 64 interior nodes) the
        exponent is re-estimated from the samples and must agree within 0.15.
        """
        values = np.broadcast_to(np.asarray(func(grid.nodes), dtype=complex), (grid.size,))
        out = cls(grid, values, holder_alpha=holder_alpha, source="closed-form")
        if holder_alpha is not None and check_holder and grid.n >= 64:
            from .holder import estimate_holder_exponent

            est = estimate_holder_exponent(out)
            if abs(est - holder_alpha) > 0.15:
                raise ParameterOutOfRange(
                    f"declared Hoelder exponent {holder_alpha:.4f} but samples give {est:.4f}"
                )
        return out

    @classmethod
    def from_samples(cls, grid: Grid1D, values, holder_alpha: Optional[float] = None):
        return cls(grid, values, holder_alpha=holder_alpha, source="sampled")

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.grid.interior]

    def at(self, x: float) -> complex:
        return complex(self.values[self.grid.index_of(x)])


@dataclass(frozen=True, eq=False)
class GridFunction2D(_GridFunctionOps):
    """Complex samples on a :class:`Grid2D`, indexed ``values[i1, i2]``."""

    grid: Grid2D
    values: np.ndarray
    holder_alpha: Optional[float] = None
    source: Source = "sampled"
    trusted: Optional[np.ndarray] = None
    fallback_mask: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        values = _as_complex(self.values, self.grid.shape)
        object.__setattr__(self, "values", values)
        trusted = np.isfinite(values) if self.trusted is None else np.asarray(self.trusted, bool)
        if trusted.shape != values.shape:
            raise GridMismatch("trusted mask does not match the grid shape")
        object.__setattr__(self, "trusted", trusted & np.isfinite(values))
        if self.holder_alpha is not None and not 0 < self.holder_alpha < 1:
            raise ParameterOutOfRange(f"holder_alpha must lie in (0, 1), got {self.holder_alpha}")

    @classmethod
    def from_callable(cls, grid: Grid2D, func, holder_alpha: Optional[float] = None):
        x1, x2 = grid.mesh()
        values = np.broadcast_to(np.asarray(func(x1, x2), dtype=complex), grid.shape)
        return cls(grid, values, holder_alpha=holder_alpha, source="closed-form")

    @classmethod
    def from_samples(cls, grid: Grid2D, values, holder_alpha: Optional[float] = None):
        return cls(grid, values, holder_alpha=holder_alpha, source="sampled")

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.grid.interior]
