"""Fixed-h linear solvers for Euler-Lagrange equations of quadratic Lagrangians.

Box derivatives are assembled as sparse complex operators on the
ghost-extended node set.  Ghost values are not free: they are quadratic
extrapolations of the values on the closed domain, so every operator is
composed with an extrapolation matrix and the unknowns are the values
strictly inside the domain.  Complex systems are solved as real systems of
doubled size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .box import box_derivative_n, partial_box_derivative_n
from .exceptions import BoundaryIncomplete, NondegeneracyFailure, SingularSystem
from .grid import Grid1D, Grid2D, GridFunction1D, GridFunction2D
from .lagrangian import Lagrangian

__all__ = [
    "QuadraticLagrangian",
    "AffineConstraint",
    "LinearELSystem",
    "box_operator",
    "extrapolation_matrix",
    "solve_linear_el_1d",
    "solve_membrane",
    "MembraneSolution",
    "DIRECT_MAX",
]

DIRECT_MAX = 257 ** 2


@dataclass(frozen=True)
class QuadraticLagrangian:
    """``L = A v**2 + B y**2 + c y + d v`` with constant complex coefficients."""

    A: complex
    B: complex = 0.0
    c: complex = 0.0
    d: complex = 0.0

    def __post_init__(self):
        if self.A == 0:
            raise ValueError("A must be nonzero")

    def lagrangian(self) -> Lagrangian:
        A, B, c, d = self.A, self.B, self.c, self.d
        return Lagrangian(
            lambda x, y, v: A * v ** 2 + B * y ** 2 + c * y + d * v,
            partials={"y": lambda x, y, v: 2 * B * y + c, "v": lambda x, y, v: 2 * A * v + d},
            name=f"{A}*v^2 + {B}*y^2 + {c}*y + {d}*v",
        )


@dataclass(frozen=True)
class AffineConstraint:
    """Constraint density ``theta = ty * y + tv * v + t0`` with level ``C``."""

    ty: complex
    C: complex
    tv: complex = 0.0
    t0: complex = 0.0

    def lagrangian(self) -> Lagrangian:
        ty, tv, t0 = self.ty, self.tv, self.t0
        return Lagrangian(
            lambda x, y, v: ty * y + tv * v + t0 + 0 * x,
            partials={"y": lambda x, y, v: ty + 0 * y, "v": lambda x, y, v: tv + 0 * v},
            name=f"{ty}*y + {tv}*v + {t0}",
        )


def box_operator(size: int, m: int, h: float) -> sp.csr_matrix:
    """Sparse box derivative at step ``h = m * delta`` on ``size`` nodes.

    Rows whose stencil leaves the array are zero.
    """
    rows = np.arange(m, size - m)
    plus = sp.csr_matrix((np.ones(rows.size), (rows, rows + m)), shape=(size, size))
    minus = sp.csr_matrix((np.ones(rows.size), (rows, rows - m)), shape=(size, size))
    mid = sp.csr_matrix((np.ones(rows.size), (rows, rows)), shape=(size, size))
    return ((plus - minus) + 1j * (plus - 2 * mid + minus)).tocsr() / (2 * h)


def extrapolation_matrix(n: int, ghost: int) -> sp.csr_matrix:
    """Map the ``n`` values on ``[a, b]`` to all ``n + 2 ghost`` nodes.

    Ghost node ``j`` steps outside an endpoint takes the value of the
    quadratic through the three nearest in-domain nodes.
    """
    if n < 3:
        raise ValueError("quadratic extrapolation needs at least 3 nodes")
    rows, cols, vals = list(range(ghost, ghost + n)), list(range(n)), [1.0] * n
    for j in range(1, ghost + 1):
        w = ((j + 1) * (j + 2) / 2, -j * (j + 2), j * (j + 1) / 2)
        for k, wk in enumerate(w):
            rows += [ghost - j, ghost + n - 1 + j]
            cols += [k, n - 1 - k]
            vals += [wk, wk]
    return sp.csr_matrix((vals, (rows, cols)), shape=(n + 2 * ghost, n))


def _doubled_solve(K: sp.spmatrix, rhs: np.ndarray, tol: float, direct: bool):
    """Solve the complex system ``K z = rhs`` via its real form of doubled size."""
    n = K.shape[0]
    Kr, Ki = sp.csr_matrix(K.real), sp.csr_matrix(K.imag)
    # interleave (Re, Im) per node so the doubled matrix keeps the stencil's locality
    perm = np.empty(2 * n, int)
    perm[0::2], perm[1::2] = np.arange(n), np.arange(n) + n
    M = sp.bmat([[Kr, -Ki], [Ki, Kr]], format="csr")[perm][:, perm].tocsc()
    b = np.concatenate([rhs.real, rhs.imag])[perm]
    stats = {"method": "direct" if direct else "gmres+ilu", "unknowns": int(n)}
    if direct:
        try:
            z = spla.splu(M, permc_spec="MMD_AT_PLUS_A").solve(b)
        except RuntimeError as exc:
            raise SingularSystem(str(exc)) from exc
        stats["iterations"] = 0
    else:
        ilu = spla.spilu(M, drop_tol=1e-5, fill_factor=20)
        pre = spla.LinearOperator(M.shape, ilu.solve)
        count = [0]

        def tick(_):
            count[0] += 1

        z, info = spla.gmres(M, b, M=pre, rtol=tol, atol=0.0, restart=100, maxiter=2000,
                             callback=tick, callback_type="pr_norm")
        stats["iterations"] = count[0]
        if info != 0:
            raise SingularSystem(f"iterative solve did not reach rtol={tol} (info={info})")
    if not np.all(np.isfinite(z)):
        raise SingularSystem("solve produced non-finite values")
    sol = z[0::2] + 1j * z[1::2]
    # normwise backward error: scaled by |K| |z| + |rhs| so stiff 1/h**2 rows do not inflate it
    knorm = spla.norm(K, np.inf)
    denom = knorm * np.max(np.abs(sol), initial=0.0) + np.max(np.abs(rhs), initial=0.0)
    stats["residual"] = float(np.max(np.abs(K @ sol - rhs), initial=0.0) / max(denom, 1e-300))
    if stats["residual"] > max(tol, 1e-12) * 10:
        raise SingularSystem(f"linear-solve residual {stats['residual']:.3g} exceeds target {tol}")
    return sol, stats


@dataclass(eq=False)
class LinearELSystem:
    """Assembled fixed-h Euler-Lagrange system.

    ``operator`` acts on the closed-domain values (boundary included) and
    returns the equation at every node; ``unknowns`` selects the free nodes;
    ``matrix`` and ``rhs`` are the restriction to them.
    """

    operator: sp.csr_matrix
    unknowns: np.ndarray
    known: np.ndarray
    matrix: sp.csr_matrix
    rhs: np.ndarray
    tol: float = 1e-10
    stats: dict = field(default_factory=dict)

    def solve(self, direct: bool = True) -> np.ndarray:
        sol, self.stats = _doubled_solve(self.matrix, self.rhs, self.tol, direct)
        return sol


def _validate_stencil(B: sp.csr_matrix, apply: Callable[[np.ndarray], np.ndarray],
                      shape: tuple, count: int = 5, seed: int = 0, what: str = "box"):
    """Compare sparse rows with the grid-function box derivative on random basis vectors."""
    rng = np.random.default_rng(seed)
    size = int(np.prod(shape))
    for k in rng.choice(size, size=min(count, size), replace=False):
        e = np.zeros(size, complex)
        e[k] = 1.0
        ref = apply(e.reshape(shape)).ravel()
        got = B @ e
        ok = np.isfinite(ref)
        scale = max(1.0, float(np.max(np.abs(ref[ok]), initial=0.0)))
        if np.max(np.abs(got[ok] - ref[ok]), initial=0.0) > 1e-12 * scale:
            raise AssertionError(f"assembled {what} stencil disagrees with the grid operator")


def _second_box_1d(grid: Grid1D, m: int, h: float, validate: bool):
    """``box_h box_h`` on the extended nodes and the extrapolation matrix."""
    B = box_operator(grid.size, m, h)
    BB = (B @ B).tocsr()
    if validate:
        _validate_stencil(BB, lambda u: box_derivative_n(GridFunction1D(grid, u), h, 2).values,
                          (grid.size,), what="second box")
    return BB, extrapolation_matrix(grid.n, grid.ghost)


def solve_linear_el_1d(L: QuadraticLagrangian, boundary: tuple, grid: Grid1D,
                       h: Optional[float] = None, constraint: Optional[AffineConstraint] = None,
                       tol: float = 1e-10):
    """Solve the fixed-h Euler-Lagrange equation of a quadratic Lagrangian.

    The equation ``2A box_h box_h y - 2B y = c`` is imposed at every node
    strictly inside ``[a, b]`` with ``y(a), y(b)`` from ``boundary``.  With an
    :class:`AffineConstraint` the multiplier is an extra unknown, the
    equation gains ``+ lambda ty`` and the trapezoid integral of ``theta[y]``
    must equal ``C``; the result is then ``(y, lambda)``.

    The returned function lives on ``grid`` widened to a ghost band of
    ``2m`` nodes, filled by quadratic extrapolation and marked in
    ``fallback_mask``.
    """
    h = grid.delta if h is None else h
    m = grid.steps(h)
    ext = grid.with_ghost(max(grid.ghost, 2 * m))
    BB, E = _second_box_1d(ext, m, h, validate=True)
    n = grid.n
    core = slice(ext.ghost, ext.ghost + n)
    op = (2 * L.A * BB[core] @ E - 2 * L.B * sp.identity(n, format="csr")).tocsr()
    known = np.array([0, n - 1])
    free = np.arange(1, n - 1)
    bvals = np.asarray(boundary, dtype=complex)
    rhs = np.full(free.size, complex(L.c)) - op[free][:, known] @ bvals
    K = op[free][:, free]
    if constraint is not None:
        if constraint.ty == 0:
            raise NondegeneracyFailure("constraint density has no y-dependence; every y is a "
                                       "constraint extremal")
        B1 = box_operator(ext.size, m, h)[core] @ E
        w = np.full(n, grid.delta)
        w[[0, -1]] /= 2
        # constraint row: sum w (ty y + tv box y + t0) = C
        row = constraint.ty * w + constraint.tv * (w @ B1)
        col = np.full((free.size, 1), complex(constraint.ty))
        K = sp.bmat([[K, sp.csr_matrix(col)],
                     [sp.csr_matrix(row[free][None, :]), None]], format="csr")
        rhs = np.append(rhs, constraint.C - constraint.t0 * (grid.b - grid.a)
                        - row[known] @ bvals)
    system = LinearELSystem(op, free, known, K, rhs, tol)
    sol = system.solve(direct=True)
    full = np.empty(n, complex)
    full[known] = bvals
    full[free] = sol[:free.size]
    values = E @ full
    mask = np.ones(ext.size, bool)
    mask[core] = False
    y = GridFunction1D(ext, values, source="sampled", fallback_mask=mask)
    if constraint is not None:
        return y, complex(sol[-1])
    return y


@dataclass(frozen=True, eq=False)
class MembraneSolution:
    """Membrane solve output: the field plus solver statistics."""

    u: GridFunction2D
    stats: dict


BoundarySpec = Union[Callable, Mapping[str, np.ndarray], np.ndarray]


def _boundary_rim(boundary: BoundarySpec, grid: Grid2D) -> np.ndarray:
    """Values on the closed rectangle with NaN inside; checks all four edges."""
    n1, n2 = grid.axis1.n, grid.axis2.n
    rim = np.full((n1, n2), np.nan + 0j)
    if callable(boundary):
        x1 = grid.axis1.interior_nodes[:, None]
        x2 = grid.axis2.interior_nodes[None, :]
        full = np.broadcast_to(np.asarray(boundary(x1, x2), complex), (n1, n2))
        rim[[0, -1], :] = full[[0, -1], :]
        rim[:, [0, -1]] = full[:, [0, -1]]
    elif isinstance(boundary, Mapping):
        missing = {"a", "b", "c", "d"} - set(boundary)
        if missing:
            raise BoundaryIncomplete(f"missing edge(s) {sorted(missing)}; need a, b, c, d")
        edges = {k: np.asarray(boundary[k], complex) for k in "abcd"}
        for k, size in (("a", n2), ("b", n2), ("c", n1), ("d", n1)):
            if edges[k].shape != (size,):
                raise BoundaryIncomplete(f"edge {k!r} has {edges[k].size} samples, expected {size}")
        rim[0, :], rim[-1, :] = edges["a"], edges["b"]
        for k, j in (("c", 0), ("d", -1)):
            corners = edges[k][[0, -1]]
            if np.max(np.abs(corners - rim[[0, -1], j])) > 1e-12 * max(1.0, np.max(np.abs(corners))):
                raise BoundaryIncomplete(f"edge {k!r} disagrees with edges a/b at the corners")
            rim[:, j] = edges[k]
    else:
        arr = np.asarray(boundary, complex)
        if arr.shape != (n1, n2):
            raise BoundaryIncomplete(f"boundary array has shape {arr.shape}, expected {(n1, n2)}")
        rim[[0, -1], :] = arr[[0, -1], :]
        rim[:, [0, -1]] = arr[:, [0, -1]]
    edge = np.zeros((n1, n2), bool)
    edge[[0, -1], :] = edge[:, [0, -1]] = True
    if not np.all(np.isfinite(rim[edge])):
        raise BoundaryIncomplete("boundary data has undefined values on the rim")
    return rim


def solve_membrane(boundary: BoundarySpec, grid: Grid2D, h: Optional[float] = None,
                   tol: float = 1e-10, direct_max: int = DIRECT_MAX,
                   full_output: bool = False):
    """Solve the box-Laplace equation ``box_1 box_1 u + box_2 box_2 u = 0``.

    ``boundary`` is a callable ``u(x1, x2)`` (read on the rim only), a
    mapping of the four edges ``a`` (x1 = a, over x2), ``b``, ``c``
    (x2 = c, over x1) and ``d``, or an array over the closed rectangle whose
    rim is used.  Grids up to ``direct_max`` nodes use a sparse direct
    solve; larger ones use ILU-preconditioned GMRES to relative residual
    ``tol``.

    Returns the field on the grid widened to a ``2m`` ghost band (filled by
    quadratic extrapolation, marked in ``fallback_mask``), or a
    :class:`MembraneSolution` with ``full_output=True``.
    """
    h = grid.axis1.delta if h is None else h
    m1, m2 = grid.axis1.steps(h), grid.axis2.steps(h)
    g = max(grid.axis1.ghost, grid.axis2.ghost, 2 * max(m1, m2))
    ext = Grid2D(grid.axis1.with_ghost(g), grid.axis2.with_ghost(g))
    rim = _boundary_rim(boundary, grid)
    n1, n2 = rim.shape
    N1, N2 = ext.shape
    B1 = box_operator(N1, m1, h)
    B2 = box_operator(N2, m2, h)
    lap = (sp.kron(B1 @ B1, sp.identity(N2)) + sp.kron(sp.identity(N1), B2 @ B2)).tocsr()
    _validate_stencil(
        lap,
        lambda u: (partial_box_derivative_n(GridFunction2D(ext, u), h, 1, 2).values
                   + partial_box_derivative_n(GridFunction2D(ext, u), h, 2, 2).values),
        ext.shape, what="box-Laplace",
    )
    E = sp.kron(extrapolation_matrix(n1, g), extrapolation_matrix(n2, g)).tocsr()
    core = (np.arange(g, g + n1)[:, None] * N2 + np.arange(g, g + n2)[None, :]).ravel()
    op = (lap[core] @ E).tocsr()
    inside = np.zeros((n1, n2), bool)
    inside[1:-1, 1:-1] = True
    free = np.flatnonzero(inside.ravel())
    known = np.flatnonzero(~inside.ravel())
    bvals = rim.ravel()[known]
    opf = op[free]
    system = LinearELSystem(op, free, known, opf[:, free].tocsr(), -(opf[:, known] @ bvals), tol)
    try:
        sol = system.solve(direct=n1 * n2 <= direct_max)
    except SingularSystem as exc:
        raise SingularSystem(f"membrane system singular for h={h}, grid {n1}x{n2}: {exc}") from exc
    full = np.empty(n1 * n2, complex)
    full[known] = bvals
    full[free] = sol
    values = (E @ full).reshape(ext.shape)
    mask = np.ones(ext.shape, bool)
    mask[ext.interior] = False
    u = GridFunction2D(ext, values, source="sampled", fallback_mask=mask)
    stats = dict(system.stats, h=float(h), shape=[n1, n2], ghost=g)
    return MembraneSolution(u, stats) if full_output else u
