"""Lagrangian evaluation bundles with closed-form or finite-difference partials."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .exceptions import ArityMismatch

__all__ = ["Lagrangian"]

FD_STEP = 1e-6
PARTIAL_RTOL = 1e-5

# probe points for checking supplied partials against finite differences
_PROBE_X = (0.3, 0.7)
_PROBE_Y = (-0.4, 0.9)
_PROBE_V = (0.5 + 0.2j, -1.1 - 0.3j)
_PROBE_XI = (0.25 + 0.1j, -0.6)


@dataclass(frozen=True)
class Lagrangian:
    """A Lagrangian ``L`` together with its partial derivatives.

    ``func`` is called positionally as ``func(x, y, v1, ..., vn[, xi])`` in
    one dimension and ``func(x1, x2, y, v1, v2[, xi])`` in two, with numpy
    arrays (complex for the ``v`` slots).  ``partials`` maps slot names
    (``"y"``, ``"v1"`` ... ``"vn"``, ``"xi"``; ``"v"`` is an alias of
    ``"v1"``) to callables with the same signature.  Missing partials fall
    back to central differences with step ``1e-6 * max(1, |arg|)``; supplied
    ones are checked against that fallback at construction.
    """

    func: Callable
    order: int = 1
    dims: int = 1
    uses_xi: bool = False
    uses_x: bool = True
    partials: Mapping[str, Callable] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.dims not in (1, 2):
            raise ArityMismatch(f"dims must be 1 or 2, got {self.dims}")
        if int(self.order) != self.order or self.order < 1:
            raise ArityMismatch(f"order must be a positive integer, got {self.order}")
        if self.dims == 2 and self.order != 1:
            raise ArityMismatch("two-dimensional Lagrangians are first order")
        partials = dict(self.partials)
        if "v" in partials:
            partials.setdefault("v1", partials.pop("v"))
        unknown = set(partials) - set(self.slots)
        if unknown:
            raise ArityMismatch(f"partials given for unknown slots {sorted(unknown)}")
        object.__setattr__(self, "partials", partials)
        self._check_partials()

    @property
    def n_v(self) -> int:
        """Number of derivative slots: the order in 1D, two partials in 2D."""
        return 2 if self.dims == 2 else self.order

    @property
    def slots(self) -> tuple[str, ...]:
        names = ("y",) + tuple(f"v{i}" for i in range(1, self.n_v + 1))
        return names + (("xi",) if self.uses_xi else ())

    def _args(self, x, y, v: Sequence, xi):
        xs = tuple(x) if self.dims == 2 else (x,)
        if len(v) != self.n_v:
            raise ArityMismatch(f"expected {self.n_v} derivative argument(s), got {len(v)}")
        args = list(xs) + [y] + list(v)
        if self.uses_xi:
            if xi is None:
                raise ArityMismatch("Lagrangian depends on xi but no xi was given")
            args.append(xi)
        return args

    def _slot_index(self, name: str) -> int:
        offset = 2 if self.dims == 2 else 1
        if name == "y":
            return offset
        if name == "xi":
            return offset + 1 + self.n_v
        return offset + int(name[1:])

    def __call__(self, x, y, v: Sequence, xi=None):
        with np.errstate(invalid="ignore", over="ignore"):
            return np.asarray(self.func(*self._args(x, y, v, xi)), dtype=complex)

    def partial(self, name: str, x, y, v: Sequence, xi=None):
        """Partial derivative of ``L`` with respect to slot ``name``."""
        if name == "v":
            name = "v1"
        if name not in self.slots:
            raise ArityMismatch(f"Lagrangian has no slot {name!r}; slots are {self.slots}")
        args = self._args(x, y, v, xi)
        with np.errstate(invalid="ignore", over="ignore"):
            if name in self.partials:
                out = self.partials[name](*args)
            else:
                out = self._fd_partial(self._slot_index(name), args)
        shape = np.broadcast(*[np.asarray(a) for a in args]).shape
        return np.broadcast_to(np.asarray(out, dtype=complex), shape)

    def fd_partial(self, name: str, x, y, v: Sequence, xi=None):
        """Finite-difference partial, ignoring any closed-form one."""
        if name == "v":
            name = "v1"
        args = self._args(x, y, v, xi)
        with np.errstate(invalid="ignore", over="ignore"):
            return self._fd_partial(self._slot_index(name), args)

    def _fd_partial(self, k: int, args: list):
        base = np.asarray(args[k], dtype=complex if k > 0 else float)
        step = FD_STEP * np.maximum(1.0, np.abs(base))
        up, dn = list(args), list(args)
        up[k] = base + step
        dn[k] = base - step
        diff = np.asarray(self.func(*up), dtype=complex) - np.asarray(self.func(*dn), dtype=complex)
        return diff / (2 * step)

    def _check_partials(self):
        if not self.partials:
            return
        xs = [(p, 1 - p) for p in _PROBE_X] if self.dims == 2 else list(_PROBE_X)
        for x, y, vv, xi in zip(xs, _PROBE_Y, _PROBE_V, _PROBE_XI):
            v = [vv * (1 + 0.3 * i) for i in range(self.n_v)]
            xi = xi if self.uses_xi else None
            for name in self.partials:
                exact = complex(np.asarray(self.partial(name, x, y, v, xi)).ravel()[0])
                approx = complex(np.asarray(self.fd_partial(name, x, y, v, xi)).ravel()[0])
                if abs(exact - approx) > PARTIAL_RTOL * max(1.0, abs(exact)):
                    raise ValueError(
                        f"closed-form partial {name!r} disagrees with finite differences "
                        f"({exact} vs {approx}) at x={x}, y={y}"
                    )
