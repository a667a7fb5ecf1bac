"""Deterministic JSON and RFC-4180 CSV output for reports and fields.

JSON is written by a small emitter rather than :mod:`json` so that floats
always use 17 significant digits, complex numbers become ``{"re", "im"}``
objects and non-finite values become ``null``.  Key order is the insertion
order of the dicts built here, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .grid import GridFunction1D, GridFunction2D
from .identities import DefectReport
from .variational import ELReport

__all__ = ["dumps", "report_dict", "defect_dict", "el_dict", "write_json", "read_json",
           "defect_csv", "el_csv", "field_csv", "table_csv", "write_text"]


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialise ``obj`` deterministically; see the module docstring."""
    out: list[str] = []
    _emit(obj, out, 0, indent)
    return "".join(out) + "\n"


def _emit(obj, out, level, indent):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _emit({"re": obj.real, "im": obj.imag}, out, level, indent)
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k), ensure_ascii=False)}: ")
            _emit(v, out, level + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(items):
            out.append(pad)
            _emit(v, out, level + 1, indent)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def defect_dict(r: DefectReport) -> dict:
    return {
        "kind": "defect",
        "identity": r.identity,
        "pass": r.passed,
        "h_sequence": list(r.h_sequence),
        "defect_norm": list(r.defect_norm),
        "fitted_slope": r.fitted_slope,
        "details": {k: r.details[k] for k in sorted(r.details)},
    }


def el_dict(r: ELReport) -> dict:
    return {
        "kind": "euler_lagrange",
        "variant": r.variant,
        "pass": r.is_extremal,
        "is_extremal": r.is_extremal,
        "is_extremal_limit": r.is_extremal_limit,
        "residual_norm": r.residual_norm,
        "tol": r.tol,
        "tol_limit": r.tol_limit,
        "scale": r.scale,
        "h": r.h,
        "boundary_defects": [{"name": n, "value": v} for n, v in r.boundary_defects],
        "multiplier": r.multiplier,
        "parameter": r.parameter,
    }


def report_dict(r) -> dict:
    if isinstance(r, DefectReport):
        return defect_dict(r)
    if isinstance(r, ELReport):
        return el_dict(r)
    raise TypeError(f"no serialiser for {type(r).__name__}")


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8", newline="")


def write_json(path, obj) -> None:
    write_text(path, dumps(obj))


def read_json(path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def table_csv(header, rows) -> str:
    """RFC-4180 CSV (CRLF line ends, minimal quoting) with 17-digit floats."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(c) for c in row])
    return buf.getvalue()


def _cell(c):
    if isinstance(c, (bool, np.bool_)):
        return "true" if c else "false"
    if isinstance(c, (float, np.floating)):
        return "" if not math.isfinite(c) else _float(float(c))
    return c


def defect_csv(r: DefectReport) -> str:
    return table_csv(["identity", "h", "defect", "slope", "pass"],
                     [(r.identity, h, d, r.fitted_slope, r.passed)
                      for h, d in zip(r.h_sequence, r.defect_norm)])


def el_csv(r: ELReport) -> str:
    """Residual field on the trusted nodes of the domain (ghost band excluded)."""
    f = r.residual_field
    vals = f.values[f.grid.interior]
    trusted = f.trusted[f.grid.interior]
    if isinstance(f, GridFunction1D):
        coords = f.grid.interior_nodes
        rows = [(x, v.real, v.imag) for x, v, t in zip(coords, vals, trusted) if t]
        return table_csv(["node", "Re", "Im"], rows)
    x1, x2 = (c[f.grid.interior] for c in f.grid.mesh())
    rows = [(a, b, v.real, v.imag)
            for a, b, v, t in zip(x1.ravel(), x2.ravel(), vals.ravel(), trusted.ravel()) if t]
    return table_csv(["x1", "x2", "Re", "Im"], rows)


def field_csv(f) -> str:
    """Values on the domain: ``x, Re, Im`` in 1D, ``x1, x2, Re u, Im u`` in 2D."""
    vals = f.values[f.grid.interior]
    if isinstance(f, GridFunction2D):
        x1, x2 = (c[f.grid.interior] for c in f.grid.mesh())
        return table_csv(["x1", "x2", "Re u", "Im u"],
                         zip(x1.ravel(), x2.ravel(), vals.real.ravel(), vals.imag.ravel()))
    return table_csv(["x", "Re", "Im"], zip(f.grid.interior_nodes, vals.real, vals.imag))
