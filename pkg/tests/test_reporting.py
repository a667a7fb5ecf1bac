import json
import math

import numpy as np

from scalecalc import Grid1D, Grid2D, GridFunction1D, GridFunction2D, barrow_defect
from scalecalc.reporting import defect_csv, defect_dict, dumps, field_csv, table_csv


def test_float_formatting_round_trips():
    text = dumps({"a": 1.0, "b": 0.1, "c": 1e-20, "d": 3, "e": 2.0 ** 60})
    data = json.loads(text)
    assert '"a": 1.0' in text and '"d": 3' in text
    assert data["b"] == 0.1 and data["c"] == 1e-20 and data["e"] == 2.0 ** 60
    assert isinstance(data["a"], float)


def test_non_finite_and_complex_values():
    data = json.loads(dumps({"nan": math.nan, "inf": -math.inf, "z": 1 - 2j, "np": np.float64(0.5)}))
    assert data == {"nan": None, "inf": None, "z": {"re": 1.0, "im": -2.0}, "np": 0.5}


def test_output_is_byte_identical_across_calls():
    g = Grid1D(0.0, 1.0, 101, ghost=4)
    f = GridFunction1D(g, g.nodes ** 2)
    a = dumps(defect_dict(barrow_defect(f, [0.02, 0.01])))
    b = dumps(defect_dict(barrow_defect(f, [0.02, 0.01])))
    assert a == b and a.endswith("\n")


def test_csv_uses_crlf_and_quotes_when_needed():
    text = table_csv(["name", "value"], [("a,b", 1.5), ("plain", math.nan)])
    assert text == 'name,value\r\n"a,b",1.5\r\nplain,\r\n'


def test_defect_and_field_csv_headers():
    g = Grid1D(0.0, 1.0, 11, ghost=2)
    f = GridFunction1D(g, g.nodes + 0j)
    lines = defect_csv(barrow_defect(f, [0.2, 0.1])).split("\r\n")
    assert lines[0] == "identity,h,defect,slope,pass" and len(lines) == 4
    assert field_csv(f).split("\r\n")[0] == "x,Re,Im"
    sq = Grid2D.square(0.0, 1.0, 3)
    u = GridFunction2D(sq, np.zeros(sq.shape))
    rows = field_csv(u).split("\r\n")
    assert rows[0] == "x1,x2,Re u,Im u" and len(rows) == 11
