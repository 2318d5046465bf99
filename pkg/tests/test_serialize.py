"""Tests for the deterministic JSON/CSV writers."""
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from igsym.serialize import dumps, format_float, render_csv, write_csv, write_json


def test_format_float_frozen_values():
    assert format_float(1.0) == "1.0"
    assert format_float(-0.5) == "-0.5"
    assert format_float(0.0) == "0.0"
    assert format_float(1e30) == "1e+30"  # %g strips trailing zeros; still float-typed
    # 0.1 is not representable; all 17 digits must show
    assert format_float(0.1) == "0.10000000000000001"


def test_format_float_rejects_non_finite():
    for bad in (math.inf, -math.inf, math.nan):
        with pytest.raises(ValueError):
            format_float(bad)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips_exactly(x):
    assert float(format_float(x)) == x
    # the text is always parsed back as a float, never an int
    assert isinstance(json.loads(format_float(x)), float)


def test_dumps_compact_frozen():
    doc = {"a": 1, "b": [1.5, True, None], "c": "x,\"y\""}
    assert dumps(doc) == '{"a":1,"b":[1.5,true,null],"c":"x,\\"y\\""}'


def test_dumps_indent_parses_and_keeps_digits():
    doc = {"values": [0.1, 2.0], "nested": {"k": 3}}
    text = dumps(doc, indent=2)
    assert json.loads(text) == doc
    assert "0.10000000000000001" in text


def test_dumps_empty_containers_stay_compact():
    assert dumps({"a": [], "b": {}}, indent=2) == '{\n  "a": [],\n  "b": {}\n}'


def test_dumps_handles_numpy_scalars_and_arrays():
    doc = {"arr": np.array([1.0, 2.0]), "n": np.int64(3), "x": np.float64(0.25)}
    assert dumps(doc) == '{"arr":[1.0,2.0],"n":3,"x":0.25}'


def test_dumps_rejects_unsupported_types():
    with pytest.raises(TypeError):
        dumps({"x": object()})
    with pytest.raises(TypeError):
        dumps({1: "non-string key"})


def test_dumps_is_insertion_ordered():
    assert dumps({"b": 1, "a": 2}) == '{"b":1,"a":2}'


def test_render_csv_quoting_and_types():
    text = render_csv(
        ["i", "name", "value", "flag", "note"],
        [[0, "plain", 0.5, True, None], [1, 'has,"comma"', 2.0, False, "ok"]],
    )
    lines = text.splitlines()
    assert lines[0] == "i,name,value,flag,note"
    assert lines[1] == "0,plain,0.5,true,"
    assert lines[2] == '1,"has,""comma""",2.0,false,ok'


def test_write_json_and_csv_end_with_newline(tmp_path):
    jpath = tmp_path / "doc.json"
    write_json(jpath, {"x": 1.0})
    assert jpath.read_text().endswith("\n")
    cpath = tmp_path / "table.csv"
    write_csv(cpath, ["a"], [[1.0]])
    assert cpath.read_text() == "a\n1.0\n"
