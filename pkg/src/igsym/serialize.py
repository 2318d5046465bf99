"""Deterministic JSON/CSV emission with floats at 17 significant digits.

The stdlib json encoder hardcodes ``repr`` for floats (shortest round-trip
form). The file formats here pin floats to 17 significant digits instead,
which also round-trips float64 exactly, so a tiny writer is used for output.
Reading uses the stdlib json/csv modules.
"""
from __future__ import annotations

import math
from typing import Any

import numpy as np


def format_float(value: float) -> str:
    """Render a float with 17 significant digits, always float-typed JSON.

    Raises ValueError on non-finite values; the file formats forbid them.
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value cannot be serialized: {value!r}")
    text = format(value, ".17g")
    if not any(c in text for c in ".eE"):
        text += ".0"
    return text


def _encode(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(format_float(obj))
    elif isinstance(obj, str):
        import json as _json

        parts.append(_json.dumps(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        first = True
        for key, val in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if not first:
                parts.append(",")
            first = False
            import json as _json

            parts.append(_json.dumps(key))
            parts.append(":")
            _encode(val, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, val in enumerate(obj):
            if i:
                parts.append(",")
            _encode(val, parts)
        parts.append("]")
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), parts)
    else:
        raise TypeError(f"unsupported type for serialization: {type(obj)!r}")


def dumps(obj: Any, indent: int | None = None) -> str:
    """Serialize to JSON text with 17-significant-digit floats.

    Key order is the dict insertion order (construction is deterministic
    everywhere in this package, so output bytes are reproducible).
    """
    parts: list[str] = []
    _encode(obj, parts)
    text = "".join(parts)
    if indent is not None:
        # Re-indenting must not touch numbers; walk tokens structurally.
        text = _reindent(text, indent)
    return text


def _reindent(compact: str, indent: int) -> str:
    out: list[str] = []
    depth = 0
    in_str = False
    escape = False
    pad = " " * indent
    for ch in compact:
        if in_str:
            out.append(ch)
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
            out.append(ch)
        elif ch in "{[":
            out.append(ch)
            depth += 1
            out.append("\n" + pad * depth)
        elif ch in "}]":
            depth -= 1
            if len(out) >= 2 and out[-2] in "{[" and out[-1].startswith("\n"):
                out.pop()  # keep empty containers compact: {} and []
            else:
                out.append("\n" + pad * depth)
            out.append(ch)
        elif ch == ",":
            out.append(ch)
            out.append("\n" + pad * depth)
        elif ch == ":":
            out.append(": ")
        else:
            out.append(ch)
    return "".join(out)


def write_json(path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj, indent=2))
        fh.write("\n")


def render_csv(header: list[str], rows: list[list[Any]]) -> str:
    """Render CSV text; floats formatted at 17 significant digits."""
    def cell(v: Any) -> str:
        if v is None:
            return ""
        if isinstance(v, (float, np.floating)):
            return format_float(v)
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        text = str(v)
        if any(c in text for c in ",\"\n"):
            text = '"' + text.replace('"', '""') + '"'
        return text

    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header: list[str], rows: list[list[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_csv(header, rows))
