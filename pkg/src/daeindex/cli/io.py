"""Witness files and JSON/text rendering of analysis results."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from ..diffpoly import NEG_INF
from ..errors import ParseError
from ..rank import Witness, witness_from_names
from ..system import DAESystem

SCHEMA = 1
RESIDUAL_KEY = "_residual_bound"


def load_witness(s: DAESystem, text: str) -> Witness:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"witness file is not valid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(raw, dict):
        raise ParseError("witness file must hold a JSON object", 1, 1)
    bound = raw.pop(RESIDUAL_KEY, 0)
    values = {}
    for name, val in raw.items():
        try:
            values[name] = Fraction(str(val))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {val!r} for {name!r}") from exc
    return witness_from_names(s, values, Fraction(str(bound)))


def dump_witness(s: DAESystem, w: Witness) -> str:
    out = {s.name_of(v): str(x) for v, x in sorted(w.values.items())}
    if w.residual_bound:
        out[RESIDUAL_KEY] = str(w.residual_bound)
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        if obj == NEG_INF:
            return "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def to_json(report: dict) -> str:
    return json.dumps(jsonable({"schema": SCHEMA, **report}), indent=2, sort_keys=True) + "\n"


def to_text(report: dict) -> str:
    lines: list[tuple[str, str]] = []

    def walk(prefix: str, value: Any) -> None:
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            for idx, v in enumerate(value):
                walk(f"{prefix}[{idx}]", v)
        else:
            if isinstance(value, list):
                value = "[" + ", ".join(str(x) for x in value) + "]"
            lines.append((prefix, str(value)))

    walk("", jsonable(report))
    width = max((len(k) for k, _ in lines), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in lines)
