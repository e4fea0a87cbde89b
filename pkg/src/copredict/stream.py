"""JSONL instance streams.

Line 1 is the header: {"kind", "n", "k", "costs", ...kind-specific data...}.
Every following line is one online step:

  covering family (kind covering|setcover|caching):
      {"constraint": [[i, a], ...], "suggestions": [[[i, v], ...] x k]}
  box family (kind box|facloc):
      {"constraint": [[i, a], ...], "d": [[i, d_ij], ...],
       "suggestions": [{"x": [[i, v], ...], "y": [[i, v], ...]} x k]}

Serialization is canonical (sorted keys, floats at 17 significant digits) so
generated files round-trip byte-identically through load and re-dump.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError

COVERING_KINDS = ("covering", "setcover", "caching")
BOX_KINDS = ("box", "facloc")
KINDS = COVERING_KINDS + BOX_KINDS


def canonical_json(obj) -> str:
    """JSON with sorted object keys and 17-significant-digit floats."""
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def _write(obj, out: list[str]) -> None:
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj}")
        out.append(format(obj, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for idx, item in enumerate(obj):
            if idx:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for idx, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise ValueError(f"object keys must be strings, got {key!r}")
            if idx:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    else:
        raise ValueError(f"cannot serialize {type(obj).__name__}")


@dataclass
class StreamStep:
    constraint: list[tuple[int, float]]
    suggestions: list
    d: list[tuple[int, float]] | None = None


@dataclass
class StreamInstance:
    kind: str
    n: int
    k: int
    costs: list[float]
    steps: list[StreamStep] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def is_box(self) -> bool:
        return self.kind in BOX_KINDS


def _pairs(raw, what: str, n: int) -> list[tuple[int, float]]:
    if not isinstance(raw, list):
        raise SchemaError(f"{what} must be a list of [index, value] pairs")
    pairs = []
    for entry in raw:
        if (not isinstance(entry, list) or len(entry) != 2
                or not isinstance(entry[0], int) or isinstance(entry[0], bool)
                or not isinstance(entry[1], (int, float))):
            raise SchemaError(f"{what} entry {entry!r} is not an [index, value] pair")
        i, v = entry[0], float(entry[1])
        if not (0 <= i < n):
            raise SchemaError(f"{what} references variable {i}, outside 0..{n - 1}")
        pairs.append((i, v))
    return pairs


def loads_instance(text: str) -> StreamInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaError("empty instance file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise SchemaError("header must be a JSON object")
    for key in ("kind", "n", "k", "costs"):
        if key not in header:
            raise SchemaError(f"header is missing {key!r}")
    kind = header["kind"]
    if kind not in KINDS:
        raise SchemaError(f"unknown kind {kind!r}, expected one of {KINDS}")
    n, k = header["n"], header["k"]
    if not isinstance(n, int) or n < 0 or not isinstance(k, int) or k < 1:
        raise SchemaError(f"bad sizes n={n!r}, k={k!r}")
    costs = header["costs"]
    if not isinstance(costs, list) or len(costs) != n:
        raise SchemaError(f"costs must be a list of length n={n}")
    costs = [float(c) for c in costs]
    for i, c in enumerate(costs):
        if not (c > 0.0) or not math.isfinite(c):
            raise SchemaError(f"cost of variable {i} must be positive and finite, got {c}")
    extra = {key: header[key] for key in header if key not in ("kind", "n", "k", "costs")}

    box = kind in BOX_KINDS
    steps = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {lineno} is not valid JSON: {exc}") from exc
        if not isinstance(row, dict) or "constraint" not in row or "suggestions" not in row:
            raise SchemaError(f"line {lineno} must carry 'constraint' and 'suggestions'")
        constraint = _pairs(row["constraint"], f"line {lineno} constraint", n)
        suggs = row["suggestions"]
        if not isinstance(suggs, list) or len(suggs) != k:
            raise SchemaError(f"line {lineno} must carry exactly k={k} suggestions")
        if box:
            if "d" not in row:
                raise SchemaError(f"line {lineno}: box steps need assignment costs 'd'")
            d = _pairs(row["d"], f"line {lineno} d", n)
            for i, v in d:
                if v < 0.0:
                    raise SchemaError(f"line {lineno}: negative assignment cost d[{i}]={v}")
            parsed = []
            for si, s in enumerate(suggs):
                if not isinstance(s, dict) or "x" not in s or "y" not in s:
                    raise SchemaError(
                        f"line {lineno} suggestion {si} must be an object with 'x' and 'y'"
                    )
                parsed.append({
                    "x": _pairs(s["x"], f"line {lineno} suggestion {si} x", n),
                    "y": _pairs(s["y"], f"line {lineno} suggestion {si} y", n),
                })
            steps.append(StreamStep(constraint, parsed, d))
        else:
            if "d" in row:
                raise SchemaError(f"line {lineno}: covering steps cannot carry 'd'")
            parsed = [_pairs(s, f"line {lineno} suggestion {si}", n)
                      for si, s in enumerate(suggs)]
            steps.append(StreamStep(constraint, parsed))
    return StreamInstance(kind, n, k, costs, steps, extra)


def load_instance(path) -> StreamInstance:
    return loads_instance(Path(path).read_text())


def dumps_instance(inst: StreamInstance) -> str:
    header = {"kind": inst.kind, "n": inst.n, "k": inst.k, "costs": list(inst.costs)}
    header.update(inst.extra)
    lines = [canonical_json(header)]
    for step in inst.steps:
        row: dict = {"constraint": [list(p) for p in step.constraint]}
        if inst.is_box:
            row["d"] = [list(p) for p in step.d]
            row["suggestions"] = [
                {"x": [list(p) for p in s["x"]], "y": [list(p) for p in s["y"]]}
                for s in step.suggestions
            ]
        else:
            row["suggestions"] = [[list(p) for p in s] for s in step.suggestions]
        lines.append(canonical_json(row))
    return "\n".join(lines) + "\n"


def dump_instance(inst: StreamInstance, path) -> None:
    Path(path).write_text(dumps_instance(inst))
