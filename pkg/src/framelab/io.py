"""Reading and writing vector systems and reports.

System files are either JSON objects ``{"dim": d, "count": N, "vectors":
[[...], ...]}`` (extra keys are ignored) or headerless CSV with one
vector per row. Floats are written with ``repr``, which round-trips
doubles exactly.
"""

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np

from framelab.frame_core import VectorSystem, as_system


class SystemFormatError(ValueError):
    """Malformed system file; ``row`` is the 1-based offending row when known."""

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


def infer_format(path, fmt=None):
    if fmt:
        if fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {fmt!r}")
        return fmt
    return "csv" if str(path).lower().endswith(".csv") else "json"


def _finite_row(values, row, dim):
    if dim is not None and len(values) != dim:
        raise SystemFormatError(f"expected {dim} coordinates, found {len(values)}", row)
    out = []
    for x in values:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise SystemFormatError(f"non-numeric coordinate {x!r}", row)
        if not math.isfinite(x):
            raise SystemFormatError(f"non-finite coordinate {x!r}", row)
        out.append(float(x))
    return out


def _reject_constant(token):
    raise SystemFormatError(f"non-finite literal {token}")


def parse_json_system(text, dim=None):
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SystemFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "vectors" not in obj:
        raise SystemFormatError('expected an object with a "vectors" array')
    vectors = obj["vectors"]
    if not isinstance(vectors, list) or not vectors:
        raise SystemFormatError('"vectors" must be a non-empty array')
    d = obj.get("dim", dim)
    if dim is not None and d != dim:
        raise SystemFormatError(f"file has dim={d}, expected {dim}")
    if d is None:
        d = len(vectors[0]) if isinstance(vectors[0], list) else None
    rows = []
    for i, v in enumerate(vectors, start=1):
        if not isinstance(v, list):
            raise SystemFormatError("each vector must be an array", i)
        rows.append(_finite_row(v, i, d))
    if "count" in obj and obj["count"] != len(rows):
        raise SystemFormatError(f'"count" is {obj["count"]} but {len(rows)} vectors are listed')
    return VectorSystem(np.array(rows))


def parse_csv_system(text, dim=None):
    rows = []
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in stripped.split(",")]
        values = []
        for f in fields:
            try:
                values.append(float(f))
            except ValueError:
                raise SystemFormatError(f"cannot parse {f!r} as a number", i) from None
        if dim is None:
            dim = len(values)
        rows.append(_finite_row(values, i, dim))
    if not rows:
        raise SystemFormatError("no vectors found")
    return VectorSystem(np.array(rows))


def read_system(path, fmt=None, dim=None):
    """Load a ``VectorSystem`` from a JSON or CSV file."""
    fmt = infer_format(path, fmt)
    text = Path(path).read_text()
    if fmt == "csv":
        return parse_csv_system(text, dim)
    return parse_json_system(text, dim)


def system_to_dict(vs):
    vs = as_system(vs)
    return {
        "dim": vs.dim,
        "count": vs.count,
        "vectors": [[float(x) for x in row] for row in vs.vectors],
    }


def format_system(vs, fmt="json", extra=None):
    vs = as_system(vs)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in vs.vectors:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()
    obj = system_to_dict(vs)
    if extra:
        obj.update(to_jsonable(extra))
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_system(path, vs, fmt=None, extra=None):
    fmt = infer_format(path, fmt)
    Path(path).write_text(format_system(vs, fmt, extra))


def to_jsonable(value):
    """Convert reports to JSON-safe data; infinities become ``"inf"``/``"-inf"``.

    NaN is rejected: every numeric field must be finite or infinite.
    """
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        if isinstance(value, VectorSystem):
            return system_to_dict(value)
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (frozenset, set)):
        return [to_jsonable(v) for v in sorted(value)]
    if hasattr(value, "_asdict"):
        return to_jsonable(value._asdict())
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            raise ValueError("refusing to serialize NaN")
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return value


def dump_report(report):
    """Serialize a report dict to JSON text with sorted keys, one key per line."""
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"
