"""Deterministic CSV/JSON output with the run configuration embedded in the header.

Floats are written twice: a decimal column for people and a ``<name>_hex``
column holding the exact value, which is what :func:`read_report` trusts.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from typing import Any, Iterable, Sequence

from gmpy2 import mpfr

from . import __version__
from .precision import from_hex, to_hex

TOOL = "wlmpnn"
_MPFR = type(mpfr(0))


def _as_dict(rec) -> dict:
    if dataclasses.is_dataclass(rec) and not isinstance(rec, type):
        return {f.name: getattr(rec, f.name) for f in dataclasses.fields(rec)}
    if isinstance(rec, dict):
        return dict(rec)
    raise TypeError(f"cannot report a {type(rec).__name__}")


def _is_real(x) -> bool:
    return isinstance(x, (float, _MPFR)) and not isinstance(x, bool)


def _hex(x) -> str:
    if isinstance(x, float):
        return x.hex() if math.isfinite(x) else repr(x)
    return to_hex(x)


def _json_value(x):
    if isinstance(x, tuple):
        return [_json_value(v) for v in x]
    if isinstance(x, list):
        return [_json_value(v) for v in x]
    if isinstance(x, _MPFR):
        return float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _columns(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for row in rows:
        for key, val in row.items():
            if key not in cols:
                cols.append(key)
            if _is_real(val) and f"{key}_hex" not in cols:
                cols.append(f"{key}_hex")
    return cols


def header_lines(config: dict | None) -> list[str]:
    cfg = json.dumps(config or {}, sort_keys=True, default=str)
    return [f"# tool: {TOOL} {__version__}", f"# config: {cfg}"]


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, _MPFR):
        return str(float(x))
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (tuple, list)):
        return json.dumps(_json_value(x))
    return str(x)


def render_csv(records: Iterable, config: dict | None = None, columns: Sequence[str] | None = None) -> str:
    rows = [_as_dict(r) for r in records]
    buf = io.StringIO()
    for line in header_lines(config):
        buf.write(line + "\n")
    cols = list(columns) if columns is not None else _columns(rows)
    if not cols:
        return buf.getvalue()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            if c.endswith("_hex") and c not in row and _is_real(row.get(c[:-4])):
                out.append(_hex(row[c[:-4]]))
            else:
                out.append(_csv_cell(row.get(c)))
        writer.writerow(out)
    return buf.getvalue()


def render_json(records: Iterable, config: dict | None = None) -> str:
    out = []
    for rec in records:
        row = {}
        for key, val in _as_dict(rec).items():
            row[key] = _json_value(val)
            if _is_real(val):
                row[f"{key}_hex"] = _hex(val)
        out.append(row)
    doc = {"tool": TOOL, "version": __version__, "config": config or {}, "records": out}
    return json.dumps(doc, indent=2, default=str) + "\n"


def emit_report(records: Iterable, fmt: str = "csv", path=None, config: dict | None = None,
                columns: Sequence[str] | None = None) -> str:
    """Render ``records`` (dataclasses or dicts); write to ``path`` if given."""
    if fmt == "csv":
        text = render_csv(records, config, columns)
    elif fmt == "json":
        text = render_json(records, config)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
    return text


def _restore(row: dict[str, Any]) -> dict[str, Any]:
    out = {}
    for key, val in row.items():
        if key.endswith("_hex") and key[:-4] in row:
            continue
        hx = row.get(f"{key}_hex")
        if isinstance(hx, str) and hx:
            val = _real_from_hex(hx)
        elif isinstance(val, list):
            val = tuple(_tuplify(v) for v in val)
        out[key] = val
    return out


def _real_from_hex(hx: str):
    """float when exactly representable as one, otherwise an mpfr."""
    try:
        f = float.fromhex(hx)
    except (ValueError, OverflowError):
        return from_hex(hx)
    if not math.isfinite(f):
        return f
    exact = from_hex(hx)
    return f if exact == f else exact


def _tuplify(v):
    return tuple(_tuplify(x) for x in v) if isinstance(v, list) else v


def _parse_cell(s: str):
    if s == "":
        return None
    try:
        return json.loads(s)
    except json.JSONDecodeError:
        return s


def read_report(path) -> tuple[dict, list[dict]]:
    """Inverse of :func:`emit_report`: returns (meta, records)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        meta = {"tool": doc.get("tool"), "version": doc.get("version"), "config": doc.get("config", {})}
        return meta, [_restore(r) for r in doc.get("records", [])]
    meta: dict[str, Any] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# tool: "):
            meta["tool"], _, meta["version"] = line[len("# tool: "):].partition(" ")
        elif line.startswith("# config: "):
            meta["config"] = json.loads(line[len("# config: "):])
        elif not line.startswith("#"):
            body.append(line)
    rows = []
    reader = csv.reader(body)
    cols = next(reader, None)
    if cols is None:
        return meta, rows
    for raw in reader:
        rows.append(_restore({c: (_parse_cell(v) if not c.endswith("_hex") else v) for c, v in zip(cols, raw)}))
    return meta, rows
