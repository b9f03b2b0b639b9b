"""Rendering of tabular results as JSON, CSV or aligned text."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

SIG_DIGITS = 12


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(list(row))

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]


def _num(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float) or hasattr(x, "__float__"):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    return x


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


def to_json(t: Table) -> str:
    doc = {}
    if t.meta:
        doc["meta"] = t.meta
    doc["data"] = [{k: _num(v) for k, v in rec.items()} for rec in t.records()]
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def to_csv(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
    w.writerow(t.columns)
    for r in t.rows:
        w.writerow([_cell(_num(x)) for x in r])
    return buf.getvalue()


def to_text(t: Table) -> str:
    cells = [t.columns] + [[_cell(_num(x)) for x in r] for r in t.rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(t.columns))]
    lines = []
    for k, v in t.meta.items():
        if not isinstance(v, dict):
            lines.append(f"# {k}: {v}")
    for n, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if n else c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


RENDERERS = {"json": to_json, "csv": to_csv, "text": to_text}


def render(t: Table, fmt: str) -> str:
    return RENDERERS[fmt](t)


def matrix_csv(m) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    for row in m:
        w.writerow([f"{float(x):.{SIG_DIGITS}g}" for x in row])
    return buf.getvalue()
