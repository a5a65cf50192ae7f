"""Tabular reports rendered as aligned text, CSV or JSON."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import dataclass, field

from . import __version__

FORMATS = ("text", "csv", "json")
KINDS = ("ledger", "sweep", "coverage", "mask", "antenna")


@dataclass
class Report:
    kind: str
    columns: list[str]
    rows: list[list]
    title: str = ""
    metadata: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    exit_code: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"report kind must be one of {KINDS}, got {self.kind!r}")
        self.metadata = {"tool": "nrsat", "version": __version__, **self.metadata}

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return to_csv(self)
        if fmt == "json":
            return to_json(self)
        if fmt == "text":
            return to_text(self)
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def to_json(report: Report) -> str:
    doc = {
        "kind": report.kind,
        "title": report.title,
        "metadata": {**report.metadata, "timestamp": _timestamp()},
        "columns": report.columns,
        "rows": [[_json_cell(v) for v in row] for row in report.rows],
        "notes": report.notes,
    }
    return json.dumps(doc, indent=2) + "\n"


def _text_cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "nan"
        if v == 0 or abs(v) >= 0.1:
            return f"{v:.2f}"
        return f"{v:.4g}"
    return str(v)


def to_text(report: Report, hidden=("key",)) -> str:
    keep = [i for i, c in enumerate(report.columns) if c not in hidden]
    header = [report.columns[i] for i in keep]
    body = [[_text_cell(row[i]) for i in keep] for row in report.rows]
    widths = [max(len(r[j]) for r in [header] + body) for j in range(len(keep))]
    numeric = [all(_looks_numeric(r[j]) for r in body) for j in range(len(keep))]

    def fmt(cells):
        out = [c.rjust(w) if num else c.ljust(w) for c, w, num in zip(cells, widths, numeric)]
        return "  ".join(out).rstrip()

    meta = report.metadata
    lines = [f"# {meta['tool']} {meta['version']}  {report.title}".rstrip()]
    if "scenario_digest" in meta:
        lines.append(f"# scenario {meta.get('scenario', '')} sha256:{meta['scenario_digest']}")
    lines.append(fmt(header))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend(fmt(r) for r in body)
    lines.extend(report.notes)
    return "\n".join(lines) + "\n"


def _looks_numeric(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
