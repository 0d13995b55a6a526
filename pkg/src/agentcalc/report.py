"""CSV result reports.

Numbers are printed with 12 significant digits in ``#g`` form so that
trailing zeros survive (``0.82`` becomes ``0.820000000000``). Missing
values are blank. Output is deterministic: rows appear in the order given.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ScenarioError

HEADER = ("query_id", "kind", "probability", "stderr", "cost", "objective", "wall_time")


@dataclass(frozen=True)
class ResultRow:
    query_id: str
    kind: str
    probability: Optional[float] = None
    stderr: Optional[float] = None
    cost: Optional[float] = None
    objective: Optional[float] = None
    wall_time: Optional[float] = None


def format_number(x: Optional[float]) -> str:
    if x is None:
        return ""
    return f"{x:#.12g}"


def emit_report(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow([
            r.query_id,
            r.kind,
            format_number(r.probability),
            format_number(r.stderr),
            format_number(r.cost),
            format_number(r.objective),
            format_number(r.wall_time),
        ])
    return buf.getvalue()


def merge_reports(texts: Iterable[str]) -> str:
    """Concatenate reports that share the standard header, keeping row order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for i, text in enumerate(texts):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != HEADER:
            raise ScenarioError(f"report {i}: missing or unexpected header")
        for row in rows[1:]:
            if len(row) != len(HEADER):
                raise ScenarioError(f"report {i}: row has {len(row)} fields, expected {len(HEADER)}")
            w.writerow(row)
    return buf.getvalue()
