"""Deterministic report rendering (json, jsonl, csv, table)."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from enum import Enum
from fractions import Fraction

from .bits import Dyadic
from .families import FAMILY_VERSION

TOOL = "ait"
TOOL_VERSION = "0.1.0"


def plain(obj):
    """Convert results to JSON-ready values; dyadics become binary numerals."""
    if isinstance(obj, Dyadic):
        return obj.to_binary()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, tuple) and hasattr(obj, "_asdict"):
        return {k: plain(v) for k, v in obj._asdict().items()}
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [plain(v) for v in obj]
        return sorted(items) if isinstance(obj, (set, frozenset)) else items
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def provenance() -> dict:
    return {"tool": TOOL, "tool_version": TOOL_VERSION, "family_version": FAMILY_VERSION}


def build_report(command: str, config: dict, result) -> dict:
    return {"command": command, "config": plain(config), "result": plain(result), "provenance": provenance()}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_report(text: str) -> dict:
    return json.loads(text)


def rows_jsonl(rows: list[dict]) -> str:
    return "".join(json.dumps(plain(r), sort_keys=True) + "\n" for r in rows)


def rows_csv(rows: list[dict]) -> str:
    rows = [plain(r) for r in rows]
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def rows_table(rows: list[dict]) -> str:
    rows = [{k: "" if v is None else str(v) for k, v in plain(r).items()} for r in rows]
    if not rows:
        return "(no rows)\n"
    cols = list(rows[0])
    width = {c: max(len(c), *(len(r[c]) for r in rows)) for c in cols}
    lines = ["  ".join(c.ljust(width[c]) for c in cols), "  ".join("-" * width[c] for c in cols)]
    lines += ["  ".join(r[c].ljust(width[c]) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"
