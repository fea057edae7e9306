"""CSV and JSON report emission.

Floats are written with 17 significant digits so that a value survives a
round trip exactly; files are UTF-8 with LF line endings.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from corrmem.scenarios import RunReport


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _plain(obj):
    """Convert to JSON-native types; floats become 17-digit markers."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Float(float(obj))
    if isinstance(obj, complex):
        return [_Float(obj.real), _Float(obj.imag)]
    return obj


class _Float(float):
    pass



def _dump(obj, indent: int = 2, level: int = 0) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, _Float):
        v = float(obj)
        return fmt(v) if math.isfinite(v) else json.dumps(fmt(v))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(obj)


def summary(report: RunReport) -> dict:
    out = {
        "scenario": report.scenario,
        "passed": report.passed,
        "metrics": report.metrics,
        "verdicts": [
            {
                "criterion": v.criterion,
                "name": v.name,
                "value": v.value,
                "relation": v.relation,
                "threshold": v.threshold,
                "passed": v.passed,
            }
            for v in report.verdicts
        ],
    }
    if "fidelity" not in report.metrics and report.scenario in ("store", "entangle2", "crossline"):
        runs = report.metrics.get("runs") or []
        out["fidelity"] = min((r["fidelity"] for r in runs), default=float("nan"))
    elif "fidelity" in report.metrics:
        out["fidelity"] = report.metrics["fidelity"]
    return out


def to_json(report: RunReport) -> str:
    return _dump(_plain(summary(report))) + "\n"


def to_csv(report: RunReport) -> str:
    lines = [",".join(report.columns)]
    for row in report.rows:
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, out: str | Path, formats=("csv", "json")) -> list[Path]:
    """Write ``<out>.csv`` (time series, if any) and ``<out>.json`` (summary)."""
    base = Path(out)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats and report.columns:
        p = base.with_suffix(".csv")
        p.write_bytes(to_csv(report).encode("utf-8"))
        written.append(p)
    if "json" in formats:
        p = base.with_suffix(".json")
        p.write_bytes(to_json(report).encode("utf-8"))
        written.append(p)
    return written


