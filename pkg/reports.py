"""Result records and writers: JSON lines, CSV and a plain text table."""

import json
import logging
import math
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger("Reports")

FORMATS = ("jsonl", "csv", "text")
RECORD_FIELDS = ("check_id", "seed", "inputs", "lhs", "rhs", "pass", "slack", "runtime_ms")


def _plain(value):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings, complex as [re, im]."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if hasattr(value, "to_record"):
        return _plain(value.to_record())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def report_record(report, timings=False):
    """Flat record of a VerificationReport; runtime_ms stays null unless timings are on."""
    record = {
        "check_id": report.check_id,
        "seed": report.seed,
        "inputs": report.inputs,
        "lhs": report.measured_lhs,
        "rhs": report.bound_rhs,
        "pass": bool(report.passed),
        "slack": report.slack,
        "runtime_ms": report.runtime_ms if timings else None,
    }
    if report.skipped:
        record["skipped"] = True
    if report.details:
        record["details"] = report.details
    return _plain(record)


def to_jsonl(records):
    return "".join(json.dumps(_plain(r), sort_keys=True) + "\n" for r in records)


def to_frame(records):
    """One row per record; nested inputs/details serialized as JSON text."""
    rows = []
    for r in records:
        row = {}
        for key, value in _plain(r).items():
            row[key] = json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value
        rows.append(row)
    frame = pd.DataFrame(rows)
    leading = [c for c in RECORD_FIELDS if c in frame.columns]
    return frame[leading + [c for c in frame.columns if c not in leading]]


def format_value(val):
    """Compact display of a bound or measurement (e.g., 1.23e+08, 24.59, '-')."""
    if val is None or (isinstance(val, float) and math.isnan(val)):
        return "-"
    if isinstance(val, str):
        return val
    if isinstance(val, bool):
        return "yes" if val else "no"
    if isinstance(val, float) and math.isinf(val):
        return "inf" if val > 0 else "-inf"
    abs_val = abs(val)
    if abs_val != 0 and (abs_val >= 1e6 or abs_val < 1e-3):
        return f"{val:.3e}"
    return f"{val:.4g}"


def to_text(records):
    records = [_plain(r) for r in records]
    if not records:
        return ""
    if "lhs" in records[0]:
        header = ("check_id", "lhs", "rhs", "pass", "slack")
        cells = [[str(r.get("check_id"))] + [format_value(r.get(k)) for k in header[1:]] for r in records]
        if any(r.get("skipped") for r in records):
            cells = [c + (["skipped"] if r.get("skipped") else [""]) for c, r in zip(cells, records)]
            header = header + ("",)
    else:
        header = tuple(records[0])
        cells = [[format_value(r.get(k)) if not isinstance(r.get(k), (dict, list))
                  else json.dumps(r.get(k)) for k in header] for r in records]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def render(records, fmt="jsonl"):
    if fmt == "jsonl":
        return to_jsonl(records)
    if fmt == "csv":
        return to_frame(records).to_csv(index=False)
    if fmt == "text":
        return to_text(records)
    raise ValueError(f"unknown format '{fmt}'; known: {list(FORMATS)}")


def write_records(records, path, fmt="jsonl"):
    """Render and write atomically: temp file in the target directory, then rename."""
    path = Path(path)
    text = render(records, fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"wrote {len(records)} records to {path}")
    return path
