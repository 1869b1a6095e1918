import json
import math

import numpy as np
import pandas as pd
import pytest

from estimation import VerificationReport
from reports import RECORD_FIELDS, format_value, render, report_record, to_frame, to_jsonl, to_text, write_records


def _reports():
    ok = VerificationReport.compare("remez1d", 2.5, 3.0, 1e-6, inputs={"d": 3.0}, seed=7,
                                    details={"witness": {"term": np.float64(2.5)}}).with_runtime(12.0)
    huge = VerificationReport.compare("convex", 1.0, math.inf, 0.0, inputs={"d": 40.0}, seed=7)
    skipped = VerificationReport.skip("quasipoly", "not a quasipolynomial", seed=7)
    return [ok, huge, skipped]


def test_report_record_fields():
    record = report_record(_reports()[0])
    assert tuple(record)[: len(RECORD_FIELDS)] == RECORD_FIELDS
    assert record["pass"] is True
    assert record["lhs"] == 2.5 and record["rhs"] == 3.0
    assert record["runtime_ms"] is None
    assert report_record(_reports()[0], timings=True)["runtime_ms"] == 12.0
    assert isinstance(record["details"]["witness"]["term"], float)


def test_report_record_non_finite_and_skipped():
    _, huge, skipped = _reports()
    assert report_record(huge)["rhs"] == "inf"
    record = report_record(skipped)
    assert record["skipped"] is True
    assert record["lhs"] is None
    assert record["details"]["skip_reason"] == "not a quasipolynomial"


def test_jsonl_is_one_sorted_object_per_line():
    records = [report_record(r) for r in _reports()]
    lines = to_jsonl(records).splitlines()
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert list(first) == sorted(first)
    assert first["check_id"] == "remez1d"


def test_complex_values_become_pairs():
    text = to_jsonl([{"check_id": "valency", "witness_w": 1.5 - 2j}])
    assert json.loads(text)["witness_w"] == [1.5, -2.0]


def test_frame_puts_record_fields_first():
    frame = to_frame([report_record(r) for r in _reports()])
    assert list(frame.columns[: len(RECORD_FIELDS)]) == list(RECORD_FIELDS)
    assert json.loads(frame.loc[0, "inputs"]) == {"d": 3.0}


@pytest.mark.parametrize("value,expected", [
    (None, "-"),
    (float("nan"), "-"),
    (True, "yes"),
    (math.inf, "inf"),
    (24.5921, "24.59"),
    (1.23e8, "1.230e+08"),
    (2e-5, "2.000e-05"),
    (0.0, "0"),
    ("skipped", "skipped"),
])
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_text_table_marks_skips():
    text = to_text([report_record(r) for r in _reports()])
    lines = text.splitlines()
    assert lines[0].split() == ["check_id", "lhs", "rhs", "pass", "slack"]
    assert lines[3].startswith("quasipoly")
    assert lines[3].rstrip().endswith("skipped")
    assert "inf" in lines[2]


def test_text_table_for_plain_records():
    text = to_text([{"formula_id": "bg", "value": 3.0}])
    assert text.splitlines() == ["formula_id  value", "bg" + " " * 10 + "3"]


def test_unknown_format():
    with pytest.raises(ValueError):
        render([], "xml")


@pytest.mark.parametrize("fmt", ["jsonl", "csv", "text"])
def test_write_records_replaces_target(tmp_path, fmt):
    target = tmp_path / "out" / f"results.{fmt}"
    records = [report_record(r) for r in _reports()]
    write_records(records, target, fmt)
    write_records(records, target, fmt)
    assert target.read_text() == render(records, fmt)
    assert [p.name for p in target.parent.iterdir()] == [target.name]


def test_csv_reads_back(tmp_path):
    target = write_records([report_record(r) for r in _reports()], tmp_path / "r.csv", "csv")
    frame = pd.read_csv(target)
    assert list(frame["check_id"]) == ["remez1d", "convex", "quasipoly"]
    assert list(frame["pass"]) == [True, True, True]
