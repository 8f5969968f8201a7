import json

import numpy as np
import pandas as pd
import pytest

from em_sequence_toolkit.evaluation.verdict import (
    VerdictReport,
    band_gate,
    final_gate,
    merge_reports,
    suite_to_json,
    summary_df,
    to_native,
    trend_gate,
)


def test_gates():

    assert trend_gate([0.5, 0.3, 0.2, 0.1], window=3)
    assert not trend_gate([0.3, 0.2, 0.25], window=3)
    assert trend_gate([0.3, 0.2, 0.2005], window=3, tolerance=0.001)
    # Only the trailing window counts.
    assert trend_gate([0.1, 0.9, 0.8, 0.7], window=3)
    assert trend_gate([0.2], window=3)

    assert final_gate([0.3, 0.04], 0.05)
    assert not final_gate([0.05], 0.05)
    assert not final_gate([], 0.05)

    assert band_gate([0.25, 0.5, 0.75], 0.25, 0.75)
    assert not band_gate([0.2, 0.5], 0.25, 0.75)


def test_report_pass_logic():

    report = VerdictReport("lemma-4.1", params={"max_word_len": 4})
    assert report.passed

    report.add_gate("size", True)
    assert report.passed

    report.add_gate("trend", False)
    assert not report.passed

    other = VerdictReport("prop-4.1")
    other.add_violation({"word": "01", "starts": [2, 5]})
    assert not other.passed


def test_report_round_trip():

    report = VerdictReport("prop-3.1", params={"checkpoints": [10, 20]})
    report.population = 2
    report.add_gate("final_residual_size", True)
    report.set_residual_table(pd.DataFrame({"n": [10, 20], "x": pd.array([4, None], dtype="Int64")}))
    report.add_note("note")
    report.worst_residual = 0.1

    restored = VerdictReport.from_dict(json.loads(report.to_json()))

    assert restored.to_json() == report.to_json()
    assert report.residuals["x"] == [4, None]
    assert restored.get_residual_df()["n"].tolist() == [10, 20]


def test_to_native():

    value = to_native({"a": np.int64(3), "b": np.array([1.5, 2.5]), "c": (np.bool_(True),), 4: np.float32(0.5)})

    assert value == {"a": 3, "b": [1.5, 2.5], "c": [True], "4": 0.5}
    assert isinstance(value["a"], int)
    json.dumps(value)


def test_merge_and_summary():

    reports = [VerdictReport("prop-4.1"), VerdictReport("lemma-4.2"), VerdictReport("lemma-4.1")]
    reports[1].add_violation({"word": "0"})

    merged = merge_reports(reports)
    assert [r.check_id for r in merged] == ["lemma-4.1", "lemma-4.2", "prop-4.1"]

    df = summary_df(reports)
    assert list(df.columns) == ["check", "population", "violations", "worst_residual", "pass"]
    assert df["violations"].tolist() == [0, 1, 0]
    assert df["pass"].tolist() == [True, False, True]

    payload = json.loads(suite_to_json(reports))
    assert payload["pass"] is False
    assert [check["check"] for check in payload["checks"]] == ["lemma-4.1", "lemma-4.2", "prop-4.1"]

    with pytest.raises(ValueError):
        merge_reports([VerdictReport("zeta"), VerdictReport("zeta")])
