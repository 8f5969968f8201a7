"""
Verdicts of the verifiers and the gates that decide them.
"""

import json
import logging
from collections import OrderedDict

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["check", "population", "violations", "worst_residual", "pass"]


def to_native(value):
    """
    Convert numpy scalars and containers to plain Python for JSON.
    """
    if isinstance(value, dict):
        return OrderedDict((str(k), to_native(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [to_native(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_native(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def trend_gate(series, window, tolerance=0.0):
    """
    True when the last window values never increase by more than tolerance.
    """
    tail = list(series)[-window:]
    return all(later <= earlier + tolerance for earlier, later in zip(tail, tail[1:]))


def final_gate(series, bound):
    """
    True when the last value is below bound.
    """
    series = list(series)
    return bool(series) and series[-1] < bound


def band_gate(values, low, high):
    """
    True when every value lies in [low, high].
    """
    return all(low <= v <= high for v in values)


class VerdictReport(object):
    """
    Outcome of one verifier.
    """

    def __init__(self, check_id, params=None):
        """
        Parameters
        ----------
        check_id: str
            Stable identifier, reports are merged in check_id order

        params: dict
            Parameters the check ran with, including any rng seed
        """
        self.check_id = check_id
        self.params = OrderedDict(params or {})
        self.population = 0
        self.violations = []
        self.residuals = OrderedDict()
        self.gates = OrderedDict()
        self.notes = []
        self.worst_residual = None

    @property
    def passed(self):
        return not self.violations and all(self.gates.values())

    def add_violation(self, record):
        self.violations.append(OrderedDict(record))

    def add_gate(self, name, ok):
        self.gates[name] = bool(ok)
        if not ok:
            logger.info("%s: gate %s failed", self.check_id, name)

    def add_note(self, note):
        self.notes.append(note)

    def set_residual_table(self, df):
        """
        Store residual series column by column.
        """
        for column in df.columns:
            self.residuals[column] = [None if pd.isna(v) else to_native(v) for v in df[column].tolist()]

    def get_residual_df(self):
        return pd.DataFrame(self.residuals)

    def to_dict(self):

        return OrderedDict(
            [
                ("check", self.check_id),
                ("pass", self.passed),
                ("population", self.population),
                ("violation_count", len(self.violations)),
                ("worst_residual", self.worst_residual),
                ("params", self.params),
                ("gates", self.gates),
                ("residuals", self.residuals),
                ("violations", self.violations),
                ("notes", self.notes),
            ]
        )

    @classmethod
    def from_dict(cls, data):

        report = cls(data["check"], params=data.get("params"))
        report.population = data["population"]
        report.worst_residual = data.get("worst_residual")
        report.violations = [OrderedDict(v) for v in data.get("violations", [])]
        report.residuals = OrderedDict(data.get("residuals", {}))
        report.gates = OrderedDict(data.get("gates", {}))
        report.notes = list(data.get("notes", []))
        return report

    def to_json(self):
        return json.dumps(to_native(self.to_dict()), indent=2) + "\n"

    def summary_row(self):

        return OrderedDict(
            [
                ("check", self.check_id),
                ("population", self.population),
                ("violations", len(self.violations)),
                ("worst_residual", self.worst_residual),
                ("pass", self.passed),
            ]
        )

    def __repr__(self):
        return "{}: {} ({} examined, {} violations)".format(
            self.check_id, "PASS" if self.passed else "FAIL", self.population, len(self.violations)
        )


def merge_reports(reports):
    """
    Order reports by check id; duplicate ids are an error.
    """
    by_id = OrderedDict()
    for report in reports:
        if report.check_id in by_id:
            raise ValueError("Duplicate check id {}".format(report.check_id))
        by_id[report.check_id] = report

    return [by_id[check_id] for check_id in sorted(by_id)]


def suite_to_json(reports, config=None):
    """
    Serialize merged reports, with the run configuration when given.
    """
    payload = OrderedDict()
    if config is not None:
        payload["config"] = config.to_dict()
    payload["pass"] = all(report.passed for report in reports)
    payload["checks"] = [report.to_dict() for report in merge_reports(reports)]

    return json.dumps(to_native(payload), indent=2) + "\n"


def summary_df(reports):
    """
    One row per check with columns check, population, violations, worst_residual, pass.
    """
    return pd.DataFrame([report.summary_row() for report in merge_reports(reports)], columns=SUMMARY_COLUMNS)
