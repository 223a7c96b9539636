"""Inequality check reports: schema, serialization, and aggregation.

The JSON schema per report is fixed for cross-tool compatibility:
{name, lhs, rhs, slack, pass, hypothesis_ok, witness, params}.  Floats are
rendered with 17 significant digits so identical runs serialize to identical
bytes.  Checks whose hypotheses were not met (hypothesis_ok = false) are
informational and never count as failures.
"""

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass, field


@dataclass
class InequalityReport:
    """Outcome of one named check of lhs <= rhs."""

    name: str
    lhs: float
    rhs: float
    tol: float = 0.0
    hypothesis_ok: bool = True
    witness: str = ""
    params: dict = field(default_factory=dict)

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def passed(self):
        return self.slack >= -self.tol

    def to_dict(self):
        params = dict(self.params)
        params["tol"] = self.tol
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": bool(self.passed),
            "hypothesis_ok": bool(self.hypothesis_ok),
            "witness": self.witness,
            "params": params,
        }


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return '"nan"'
        if math.isinf(value):
            return '"inf"' if value > 0 else '"-inf"'
        return f"{value:.17g}"
    if isinstance(value, (int, str)) or value is None:
        return json.dumps(value)
    if isinstance(value, dict):
        inner = ", ".join(
            f"{json.dumps(k)}: {_format_value(v)}" for k, v in sorted(value.items())
        )
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return json.dumps(str(value))


def dumps_reports(reports):
    """Serialize reports as a JSON array with stable float formatting."""
    body = ",\n ".join(_format_value(r.to_dict()) for r in reports)
    return "[\n " + body + "\n]\n" if reports else "[]\n"


def write_atomic(path, text):
    """Write text to path via a temp file and rename (no partial writes)."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_reports(path, reports):
    write_atomic(path, dumps_reports(reports))


def load_reports(path):
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of reports")
    reports = []
    for entry in data:
        try:
            params = dict(entry.get("params", {}))
            tol = float(params.pop("tol", 0.0))
            reports.append(
                InequalityReport(
                    name=entry["name"],
                    lhs=float(entry["lhs"]),
                    rhs=float(entry["rhs"]),
                    tol=tol,
                    hypothesis_ok=bool(entry.get("hypothesis_ok", True)),
                    witness=entry.get("witness", ""),
                    params=params,
                )
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{path}: malformed report entry: {exc}") from exc
    return reports


def summarize(reports):
    """Per-name aggregate rows: (name, count, pass_rate, min_slack)."""
    groups = {}
    for rep in reports:
        groups.setdefault(rep.name, []).append(rep)
    rows = []
    for name in sorted(groups):
        members = groups[name]
        count = len(members)
        rate = sum(1 for r in members if r.passed) / count
        rows.append((name, count, rate, min(r.slack for r in members)))
    return rows


def write_summary_csv(path, reports):
    rows = summarize(reports)
    lines = ["name,count,pass_rate,min_slack"]
    for name, count, rate, min_slack in rows:
        lines.append(f"{name},{count},{rate:.17g},{min_slack:.17g}")
    write_atomic(path, "\n".join(lines) + "\n")


def merge_report_files(paths):
    """Merge report JSON files into summary rows (the `rilab merge` backend)."""
    reports = []
    for path in paths:
        reports.extend(load_reports(path))
    return summarize(reports)


def failures(reports):
    """Names of asserted (hypothesis_ok) reports that failed."""
    return sorted({r.name for r in reports if r.hypothesis_ok and not r.passed})
