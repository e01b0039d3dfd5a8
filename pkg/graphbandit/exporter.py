"""CSV and JSON export of experiment results, rewards and estimator state."""
import csv
import json
import math
from io import StringIO
from typing import Dict, List, Optional, Sequence

from graphbandit.config import CURVE_COLUMNS, RESULT_COLUMNS
from graphbandit.contextual import EstimatorBank
from graphbandit.environment import NodeRewards
from graphbandit.exceptions import ExperimentError
from graphbandit.models import ErrorCurvePoint

# Written in place of the error rate of a budget too small to run
FLAGGED = "flagged"


def _write(content: str, filepath: Optional[str]) -> str:
    if not filepath:
        return content
    try:
        with open(filepath, "w", encoding="utf-8", newline="") as f:
            f.write(content)
    except OSError as e:
        raise ExperimentError(f"Cannot write {filepath}: {e}", path=filepath)
    return filepath


def _read(filepath: str) -> str:
    try:
        with open(filepath, "r", encoding="utf-8", newline="") as f:
            return f.read()
    except OSError as e:
        raise ExperimentError(f"Cannot read {filepath}: {e}", path=filepath)


def _render_csv(header: Sequence[str], rows: List[List]) -> str:
    output = StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    content = output.getvalue()
    output.close()
    return content


class ResultExporter:
    """Export per-run result rows (one dict per run) to CSV."""

    def __init__(self, rows: List[Dict], columns: Sequence[str] = RESULT_COLUMNS):
        """Initialize exporter with result rows.

        Args:
            rows: Result dicts, each holding every column
            columns: Column order of the CSV
        """
        self.rows = rows
        self.columns = list(columns)

    def to_csv(self, filepath: Optional[str] = None) -> str:
        """Export rows to CSV.

        Returns:
            CSV string if filepath is None, otherwise the path written

        Raises:
            ExperimentError: If a row lacks a column or the file cannot be written
        """
        body = []
        for idx, row in enumerate(self.rows):
            missing = [c for c in self.columns if c not in row]
            if missing:
                raise ExperimentError(f"Result row {idx} lacks columns {missing}")
            body.append([row[c] for c in self.columns])
        return _write(_render_csv(self.columns, body), filepath)


class CurveExporter:
    """Export error-curve points to CSV; flagged points carry no error rate."""

    def __init__(self, points: List[ErrorCurvePoint]):
        self.points = points

    def to_csv(self, filepath: Optional[str] = None) -> str:
        body = [
            [p.algorithm, p.budget, FLAGGED if p.flagged else p.error_rate, p.repetitions]
            for p in self.points
        ]
        return _write(_render_csv(CURVE_COLUMNS, body), filepath)


def parse_curve_csv(text: str) -> List[ErrorCurvePoint]:
    """Inverse of CurveExporter.to_csv."""
    points = []
    for row in csv.DictReader(StringIO(text)):
        rate = None if row["error_rate"] == FLAGGED else float(row["error_rate"])
        points.append(ErrorCurvePoint(row["algorithm"], int(row["budget"]), rate,
                                      int(row["repetitions"])))
    return points


def write_rewards_csv(rewards: NodeRewards, filepath: Optional[str] = None) -> str:
    """Write (node, reward) rows."""
    body = [[node, r] for node, r in enumerate(rewards.rewards, start=1)]
    return _write(_render_csv(["node", "reward"], body), filepath)


def read_rewards_csv(filepath: str) -> NodeRewards:
    """Load rewards written by write_rewards_csv.

    Raises:
        ExperimentError: If nodes are not exactly 1..n
    """
    rows = list(csv.DictReader(StringIO(_read(filepath))))
    nodes = [int(r["node"]) for r in rows]
    if nodes != list(range(1, len(rows) + 1)):
        raise ExperimentError("Reward file must list nodes 1..n in order", path=filepath)
    return NodeRewards(tuple(float(r["reward"]) for r in rows))


def _estimator_header(dimension: int) -> List[str]:
    header = ["i", "j"]
    header += [f"a_{r}_{c}" for r in range(dimension) for c in range(dimension)]
    header += [f"b_{k}" for k in range(dimension)]
    header.append("stage_pulls")
    return header


def write_estimators_csv(bank: EstimatorBank, filepath: Optional[str] = None) -> str:
    """Snapshot an estimator bank: edge, A row-major, b, per-stage counts.

    Counts are encoded as ``stage:count`` pairs joined by ``;``. Floats are
    written with their shortest exact representation, so a restored bank
    reproduces every later result bit for bit.
    """
    body = []
    for row in bank.to_rows():
        counts = ";".join(f"{s}:{c}" for s, c in row["stage_pulls"].items())
        body.append([row["i"], row["j"]] + [repr(v) for v in row["matrix"]]
                    + [repr(v) for v in row["response"]] + [counts])
    return _write(_render_csv(_estimator_header(bank.dimension), body), filepath)


def read_estimators_csv(filepath: str) -> EstimatorBank:
    """Restore a bank written by write_estimators_csv."""
    reader = csv.reader(StringIO(_read(filepath)))
    header = next(reader)
    dimension = math.isqrt(header.index("b_0") - 2)
    rows = []
    for record in reader:
        size = dimension * dimension
        counts = {}
        if record[-1]:
            for pair in record[-1].split(";"):
                stage, count = pair.split(":")
                counts[int(stage)] = int(count)
        rows.append({
            "i": int(record[0]),
            "j": int(record[1]),
            "matrix": [float(v) for v in record[2:2 + size]],
            "response": [float(v) for v in record[2 + size:2 + size + dimension]],
            "stage_pulls": counts,
        })
    return EstimatorBank.from_rows(dimension, rows)


def write_manifest(manifest: Dict, filepath: Optional[str] = None) -> str:
    """Write a run manifest as sorted, indented JSON.

    The manifest holds only run inputs and outputs, never timestamps, so
    identical runs produce identical files.
    """
    content = json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return _write(content, filepath)
