"""CSV/JSON file formats: vector files, instance bundles and sweep reports."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import List, Sequence

import numpy as np

from ..model import ProblemInstance, TrialReport
from .sweep import CellSummary, SweepReport

REPORT_COLUMNS = (
    "variant",
    "num_sis",
    "m",
    "trials",
    "successes",
    "success_probability",
    "mean_rel_err",
    "mean_iters",
)


class VectorParseError(ValueError):
    def __init__(self, path, row: int, column: int, message: str):
        self.path, self.row, self.column = str(path), row, column
        super().__init__(f"{path}: row {row}, column {column}: {message}")


def _fmt(v: float) -> str:
    return repr(float(v))


def ingest_vectors(path, format: str = "csv") -> List[np.ndarray]:
    """Read one vector per row of a header-less CSV file.

    Rows and columns in error messages are 1-based.
    """
    if format != "csv":
        raise ValueError(f"unsupported vector format {format!r}")
    vectors = []
    width = None
    with open(path, newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            values = []
            for col_no, token in enumerate(row, start=1):
                try:
                    value = float(token.strip())
                except ValueError:
                    raise VectorParseError(path, row_no, col_no, f"not a number: {token!r}") from None
                if not math.isfinite(value):
                    raise VectorParseError(path, row_no, col_no, f"non-finite value {token!r}")
                values.append(value)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise VectorParseError(
                    path, row_no, len(values), f"expected {width} values, found {len(values)}"
                )
            vectors.append(np.array(values))
    return vectors


def write_vectors(path, vectors: Sequence[np.ndarray]) -> None:
    """Write vectors one per row; ``repr`` keeps all 17 significant digits."""
    with open(path, "w", newline="") as fh:
        for v in vectors:
            fh.write(",".join(_fmt(x) for x in np.asarray(v, dtype=np.float64).ravel()) + "\n")


def write_instance(directory, inst: ProblemInstance, manifest: dict) -> Path:
    """Write ``phi.csv``, ``y.csv``, ``z.csv`` (+ ``x.csv``) and ``manifest.json``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_vectors(d / "phi.csv", inst.phi)
    write_vectors(d / "y.csv", [inst.y])
    write_vectors(d / "z.csv", inst.side_infos)
    if inst.x_true is not None:
        write_vectors(d / "x.csv", [inst.x_true])
    meta = {"n": inst.n, "m": inst.m, "J": inst.num_sis, **manifest}
    (d / "manifest.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return d


def read_instance(directory) -> tuple:
    """Inverse of :func:`write_instance`; returns ``(instance, manifest)``."""
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    phi = np.vstack(ingest_vectors(d / "phi.csv"))
    (y,) = ingest_vectors(d / "y.csv")
    zs = ingest_vectors(d / "z.csv") if (d / "z.csv").exists() else []
    x = None
    if (d / "x.csv").exists():
        (x,) = ingest_vectors(d / "x.csv")
    if phi.shape != (manifest["m"], manifest["n"]) or len(zs) != manifest["J"]:
        raise ValueError(f"{d}: files disagree with manifest (phi {phi.shape}, J={len(zs)})")
    return ProblemInstance(phi, y, tuple(zs), x), manifest


def report_to_dict(report: SweepReport, include_timing: bool = False) -> dict:
    """Plain-data view of a report.

    Wall times and the creation timestamp are left out unless
    ``include_timing`` is set, so reruns with the same seeds serialize
    identically.
    """
    trials = []
    for t in report.trials:
        row = asdict(t)
        if not include_timing:
            row.pop("wall_time")
        trials.append(row)
    meta = dict(report.metadata)
    if not include_timing:
        meta.pop("timestamp", None)
    return {
        "metadata": meta,
        "cells": [asdict(c) for c in report.cells],
        "trials": trials,
    }


def export_report(report: SweepReport, path, format: str = "csv", include_timing: bool = False) -> None:
    path = Path(path)
    try:
        if format == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(REPORT_COLUMNS)
                for c in report.cells:
                    writer.writerow([
                        c.variant, c.num_sis, c.m, c.trials, c.successes,
                        _fmt(c.success_probability), _fmt(c.mean_rel_err), _fmt(c.mean_iters),
                    ])
        elif format == "json":
            text = json.dumps(report_to_dict(report, include_timing), indent=2, sort_keys=True)
            path.write_text(text + "\n")
        else:
            raise ValueError(f"unsupported report format {format!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def load_report_json(path) -> SweepReport:
    data = json.loads(Path(path).read_text())
    cells = [CellSummary(**c) for c in data["cells"]]
    trials = [TrialReport(**{"wall_time": 0.0, **t}) for t in data["trials"]]
    return SweepReport(cells, trials, data["metadata"])


def read_report_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
