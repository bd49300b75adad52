"""Flat-file formats: dataset CSV and model JSON.

Dataset CSV has header ``x1,...,xn,y`` plus an optional trailing ``zeta``
column for truth labels, one row per sample.  Floats are written with
Python's shortest round-trip representation, so save/load is bitwise
lossless.  Model JSON is ``{"n": ..., "S": ..., "params": [[...], ...]}``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import Assignment, Dataset, SLModel


def save_dataset(path, data: Dataset) -> None:
    path = Path(path)
    header = [f"x{j + 1}" for j in range(data.n)] + ["y"]
    if data.truth is not None:
        header.append("zeta")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(data.N):
            row = [repr(float(v)) for v in data.regressors[k]]
            row.append(repr(float(data.outputs[k])))
            if data.truth is not None:
                row.append(str(int(data.truth.labels[k])))
            writer.writerow(row)


def load_dataset(path) -> Dataset:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    has_labels = bool(header) and header[-1] == "zeta"
    n = len(header) - (2 if has_labels else 1)
    if n < 1 or header[:n] != [f"x{j + 1}" for j in range(n)] or header[n] != "y":
        raise ValueError(f"{path}: malformed dataset header {header!r}")
    regressors = np.array([[float(v) for v in row[:n]] for row in rows])
    outputs = np.array([float(row[n]) for row in rows])
    truth = None
    if has_labels:
        truth = Assignment(np.array([int(row[n + 1]) for row in rows]))
    return Dataset(regressors, outputs, truth=truth)


def save_model(path, model: SLModel) -> None:
    payload = {
        "n": model.n,
        "S": model.S,
        "params": [[float(v) for v in row] for row in model.params],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_model(path) -> SLModel:
    payload = json.loads(Path(path).read_text())
    model = SLModel(np.array(payload["params"], dtype=float))
    if model.n != payload["n"] or model.S != payload["S"]:
        raise ValueError(f"{path}: declared n/S disagree with params shape")
    return model
