"""CSV dataset files and top-k evaluation reports."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import IO, Iterable, Union

import numpy as np

from passcast.features import (
    ANGLE_SCALE,
    DIST_SCALE,
    VEL_SCALE,
    X_SCALE,
    Y_SCALE,
    Level,
    extract,
)
from passcast.geometry import FieldSpec
from passcast.labeler import PassEvent
from passcast.mlp import Model, forward, topk_indices

PathLike = Union[str, os.PathLike]


class DatasetFormatError(ValueError):
    pass


@dataclass
class Dataset:
    level: Level
    X: np.ndarray  # (n, dim)
    y: np.ndarray  # receiver unums 1..11

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float).reshape(-1, self.level.dim)
        self.y = np.asarray(self.y, dtype=int)
        if len(self.X) != len(self.y):
            raise DatasetFormatError("row and label counts differ")

    def __len__(self) -> int:
        return len(self.y)


def from_events(events: Iterable[PassEvent], level, field: FieldSpec = FieldSpec()) -> Dataset:
    level = Level.parse(level)
    events = list(events)
    X = np.array([extract(e.state, level, field) for e in events]).reshape(-1, level.dim)
    return Dataset(level, X, np.array([e.receiver_unum for e in events], dtype=int))


def _header_lines(level: Level, field: FieldSpec) -> list[str]:
    pts = ";".join(f"{p.x!r} {p.y!r}" for p in field.important_points)
    return [
        f"# level,{level.value}",
        f"# scale,x={X_SCALE!r},y={Y_SCALE!r},vel={VEL_SCALE!r},dist={DIST_SCALE!r},angle={ANGLE_SCALE!r}",
        f"# points,{pts}",
        "# order,ball_pos ball_vel player_pos player_vel"
        " | ball_point_dist ball_point_angle ball_player_dist ball_player_angle player_point_dist"
        " | free_angle min_dist_teammate min_dist_opponent",
    ]


def dumps(ds: Dataset, field: FieldSpec = FieldSpec()) -> str:
    buf = io.StringIO()
    for line in _header_lines(ds.level, field):
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"f{i}" for i in range(ds.level.dim)] + ["label"])
    for row, label in zip(ds.X, ds.y):
        w.writerow([repr(float(v)) for v in row] + [int(label)])
    return buf.getvalue()


def write_dataset(ds: Dataset, path: PathLike, field: FieldSpec = FieldSpec()) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(dumps(ds, field))


def parse_dataset(fh: IO[str]) -> Dataset:
    level = None
    header = None
    rows, labels = [], []
    for line_no, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        if header is None and (line.startswith("#") or line.startswith("level,")):
            key, _, value = line.lstrip("#").strip().partition(",")
            if key == "level":
                try:
                    level = Level.parse(value.strip())
                except ValueError as exc:
                    raise DatasetFormatError(f"line {line_no}: {exc}") from None
            continue
        if header is None:
            if level is None:
                raise DatasetFormatError("dataset has no level line")
            header = line.split(",")
            if len(header) != level.dim + 1 or header[-1] != "label":
                raise DatasetFormatError(
                    f"column header has {len(header)} fields; level {level.value} needs {level.dim + 1}"
                )
            continue
        fields = line.split(",")
        if len(fields) != level.dim + 1:
            raise DatasetFormatError(f"line {line_no}: {len(fields)} fields, expected {level.dim + 1}")
        try:
            rows.append([float(v) for v in fields[:-1]])
            label = int(fields[-1])
        except ValueError:
            raise DatasetFormatError(f"line {line_no}: non-numeric field") from None
        if not 1 <= label <= 11:
            raise DatasetFormatError(f"line {line_no}: label {label} outside 1..11")
        labels.append(label)
    if level is None or header is None:
        raise DatasetFormatError("incomplete dataset header")
    return Dataset(level, np.array(rows, dtype=float).reshape(-1, level.dim), np.array(labels, dtype=int))


def read_dataset(path: PathLike) -> Dataset:
    with open(path, encoding="ascii", errors="replace") as fh:
        return parse_dataset(fh)


@dataclass
class MetricsReport:
    n: int
    top1: float
    top2: float
    confusion: np.ndarray  # [true unum - 1, predicted unum - 1]

    def format(self) -> str:
        lines = [
            f"samples {self.n}",
            f"top1 {self.top1:.4f}",
            f"top2 {self.top2:.4f}",
            "confusion (rows: true unum, cols: predicted unum)",
            "     " + " ".join(f"{u:>5d}" for u in range(1, 12)),
        ]
        for u in range(11):
            lines.append(f"{u + 1:>4d} " + " ".join(f"{c:>5d}" for c in self.confusion[u]))
        return "\n".join(lines)


def evaluate(model: Model, X: np.ndarray, y: np.ndarray) -> MetricsReport:
    """Top-1/top-2 accuracy and top-1 confusion counts on labelled rows."""
    y_idx = np.asarray(y, dtype=int) - 1
    n = len(y_idx)
    confusion = np.zeros((11, 11), dtype=int)
    if n == 0:
        return MetricsReport(0, float("nan"), float("nan"), confusion)
    P = forward(model, np.asarray(X, dtype=float))
    top = topk_indices(P, 2)
    np.add.at(confusion, (y_idx, top[:, 0]), 1)
    top1 = float(np.trace(confusion)) / n
    top2 = float((top == y_idx[:, None]).any(axis=1).sum()) / n
    return MetricsReport(n, top1, top2, confusion)
