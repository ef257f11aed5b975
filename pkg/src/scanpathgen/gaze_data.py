"""Gaze recording data model: CSV ingestion, validation and [0,1] normalization.

Recordings are ordered sequences of gaze points with two spatial coordinates
and an optional timestamp. All modelling code downstream assumes coordinates
normalized to the unit square (and unit time interval per recording), which
`normalize` establishes.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyDatasetError, ParseError, SchemaError

CLASS_KEYS = ("stimulus", "participant")


@dataclass(frozen=True)
class GazePoint:
    """One gaze sample; `t` is None for purely spatial recordings."""

    x: float
    y: float
    t: float | None = None


@dataclass(frozen=True)
class GazeRecording:
    """An ordered scan path with class labels.

    Either every point carries a timestamp or none does, and timestamps are
    non-decreasing in sequence order.
    """

    points: tuple[GazePoint, ...]
    stimulus_label: str = ""
    participant_label: str = ""
    recording_id: str = ""
    meta: Mapping[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.points:
            raise SchemaError(f"recording {self.recording_id!r} has no points")
        has_t = [p.t is not None for p in self.points]
        if any(has_t) and not all(has_t):
            raise SchemaError(
                f"recording {self.recording_id!r} mixes timestamped and plain points"
            )
        if all(has_t):
            ts = [p.t for p in self.points]
            if any(b < a for a, b in zip(ts, ts[1:])):
                raise SchemaError(
                    f"recording {self.recording_id!r} has decreasing timestamps"
                )

    @property
    def has_time(self) -> bool:
        return self.points[0].t is not None

    @property
    def dim(self) -> int:
        return 3 if self.has_time else 2

    def __len__(self) -> int:
        return len(self.points)

    def label(self, class_key: str) -> str:
        if class_key == "stimulus":
            return self.stimulus_label
        if class_key == "participant":
            return self.participant_label
        raise SchemaError(f"unknown class key {class_key!r}")

    def to_array(self, include_time: bool = True) -> np.ndarray:
        """Points as an (n, 2) or (n, 3) float array."""
        if include_time and self.has_time:
            return np.array([(p.x, p.y, p.t) for p in self.points], dtype=float)
        return np.array([(p.x, p.y) for p in self.points], dtype=float)


def recording_from_array(
    arr: np.ndarray,
    *,
    stimulus_label: str = "",
    participant_label: str = "",
    recording_id: str = "",
    meta: Mapping[str, float] | None = None,
) -> GazeRecording:
    """Build a recording from an (n, 2) or (n, 3) array (columns x, y[, t])."""
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise SchemaError(f"expected an (n, 2) or (n, 3) array, got shape {arr.shape}")
    if arr.shape[1] == 3:
        pts = tuple(GazePoint(float(x), float(y), float(t)) for x, y, t in arr)
    else:
        pts = tuple(GazePoint(float(x), float(y)) for x, y in arr)
    return GazeRecording(
        pts,
        stimulus_label=stimulus_label,
        participant_label=participant_label,
        recording_id=recording_id,
        meta=dict(meta) if meta else {},
    )


@dataclass(frozen=True)
class Dataset:
    """A collection of recordings plus the label field that defines classes."""

    recordings: tuple[GazeRecording, ...]
    class_key: str = "stimulus"

    def __post_init__(self):
        if self.class_key not in CLASS_KEYS:
            raise SchemaError(
                f"class_key must be one of {CLASS_KEYS}, got {self.class_key!r}"
            )

    def __len__(self) -> int:
        return len(self.recordings)

    def labels(self) -> list[str]:
        return [rec.label(self.class_key) for rec in self.recordings]

    def classes(self) -> list[str]:
        return sorted(set(self.labels()))


def dimensionality(dataset: Dataset) -> int:
    """2 or 3 depending on timestamps; SchemaError when recordings disagree."""
    if not dataset.recordings:
        raise EmptyDatasetError("dataset has no recordings")
    dims = {rec.dim for rec in dataset.recordings}
    if len(dims) > 1:
        raise SchemaError("dataset mixes recordings with and without timestamps")
    return dims.pop()


@dataclass(frozen=True)
class CsvFormat:
    """Column mapping for delimiter-separated gaze files (header row required)."""

    delimiter: str = ","
    x: str = "x"
    y: str = "y"
    t: str = "t"
    rec: str = "rec"
    stimulus: str = "stimulus"
    participant: str = "participant"


def load_recordings(
    path: str | Path, fmt: CsvFormat = CsvFormat(), class_key: str = "stimulus"
) -> Dataset:
    """Read a delimited gaze file into a Dataset.

    Rows sharing a recording id become one recording, preserving row order.
    Coordinates are returned exactly as stored; call `normalize` before
    modelling. Raises ParseError for non-numeric coordinates (naming the
    line), EmptyDatasetError for a file without data rows and SchemaError
    for mixed presence of timestamps inside one recording.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=fmt.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        col = {name: i for i, name in enumerate(header)}
        for required in (fmt.x, fmt.y):
            if required not in col:
                raise SchemaError(f"{path}: missing required column {required!r}")
        ix, iy = col[fmt.x], col[fmt.y]
        it = col.get(fmt.t)
        irec = col.get(fmt.rec)
        istim = col.get(fmt.stimulus)
        ipart = col.get(fmt.participant)

        rows_by_rec: dict[str, list[tuple[float, float, float | None]]] = {}
        labels_by_rec: dict[str, tuple[str, str]] = {}
        for row in reader:
            if not row or all(cell.strip() == "" for cell in row):
                continue
            line = reader.line_num
            try:
                x = float(row[ix])
                y = float(row[iy])
            except (ValueError, IndexError):
                raise ParseError(f"{path}: line {line}: non-numeric x/y in row {row!r}")
            t: float | None = None
            if it is not None and it < len(row) and row[it].strip() != "":
                try:
                    t = float(row[it])
                except ValueError:
                    raise ParseError(f"{path}: line {line}: non-numeric t in row {row!r}")
            rec_id = row[irec].strip() if irec is not None and irec < len(row) else "0"
            rows_by_rec.setdefault(rec_id, []).append((x, y, t))
            if rec_id not in labels_by_rec:
                stim = row[istim].strip() if istim is not None and istim < len(row) else ""
                part = row[ipart].strip() if ipart is not None and ipart < len(row) else ""
                labels_by_rec[rec_id] = (stim, part)

    if not rows_by_rec:
        raise EmptyDatasetError(f"{path}: no data rows")

    recordings = []
    for rec_id, rows in rows_by_rec.items():
        has_t = [t is not None for _, _, t in rows]
        if any(has_t) and not all(has_t):
            raise SchemaError(
                f"{path}: recording {rec_id!r} mixes rows with and without t"
            )
        stim, part = labels_by_rec[rec_id]
        pts = tuple(GazePoint(x, y, t) for x, y, t in rows)
        recordings.append(
            GazeRecording(
                pts,
                stimulus_label=stim,
                participant_label=part,
                recording_id=rec_id,
            )
        )
    return Dataset(tuple(recordings), class_key=class_key)


def write_recordings(
    dataset: Dataset, path: str | Path, fmt: CsvFormat = CsvFormat()
) -> None:
    """Write a Dataset in the same delimited layout `load_recordings` reads."""
    path = Path(path)
    with_time = any(rec.has_time for rec in dataset.recordings)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, delimiter=fmt.delimiter)
        header = [fmt.x, fmt.y]
        if with_time:
            header.append(fmt.t)
        header += [fmt.rec, fmt.stimulus, fmt.participant]
        writer.writerow(header)
        for rec in dataset.recordings:
            for p in rec.points:
                row = [repr(p.x), repr(p.y)]
                if with_time:
                    row.append("" if p.t is None else repr(p.t))
                row += [rec.recording_id, rec.stimulus_label, rec.participant_label]
                writer.writerow(row)


@dataclass(frozen=True)
class Bounds:
    """Explicit spatial normalization bounds (time is always per recording)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float


def _affine01(values: np.ndarray, lo: float, hi: float, degenerate: float) -> np.ndarray:
    if hi == lo:
        return np.full_like(values, degenerate)
    return np.clip((values - lo) / (hi - lo), 0.0, 1.0)


def normalize(dataset: Dataset, bounds: Bounds | None = None) -> Dataset:
    """Map x and y to [0,1] over the whole dataset, t to [0,1] per recording.

    A degenerate spatial axis (max == min) maps to 0.5, degenerate time to 0.
    Applying `normalize` twice gives the same values as applying it once.
    """
    if not dataset.recordings:
        raise EmptyDatasetError("cannot normalize an empty dataset")
    if bounds is None:
        xs = np.concatenate([rec.to_array(False)[:, 0] for rec in dataset.recordings])
        ys = np.concatenate([rec.to_array(False)[:, 1] for rec in dataset.recordings])
        bounds = Bounds(xs.min(), xs.max(), ys.min(), ys.max())

    out = []
    for rec in dataset.recordings:
        arr = rec.to_array()
        nx = _affine01(arr[:, 0], bounds.x_min, bounds.x_max, 0.5)
        ny = _affine01(arr[:, 1], bounds.y_min, bounds.y_max, 0.5)
        if rec.has_time:
            ts = arr[:, 2]
            nt = _affine01(ts, ts.min(), ts.max(), 0.0)
            pts = tuple(
                GazePoint(float(a), float(b), float(c)) for a, b, c in zip(nx, ny, nt)
            )
        else:
            pts = tuple(GazePoint(float(a), float(b)) for a, b in zip(nx, ny))
        out.append(replace(rec, points=pts))
    return Dataset(tuple(out), class_key=dataset.class_key)
