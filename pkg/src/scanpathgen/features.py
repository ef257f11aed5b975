"""Scan path descriptors (heatmap, histogram of oriented velocities) and the
four training-data augmentations: cropping, point noise, same-class
concatenation, and random point insertion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import FeatureError, SchemaError
from .gaze_data import GazePoint, GazeRecording

AUGMENT_KINDS = ("crop", "noise", "combine", "random_points")


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-length non-negative descriptor normalized to sum 1."""

    values: np.ndarray
    kind: str
    geometry: tuple[int, ...]


def featurize_heatmap(rec: GazeRecording, grid_w: int = 16, grid_h: int = 16) -> FeatureVector:
    """Spatial occupancy grid; cell (ix, iy) maps to index iy*grid_w + ix."""
    if grid_w < 1 or grid_h < 1:
        raise ValueError("heatmap grid dimensions must be >= 1")
    values = np.zeros(grid_w * grid_h)
    for p in rec.points:
        ix = min(max(int(p.x * grid_w), 0), grid_w - 1)
        iy = min(max(int(p.y * grid_h), 0), grid_h - 1)
        values[iy * grid_w + ix] += 1.0
    values /= values.sum()
    return FeatureVector(values, "heatmap", (grid_w, grid_h))


def featurize_hov(
    rec: GazeRecording, bin_count: int = 36, weight_by_length: bool = True
) -> FeatureVector:
    """Histogram of movement directions between consecutive points.

    Segments are weighted by their length by default (a speed proxy);
    zero-length segments are skipped. A recording with no motion at all
    yields the uniform histogram.
    """
    if bin_count < 2:
        raise ValueError("bin_count must be >= 2")
    if len(rec.points) < 2:
        raise FeatureError(
            f"recording {rec.recording_id!r} has a single point, no velocities"
        )
    xy = rec.to_array(include_time=False)
    deltas = np.diff(xy, axis=0)
    lengths = np.hypot(deltas[:, 0], deltas[:, 1])
    moving = lengths > 0.0
    values = np.zeros(bin_count)
    if not np.any(moving):
        values[:] = 1.0 / bin_count
        return FeatureVector(values, "hov", (bin_count,))
    angles = np.mod(np.arctan2(deltas[moving, 1], deltas[moving, 0]), 2.0 * math.pi)
    bins = np.minimum((angles / (2.0 * math.pi / bin_count)).astype(int), bin_count - 1)
    weights = lengths[moving] if weight_by_length else np.ones(moving.sum())
    np.add.at(values, bins, weights)
    values /= values.sum()
    return FeatureVector(values, "hov", (bin_count,))


def crop(rec: GazeRecording, rng: np.random.Generator, min_fraction: float = 0.5) -> GazeRecording:
    """Keep a contiguous window of uniform-random length in [min_fraction, 1]."""
    n = len(rec.points)
    if n < 4:
        raise ValueError(f"crop needs >= 4 points, got {n}")
    lo = math.ceil(min_fraction * n)
    length = int(rng.integers(lo, n + 1))
    start = int(rng.integers(0, n - length + 1))
    return replace(rec, points=rec.points[start : start + length])


def add_noise(
    rec: GazeRecording, rng: np.random.Generator, sigma: float = 0.01
) -> GazeRecording:
    """Gaussian jitter on x and y, clamped back into [0,1]; t untouched."""
    noise = rng.normal(0.0, sigma, size=(len(rec.points), 2)) if sigma > 0 else None
    pts = []
    for i, p in enumerate(rec.points):
        if noise is None:
            pts.append(p)
            continue
        x = min(max(p.x + noise[i, 0], 0.0), 1.0)
        y = min(max(p.y + noise[i, 1], 0.0), 1.0)
        pts.append(GazePoint(x, y, p.t))
    return replace(rec, points=tuple(pts))


def combine_recordings(
    rec: GazeRecording, pool: Sequence[GazeRecording], rng: np.random.Generator
) -> GazeRecording:
    """Concatenate with a random pool member; timestamps are renormalized so
    the second recording follows the first."""
    if not pool:
        raise ValueError("combine needs a non-empty pool of same-class recordings")
    other = pool[int(rng.integers(len(pool)))]
    if rec.has_time != other.has_time:
        raise SchemaError("cannot combine recordings with and without timestamps")
    if rec.has_time:
        pts = [GazePoint(p.x, p.y, p.t / 2.0) for p in rec.points]
        pts += [GazePoint(p.x, p.y, (p.t + 1.0) / 2.0) for p in other.points]
    else:
        pts = list(rec.points) + list(other.points)
    return replace(rec, points=tuple(pts))


def add_random_points(
    rec: GazeRecording, rng: np.random.Generator, max_fraction: float = 0.05
) -> GazeRecording:
    """Insert up to max_fraction * n uniform-random points at random positions."""
    n = len(rec.points)
    k = int(round(float(rng.uniform()) * max_fraction * n))
    pts = list(rec.points)
    for _ in range(k):
        pos = int(rng.integers(0, len(pts) + 1))
        x = float(rng.uniform())
        y = float(rng.uniform())
        t = None
        if rec.has_time:
            lo = pts[pos - 1].t if pos > 0 else pts[0].t
            hi = pts[pos].t if pos < len(pts) else pts[-1].t
            t = float(rng.uniform(lo, hi)) if hi > lo else lo
        pts.insert(pos, GazePoint(x, y, t))
    return replace(rec, points=tuple(pts))


def augment(
    rec: GazeRecording,
    kind: str,
    rng: np.random.Generator,
    pool: Sequence[GazeRecording] | None = None,
    *,
    sigma: float = 0.01,
    min_crop_fraction: float = 0.5,
    max_random_fraction: float = 0.05,
) -> GazeRecording:
    """Apply one named augmentation; see AUGMENT_KINDS."""
    if kind == "crop":
        return crop(rec, rng, min_crop_fraction)
    if kind == "noise":
        return add_noise(rec, rng, sigma)
    if kind == "combine":
        return combine_recordings(rec, pool or (), rng)
    if kind == "random_points":
        return add_random_points(rec, rng, max_random_fraction)
    raise ValueError(f"unknown augmentation {kind!r}, expected one of {AUGMENT_KINDS}")
