"""Synthetic gaze datasets for experiments and tests.

Recordings are built as alternating visits to a set of Gaussian blobs, so a
class has both a spatial signature (blob layout) and a directional one (the
inter-blob movement axis).
"""
from __future__ import annotations

import numpy as np

from .gaze_data import Dataset, GazeRecording, recording_from_array

FOUR_CLASS_LAYOUTS: dict[str, tuple[tuple[float, float], ...]] = {
    "horizontal": ((0.15, 0.5), (0.85, 0.5)),
    "vertical": ((0.5, 0.15), (0.5, 0.85)),
    "diagonal": ((0.2, 0.2), (0.8, 0.8)),
    "antidiagonal": ((0.2, 0.8), (0.8, 0.2)),
}


def blob_recording(
    rng: np.random.Generator,
    centers: tuple[tuple[float, float], ...],
    sigma: float = 0.03,
    visits: int = 6,
    points_per_visit: int = 8,
    with_time: bool = False,
    *,
    recording_id: str = "",
    stimulus_label: str = "",
    participant_label: str = "",
) -> GazeRecording:
    """One scan path cycling through `centers`, Gaussian jitter per point."""
    rows = []
    for v in range(visits):
        cx, cy = centers[v % len(centers)]
        pts = rng.normal(loc=(cx, cy), scale=sigma, size=(points_per_visit, 2))
        rows.append(np.clip(pts, 0.0, 1.0))
    xy = np.concatenate(rows)
    if with_time:
        n = len(xy)
        t = np.zeros(n) if n == 1 else np.arange(n) / (n - 1)
        xy = np.column_stack([xy, t])
    return recording_from_array(
        xy,
        recording_id=recording_id,
        stimulus_label=stimulus_label,
        participant_label=participant_label,
    )


def blob_dataset(
    centers: tuple[tuple[float, float], ...],
    n_recordings: int = 2,
    sigma: float = 0.02,
    visits: int = 6,
    points_per_visit: int = 8,
    seed: int = 0,
    with_time: bool = False,
    stimulus_label: str = "blobs",
) -> Dataset:
    """Several recordings over the same blob layout (single class)."""
    rng = np.random.default_rng(seed)
    recs = tuple(
        blob_recording(
            rng,
            centers,
            sigma=sigma,
            visits=visits,
            points_per_visit=points_per_visit,
            with_time=with_time,
            recording_id=f"r{i}",
            stimulus_label=stimulus_label,
            participant_label=f"p{i}",
        )
        for i in range(n_recordings)
    )
    return Dataset(recs, class_key="stimulus")


def four_class_dataset(
    recordings_per_class: int = 20,
    sigma: float = 0.03,
    visits: int = 6,
    points_per_visit: int = 8,
    seed: int = 0,
) -> Dataset:
    """Four stimuli with distinct blob layouts and movement axes."""
    rng = np.random.default_rng(seed)
    recs = []
    for cls, centers in FOUR_CLASS_LAYOUTS.items():
        for i in range(recordings_per_class):
            recs.append(
                blob_recording(
                    rng,
                    centers,
                    sigma=sigma,
                    visits=visits,
                    points_per_visit=points_per_visit,
                    recording_id=f"{cls}-{i:03d}",
                    stimulus_label=cls,
                    participant_label=f"p{i % 5}",
                )
            )
    return Dataset(tuple(recs), class_key="stimulus")
