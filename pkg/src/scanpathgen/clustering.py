"""Seeded Lloyd K-Means and greedy cross-recording centroid matching.

`kmeans` is deterministic for a fixed seed: k-means++ initialization, nearest
assignment with ties broken toward the lowest cluster index, and empty-cluster
repair that reseeds to the point currently farthest from its own center.
`combine_close_subclusters` merges centroids of *different* recordings into
groups of matching clusters, bottom-up by group-mean distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_LLOYD_ITERATIONS = 300


@dataclass(frozen=True)
class Centroid:
    """A cluster center: mean position, member count, origin recording."""

    position: np.ndarray
    count: int
    recording_id: str = ""


@dataclass(frozen=True)
class ClusterAssignment:
    """Result of one k-means run: per-point labels, centers and the objective."""

    labels: np.ndarray
    centers: tuple[Centroid, ...]
    wcss: float

    @property
    def k(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class ClusterGroup:
    """Matched centroids from different recordings with their weighted mean."""

    members: tuple[tuple[str, Centroid], ...]
    group_mean: np.ndarray

    @property
    def total_count(self) -> int:
        return sum(c.count for _, c in self.members)


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(n, k) matrix of squared Euclidean distances."""
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centers = np.empty((k, points.shape[1]), dtype=float)
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = points[idx]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _repair_empty(
    points: np.ndarray, centers: np.ndarray, labels: np.ndarray, k: int
) -> bool:
    """Move the point farthest from its own center into each empty cluster.

    Only points from clusters with >= 2 members are candidates, so the repair
    never empties another cluster. Returns True when anything moved.
    """
    repaired = False
    for j in range(k):
        if np.any(labels == j):
            continue
        counts = np.bincount(labels, minlength=k)
        movable = counts[labels] >= 2
        dist = ((points - centers[labels]) ** 2).sum(axis=1)
        dist = np.where(movable, dist, -np.inf)
        idx = int(np.argmax(dist))
        centers[j] = points[idx]
        labels[idx] = j
        repaired = True
    return repaired


def _means(points: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    centers = np.empty((k, points.shape[1]), dtype=float)
    for j in range(k):
        centers[j] = points[labels == j].mean(axis=0)
    return centers


def kmeans(
    points: Sequence[Sequence[float]] | np.ndarray,
    k: int,
    seed: int | np.random.SeedSequence = 0,
    recording_id: str = "",
) -> ClusterAssignment:
    """Cluster points into exactly min(k, n) non-empty clusters.

    When k >= n every point becomes its own cluster. Otherwise Lloyd
    iterations run from a k-means++ start until the assignment is a fixed
    point (or MAX_LLOYD_ITERATIONS). Ties in assignment go to the lowest
    cluster index, which makes runs reproducible for a fixed seed.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("kmeans requires a non-empty (n, d) array of points")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(pts)

    if k >= n:
        labels = np.arange(n)
        centers = tuple(Centroid(pts[i].copy(), 1, recording_id) for i in range(n))
        return ClusterAssignment(labels, centers, 0.0)

    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(pts, k, rng)
    labels = np.argmin(_squared_distances(pts, centers), axis=1)
    _repair_empty(pts, centers, labels, k)
    centers = _means(pts, labels, k)

    for _ in range(MAX_LLOYD_ITERATIONS):
        new_labels = np.argmin(_squared_distances(pts, centers), axis=1)
        repaired = _repair_empty(pts, centers, new_labels, k)
        if not repaired and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centers = _means(pts, labels, k)

    wcss = float(((pts - centers[labels]) ** 2).sum())
    counts = np.bincount(labels, minlength=k)
    out = tuple(
        Centroid(centers[j].copy(), int(counts[j]), recording_id) for j in range(k)
    )
    return ClusterAssignment(labels, out, wcss)


def default_merge_radius(per_recording: Sequence[ClusterAssignment]) -> float:
    """Twice the mean nearest-centroid distance within a recording.

    Falls back to infinity when every recording contributed a single centroid
    (then any cross-recording match is accepted).
    """
    nearest: list[float] = []
    for asg in per_recording:
        if asg.k < 2:
            continue
        pos = np.array([c.position for c in asg.centers])
        d2 = _squared_distances(pos, pos)
        np.fill_diagonal(d2, np.inf)
        nearest.extend(np.sqrt(d2.min(axis=1)).tolist())
    if not nearest:
        return math.inf
    return 2.0 * float(np.mean(nearest))


@dataclass
class _Group:
    members: list[tuple[str, Centroid]]
    mean: np.ndarray
    count: int
    recordings: set[str]


def combine_close_subclusters(
    per_recording: Sequence[ClusterAssignment],
    parent_group_mean: np.ndarray | None = None,
    merge_radius: float | None = None,
) -> tuple[ClusterGroup, ...]:
    """Match clusters of the same parent across recordings.

    All centroids are pooled as singleton groups, then the closest pair of
    groups (by count-weighted group mean) with no recording in common is
    merged, repeatedly, until no mergeable pair lies within `merge_radius`.
    Two centroids of one recording never share a group. `parent_group_mean`
    is accepted for context but does not influence the matching, which runs
    in absolute coordinates.
    """
    if not per_recording:
        return ()
    if merge_radius is None:
        merge_radius = default_merge_radius(per_recording)

    groups: list[_Group] = []
    for asg in per_recording:
        for cent in asg.centers:
            groups.append(
                _Group(
                    members=[(cent.recording_id, cent)],
                    mean=np.asarray(cent.position, dtype=float).copy(),
                    count=cent.count,
                    recordings={cent.recording_id},
                )
            )

    while len(groups) > 1:
        best: tuple[float, int, int] | None = None
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if groups[i].recordings & groups[j].recordings:
                    continue
                dist = float(np.linalg.norm(groups[i].mean - groups[j].mean))
                if dist <= merge_radius and (best is None or dist < best[0]):
                    best = (dist, i, j)
        if best is None:
            break
        _, i, j = best
        gi, gj = groups[i], groups[j]
        total = gi.count + gj.count
        merged = _Group(
            members=gi.members + gj.members,
            mean=(gi.mean * gi.count + gj.mean * gj.count) / total,
            count=total,
            recordings=gi.recordings | gj.recordings,
        )
        groups[i] = merged
        del groups[j]

    return tuple(
        ClusterGroup(members=tuple(g.members), group_mean=g.mean) for g in groups
    )
