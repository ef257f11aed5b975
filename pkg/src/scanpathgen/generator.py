"""Generate new scan paths by stochastic top-down traversal of a model.

One pending cluster starts at the origin. Per level each live branch draws a
cluster count (zero ends the branch; level 1 draws at least one so a scan
path is never empty), picks a random node of that level for every cluster,
and spawns a random number of subclusters positioned at the parent position
plus a shift synthesized from the node's principal components. After the last
level the pending positions are the gaze points. Models with time get their
points sorted and the time axis renormalized; purely spatial models get
linear timestamps appended.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import GenerationError
from .gaze_data import GazePoint, GazeRecording, recording_from_array
from .model_builder import ScanPathModel, UpdateRule, apply_update_rule
from .shape_model import sample_weights, synthesize_shift


@dataclass(frozen=True)
class GeneratorConfig:
    max_clusters: int
    max_subclusters: int
    dyn_cluster: bool = False
    rule: UpdateRule = UpdateRule()
    seed: int = 0
    clamp_to_unit: bool = True
    weight_by_support: bool = False

    def __post_init__(self):
        if self.max_clusters < 1:
            raise ValueError(f"max_clusters must be >= 1, got {self.max_clusters}")
        if self.max_subclusters < 1:
            raise ValueError(f"max_subclusters must be >= 1, got {self.max_subclusters}")


@dataclass
class PendingCluster:
    """A branch of the generation tree; terminated branches pass through."""

    position: np.ndarray
    terminated: bool = False


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def normalize_time(points: Sequence[np.ndarray] | np.ndarray) -> GazeRecording:
    """Sort 3-D points by time and remap t affinely onto [0,1]."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3 or len(arr) == 0:
        raise ValueError("normalize_time requires a non-empty (n, 3) array")
    arr = arr[np.argsort(arr[:, 2], kind="stable")]
    t = arr[:, 2]
    span = t[-1] - t[0]
    if len(arr) == 1 or span == 0.0:
        arr[:, 2] = 0.0
    else:
        arr[:, 2] = (t - t[0]) / span
    return recording_from_array(arr)


def add_time(points: Sequence[np.ndarray] | np.ndarray) -> GazeRecording:
    """Append linear timestamps 0..1 to 2-D points, preserving order."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) == 0:
        raise ValueError("add_time requires a non-empty (n, 2) array")
    n = len(arr)
    t = np.zeros(n) if n == 1 else np.arange(n) / (n - 1)
    return recording_from_array(np.column_stack([arr, t]))


def generate_scanpath(
    model: ScanPathModel,
    config: GeneratorConfig,
    rng: np.random.Generator | None = None,
) -> GazeRecording:
    """Generate one scan path; deterministic for a fixed config.seed."""
    if rng is None:
        rng = _stream(config.seed, 0)

    pending = [PendingCluster(np.zeros(model.dim))]
    branch_draws = 0
    branch_terminations = 0
    leaf_bound = 1

    max_c, max_s = config.max_clusters, config.max_subclusters
    for level in range(1, model.max_level + 1):
        nodes = model.levels[level - 1]
        if not nodes:
            raise GenerationError(f"model has no nodes at level {level}")
        if config.dyn_cluster:
            max_c = apply_update_rule(config.rule, config.max_clusters, level)
            max_s = apply_update_rule(config.rule, config.max_subclusters, level)
        leaf_bound *= max_c * max_s

        supports = None
        if config.weight_by_support:
            supports = np.array([n.support for n in nodes], dtype=float)
            supports /= supports.sum()

        new_pending: list[PendingCluster] = []
        for branch in pending:
            if branch.terminated:
                new_pending.append(branch)
                continue
            if level == 1:
                num_clusters = int(rng.integers(1, max_c + 1))
            else:
                branch_draws += 1
                num_clusters = int(rng.integers(0, max_c + 1))
            if num_clusters == 0:
                branch_terminations += 1
                new_pending.append(PendingCluster(branch.position, terminated=True))
                continue
            for _ in range(num_clusters):
                if supports is None:
                    node = nodes[int(rng.integers(len(nodes)))]
                else:
                    node = nodes[int(rng.choice(len(nodes), p=supports))]
                num_sub = int(rng.integers(1, max_s + 1))
                for _ in range(num_sub):
                    w = sample_weights(node.shape, rng)
                    pos = branch.position + synthesize_shift(node.shape, w)
                    new_pending.append(PendingCluster(pos))
        pending = new_pending

    assert len(pending) <= leaf_bound, "leaf count exceeded the structural bound"

    leaves = np.array([b.position for b in pending])
    if model.dim == 3:
        rec = normalize_time(leaves)
    else:
        rec = add_time(leaves)

    clamped = 0
    if config.clamp_to_unit:
        pts = []
        for p in rec.points:
            cx = min(max(p.x, 0.0), 1.0)
            cy = min(max(p.y, 0.0), 1.0)
            if cx != p.x or cy != p.y:
                clamped += 1
            pts.append(GazePoint(cx, cy, p.t))
        rec = replace(rec, points=tuple(pts))

    meta = {
        "clamped_points": clamped,
        "branch_draws": branch_draws,
        "branch_terminations": branch_terminations,
    }
    return replace(rec, meta=meta)


def generate_batch(
    model: ScanPathModel,
    config: GeneratorConfig,
    count: int,
    *,
    threads: int = 1,
    stimulus_label: str = "",
    participant_label: str = "",
    id_prefix: str = "gen",
) -> list[GazeRecording]:
    """Generate `count` scan paths on independent per-index RNG streams.

    Stream i is derived from (config.seed, i), so the batch contents do not
    depend on scheduling and batch element 0 equals a single
    `generate_scanpath` call.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")

    def one(i: int) -> GazeRecording:
        rec = generate_scanpath(model, config, rng=_stream(config.seed, i))
        return replace(
            rec,
            stimulus_label=stimulus_label,
            participant_label=participant_label,
            recording_id=f"{id_prefix}-{i:05d}",
        )

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(count)))
    return [one(i) for i in range(count)]
