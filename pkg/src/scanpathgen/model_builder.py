"""Build the level-wise scan path model from a dataset and persist it.

The hierarchy is built top-down. Level 1 clusters every recording's raw
points and matches the resulting centroids across recordings; each matched
group becomes a node whose principal components are fit on the member
centroids (shift vectors relative to the parent mean, which is the origin at
level 1). Each deeper level re-clusters the points inside every group member,
matches the subcluster centroids across recordings within that group, and
fits the next round of nodes on subcluster-mean shifts relative to the parent
group mean. A node's `shape.mean_shift` is therefore the generative shift the
generator adds to a parent position; `mean_shift` on the node itself records
the count-weighted group mean shift for inspection and invariant checks.

Recursion stops at the configured depth or as soon as no member cluster has
at least 2 points left to subdivide.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import ClusterAssignment, combine_close_subclusters, kmeans
from .errors import ConfigError, ParseError, VersionError
from .gaze_data import Dataset, dimensionality
from .shape_model import PrincipalComponents, fit_pca

MODEL_FORMAT_VERSION = "1"
RULE_NAMES = ("constant", "halving", "linear_decay")


@dataclass(frozen=True)
class UpdateRule:
    """Named schedule for the cluster count across levels."""

    name: str = "constant"

    def __post_init__(self):
        if self.name not in RULE_NAMES:
            raise ConfigError(f"unknown update rule {self.name!r}, expected one of {RULE_NAMES}")


def apply_update_rule(rule: UpdateRule, num_clusters: int, level: int) -> int:
    """Cluster count for `level` given the level-1 count; always >= 1."""
    if num_clusters < 1:
        raise ValueError(f"num_clusters must be >= 1, got {num_clusters}")
    if rule.name == "constant":
        return num_clusters
    if rule.name == "halving":
        return max(1, num_clusters // 2 ** (level - 1))
    if rule.name == "linear_decay":
        return max(1, num_clusters - (level - 1))
    raise ConfigError(f"unknown update rule {rule.name!r}")


@dataclass(frozen=True)
class BuildConfig:
    """All parameters of a model build; stored inside the model file."""

    num_clusters: int
    max_level: int
    dyn_cluster: bool = False
    rule: UpdateRule = UpdateRule()
    merge_radius: float | None = None
    variance_fraction: float = 0.95
    time_weight: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.num_clusters < 1:
            raise ConfigError(f"num_clusters must be >= 1, got {self.num_clusters}")
        if self.max_level < 1:
            raise ConfigError(f"max_level must be >= 1, got {self.max_level}")
        if self.time_weight <= 0:
            raise ConfigError(f"time_weight must be > 0, got {self.time_weight}")


@dataclass(frozen=True)
class ModelNode:
    """One matched cluster group at one level of the hierarchy."""

    level: int
    mean_shift: np.ndarray
    support: int
    shape: PrincipalComponents


@dataclass(frozen=True)
class ScanPathModel:
    """The learned hierarchy: levels[i] holds the nodes of level i+1."""

    levels: tuple[tuple[ModelNode, ...], ...]
    dim: int
    build_config: BuildConfig

    @property
    def max_level(self) -> int:
        return len(self.levels)


@dataclass
class MemberCluster:
    """One recording's cluster inside a hierarchy group (build-time only)."""

    recording_id: str
    points: np.ndarray
    centroid: np.ndarray

    @property
    def count(self) -> int:
        return len(self.points)


@dataclass
class HierarchyGroup:
    """Build-time bookkeeping for one matched group; parents link upwards."""

    members: list[MemberCluster]
    mean: np.ndarray
    parent: "HierarchyGroup | None" = None
    node: ModelNode | None = None

    @property
    def total_count(self) -> int:
        return sum(m.count for m in self.members)


def _weighted_mean(members: Sequence[MemberCluster]) -> np.ndarray:
    total = sum(m.count for m in members)
    acc = np.zeros_like(members[0].centroid)
    for m in members:
        acc += m.centroid * m.count
    return acc / total


def _axis_weights(dim: int, time_weight: float) -> np.ndarray:
    w = np.ones(dim)
    if dim == 3:
        w[2] = time_weight
    return w


def build_hierarchy(dataset: Dataset, config: BuildConfig) -> tuple[list[list[HierarchyGroup]], int]:
    """Run the clustering/matching recursion and keep the full group tree.

    Returns (levels, dim) where levels[i] are the groups of level i+1. Used
    by `generate_model`; exposed so the partition and weighted-mean
    invariants of the hierarchy can be inspected directly.
    """
    if not dataset.recordings:
        raise ValueError("cannot build a model from an empty dataset")
    dim = dimensionality(dataset)
    weights = _axis_weights(dim, config.time_weight)

    root = HierarchyGroup(
        members=[
            MemberCluster(rec.recording_id, rec.to_array(), rec.to_array().mean(axis=0))
            for rec in dataset.recordings
        ],
        mean=np.zeros(dim),
    )
    # Level-1 shifts are absolute positions: the virtual root sits at the origin.
    parents = [root]

    levels: list[list[HierarchyGroup]] = []
    for level in range(1, config.max_level + 1):
        if config.dyn_cluster:
            k = apply_update_rule(config.rule, config.num_clusters, level)
        else:
            k = config.num_clusters

        next_groups: list[HierarchyGroup] = []
        for p_idx, parent in enumerate(parents):
            assignments: list[ClusterAssignment] = []
            member_points: list[np.ndarray] = []
            for m_idx, member in enumerate(parent.members):
                if member.count < 2:
                    continue
                seed = np.random.SeedSequence(
                    config.seed, spawn_key=(level, p_idx, m_idx)
                )
                asg = kmeans(
                    member.points * weights, k, seed=seed, recording_id=member.recording_id
                )
                assignments.append(asg)
                member_points.append(member.points)
            if not assignments:
                continue

            parent_mean_w = None if parent.parent is None and level == 1 else parent.mean * weights
            matched = combine_close_subclusters(
                assignments,
                parent_group_mean=parent_mean_w,
                merge_radius=config.merge_radius,
            )

            # Map each matched centroid back to its point subset via identity.
            subset_of = {}
            for asg, pts in zip(assignments, member_points):
                for j, cent in enumerate(asg.centers):
                    subset_of[id(cent)] = pts[asg.labels == j]
            for grp in matched:
                members = [
                    MemberCluster(rid, subset_of[id(cent)], subset_of[id(cent)].mean(axis=0))
                    for rid, cent in grp.members
                ]
                next_groups.append(
                    HierarchyGroup(members=members, mean=_weighted_mean(members), parent=parent)
                )

        if not next_groups:
            break
        levels.append(next_groups)
        parents = next_groups

    return levels, dim


def generate_model(dataset: Dataset, config: BuildConfig) -> ScanPathModel:
    """Learn a ScanPathModel from a dataset (deterministic per config.seed)."""
    group_levels, dim = build_hierarchy(dataset, config)

    node_levels: list[tuple[ModelNode, ...]] = []
    for level_idx, groups in enumerate(group_levels):
        level = level_idx + 1
        nodes = []
        for grp in groups:
            parent_mean = grp.parent.mean if grp.parent is not None else np.zeros(dim)
            shifts = np.array([m.centroid - parent_mean for m in grp.members])
            shape = fit_pca(shifts, config.variance_fraction)
            node = ModelNode(
                level=level,
                mean_shift=grp.mean - parent_mean,
                support=len(grp.members),
                shape=shape,
            )
            grp.node = node
            nodes.append(node)
        node_levels.append(tuple(nodes))

    return ScanPathModel(levels=tuple(node_levels), dim=dim, build_config=config)


def _node_to_doc(node: ModelNode) -> dict:
    return {
        "level": node.level,
        "mean_shift": node.mean_shift.tolist(),
        "support": node.support,
        "shape": {
            "mean_shift": node.shape.mean_shift.tolist(),
            "components": node.shape.components.tolist(),
            "variances": node.shape.variances.tolist(),
        },
    }


def _node_from_doc(doc: dict, dim: int) -> ModelNode:
    shape_doc = doc["shape"]
    components = np.array(shape_doc["components"], dtype=float).reshape(-1, dim)
    shape = PrincipalComponents(
        mean_shift=np.array(shape_doc["mean_shift"], dtype=float),
        components=components,
        variances=np.array(shape_doc["variances"], dtype=float),
    )
    return ModelNode(
        level=int(doc["level"]),
        mean_shift=np.array(doc["mean_shift"], dtype=float),
        support=int(doc["support"]),
        shape=shape,
    )


def save_model(model: ScanPathModel, path: str | Path) -> None:
    """Write the model as a versioned JSON document."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "dim": model.dim,
        "max_level": model.max_level,
        "build_config": dataclasses.asdict(model.build_config),
        "levels": [[_node_to_doc(n) for n in level] for level in model.levels],
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_model(path: str | Path) -> ScanPathModel:
    """Read a model written by `save_model`; rejects other versions."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not a valid model file: {exc}") from exc
    if not isinstance(doc, dict) or "version" not in doc:
        raise ParseError(f"{path}: missing model version field")
    if doc["version"] != MODEL_FORMAT_VERSION:
        raise VersionError(
            f"{path}: model file version {doc['version']!r} is not supported "
            f"(this build reads version {MODEL_FORMAT_VERSION!r})"
        )
    try:
        dim = int(doc["dim"])
        cfg_doc = dict(doc["build_config"])
        cfg_doc["rule"] = UpdateRule(**cfg_doc["rule"])
        config = BuildConfig(**cfg_doc)
        levels = tuple(
            tuple(_node_from_doc(n, dim) for n in level) for level in doc["levels"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed model document: {exc}") from exc
    return ScanPathModel(levels=levels, dim=dim, build_config=config)
