"""Core domain types: point clouds, masks, features, and the scene tree.

A scene tree has one implicit root, one node per object instance, and one
leaf per part segment. Within each object the segment masks partition the
object mask exactly (pairwise disjoint, union equal). Trees are treated as
immutable once features are attached and may be shared freely across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError


def as_index_array(indices) -> np.ndarray:
    """Normalize a point-index collection to a sorted unique int64 array."""
    arr = np.asarray(indices, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("mask needs at least one point index")
    if arr.min() < 0:
        raise ValidationError("point indices must be nonnegative")
    arr = np.sort(arr)
    if arr.size > 1 and np.any(np.diff(arr) == 0):
        raise ValidationError("duplicate point index in mask")
    return arr


@dataclass
class PointCloud:
    """Scene geometry: positions in meters plus optional attributes."""

    positions: np.ndarray                 # (N, 3) float64
    normals: np.ndarray | None = None     # (N, 3) float64, unit length
    colors: np.ndarray | None = None      # (N, 3) float64 in [0, 1]
    faces: np.ndarray | None = None       # (F, 3) int64 vertex triples

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValidationError("positions must have shape (N, 3)")
        if not np.all(np.isfinite(self.positions)):
            raise ValidationError("positions must be finite")
        n = len(self.positions)
        if self.normals is not None:
            self.normals = np.asarray(self.normals, dtype=np.float64)
            if self.normals.shape != self.positions.shape:
                raise ValidationError("normals must have shape (N, 3)")
            norms = np.linalg.norm(self.normals, axis=1)
            if not np.all(np.abs(norms - 1.0) <= 1e-4):
                raise ValidationError("normals must be unit length within 1e-4")
        if self.colors is not None:
            self.colors = np.asarray(self.colors, dtype=np.float64)
            if self.colors.shape != self.positions.shape:
                raise ValidationError("colors must have shape (N, 3)")
            if self.colors.min() < 0.0 or self.colors.max() > 1.0:
                raise ValidationError("colors must lie in [0, 1]")
        if self.faces is not None:
            self.faces = np.asarray(self.faces, dtype=np.int64)
            if self.faces.ndim != 2 or self.faces.shape[1] != 3:
                raise ValidationError("faces must have shape (F, 3)")
            if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= n):
                raise ValidationError("face indices must reference existing vertices")

    @property
    def n(self) -> int:
        return len(self.positions)


@dataclass
class InstanceMask:
    """An object instance as a sorted set of point indices."""

    point_indices: np.ndarray
    confidence: float = 1.0

    def __post_init__(self) -> None:
        self.point_indices = as_index_array(self.point_indices)
        self.confidence = float(self.confidence)
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError("confidence must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.point_indices)


@dataclass
class SegmentMask:
    """A part segment: point indices plus provenance.

    contributor_ids name the original pre-merge segments folded into this
    mask; a freshly produced segment carries exactly one id.
    """

    point_indices: np.ndarray
    parent_object: int = -1
    contributor_ids: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        self.point_indices = as_index_array(self.point_indices)
        self.contributor_ids = tuple(sorted(int(c) for c in self.contributor_ids))
        if not self.contributor_ids:
            raise ValidationError("segment must carry at least one contributor id")
        if len(set(self.contributor_ids)) != len(self.contributor_ids):
            raise ValidationError("duplicate contributor id")

    def __len__(self) -> int:
        return len(self.point_indices)


@dataclass
class FeatureVector:
    """A D-dimensional embedding; observed=False means no data contributed."""

    values: np.ndarray
    observed: bool = True

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float32).reshape(-1)
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("feature values must be finite")
        if not self.observed and np.any(self.values != 0.0):
            raise ValidationError("unobserved feature vectors must be exactly zero")

    @staticmethod
    def unobserved(dim: int) -> "FeatureVector":
        return FeatureVector(np.zeros(dim, dtype=np.float32), observed=False)

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass
class ObjectNode:
    node_id: int
    mask: InstanceMask
    feature: FeatureVector


@dataclass
class SegmentNode:
    node_id: int
    mask: SegmentMask
    feature: FeatureVector


@dataclass
class Violation:
    """One failed tree invariant, naming the node and the rule."""

    node_id: int | None
    rule: str
    detail: str


@dataclass
class SceneTree:
    """Scene root with object children and part-segment leaves."""

    scene_id: str
    n_points: int
    feature_dim: int
    objects: list[ObjectNode] = field(default_factory=list)
    segments: list[SegmentNode] = field(default_factory=list)
    # Features of the original pre-merge segments, keyed by contributor id.
    contributor_features: dict[int, FeatureVector] = field(default_factory=dict)
    next_node_id: int = 0

    def get_object(self, node_id: int) -> ObjectNode:
        for node in self.objects:
            if node.node_id == node_id:
                return node
        raise KeyError(f"no object node {node_id}")

    def get_segment(self, node_id: int) -> SegmentNode:
        for node in self.segments:
            if node.node_id == node_id:
                return node
        raise KeyError(f"no segment node {node_id}")

    def segments_of(self, object_id: int) -> list[SegmentNode]:
        return [s for s in self.segments if s.mask.parent_object == object_id]


def resolve_overlaps(masks: Sequence[InstanceMask], n_points: int) -> list[InstanceMask]:
    """Make object masks disjoint.

    Each contested point goes to the overlapping mask with the highest
    confidence; ties go to the earlier mask (the lower eventual node id).
    Masks left empty are dropped.
    """
    owner = np.full(n_points, -1, dtype=np.int64)
    best = np.full(n_points, -np.inf)
    for i, mask in enumerate(masks):
        idx = mask.point_indices
        if idx.size and idx[-1] >= n_points:
            raise ValidationError(f"object mask {i} references point beyond cloud size {n_points}")
        take = mask.confidence > best[idx]
        claimed = idx[take]
        owner[claimed] = i
        best[claimed] = mask.confidence
    resolved: list[InstanceMask] = []
    for i, mask in enumerate(masks):
        kept = mask.point_indices[owner[mask.point_indices] == i]
        if kept.size:
            resolved.append(InstanceMask(kept, confidence=mask.confidence))
    return resolved


def build_tree(
    object_masks: Sequence[InstanceMask],
    segments_per_object: Sequence[Sequence[SegmentMask]],
    *,
    n_points: int,
    scene_id: str = "scene",
    feature_dim: int = 1152,
) -> SceneTree:
    """Assemble a validated tree from disjoint object masks and their segments.

    Node ids are dense: objects take 0..M-1 in input order, segments follow
    in (object order, segment order). Features start as unobserved zeros.
    """
    if len(object_masks) != len(segments_per_object):
        raise ValidationError("need one segment list per object mask")

    seen: set[int] = set()
    for i, mask in enumerate(object_masks):
        idx = mask.point_indices
        if idx[-1] >= n_points:
            raise ValidationError(f"object {i} references point beyond cloud size {n_points}")
        overlap = seen.intersection(idx.tolist())
        if overlap:
            raise ValidationError(
                f"object masks overlap at point {min(overlap)}; resolve overlaps first"
            )
        seen.update(idx.tolist())

    objects: list[ObjectNode] = []
    segments: list[SegmentNode] = []
    contributors: set[int] = set()
    next_id = 0
    for obj_pos, mask in enumerate(object_masks):
        objects.append(ObjectNode(next_id, mask, FeatureVector.unobserved(feature_dim)))
        next_id += 1

    for obj_pos, seg_list in enumerate(segments_per_object):
        obj = objects[obj_pos]
        obj_set = obj.mask.point_indices
        covered = 0
        claimed = np.zeros(len(obj_set), dtype=bool)
        for seg in seg_list:
            inside = np.isin(seg.point_indices, obj_set, assume_unique=True)
            if not inside.all():
                stray = int(seg.point_indices[~inside][0])
                raise ValidationError(
                    f"segment of object {obj.node_id} contains point {stray} outside the object mask"
                )
            pos = np.searchsorted(obj_set, seg.point_indices)
            if claimed[pos].any():
                raise ValidationError(f"segments of object {obj.node_id} overlap")
            claimed[pos] = True
            covered += len(seg.point_indices)
            for cid in seg.contributor_ids:
                if cid in contributors:
                    raise ValidationError(f"contributor id {cid} used by two segments")
                contributors.add(cid)
            placed = SegmentMask(
                seg.point_indices,
                parent_object=obj.node_id,
                contributor_ids=seg.contributor_ids,
            )
            segments.append(SegmentNode(next_id, placed, FeatureVector.unobserved(feature_dim)))
            next_id += 1
        if covered != len(obj_set):
            raise ValidationError(
                f"segments of object {obj.node_id} cover {covered} of {len(obj_set)} points"
            )

    return SceneTree(
        scene_id=scene_id,
        n_points=n_points,
        feature_dim=feature_dim,
        objects=objects,
        segments=segments,
        next_node_id=next_id,
    )


def validate_tree(tree: SceneTree) -> list[Violation]:
    """Check every structural invariant; empty result means a valid tree."""
    violations: list[Violation] = []

    ids = [n.node_id for n in tree.objects] + [n.node_id for n in tree.segments]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        violations.append(Violation(dupes[0], "duplicate-node-id", f"node ids reused: {dupes}"))

    object_ids = {n.node_id for n in tree.objects}
    claimed = np.full(tree.n_points, -1, dtype=np.int64)
    for node in tree.objects:
        idx = node.mask.point_indices
        if idx[-1] >= tree.n_points:
            violations.append(
                Violation(node.node_id, "index-range", f"mask exceeds cloud size {tree.n_points}")
            )
            continue
        overlap = claimed[idx] >= 0
        if overlap.any():
            other = int(claimed[idx][overlap][0])
            violations.append(
                Violation(node.node_id, "object-overlap", f"shares points with object {other}")
            )
        claimed[idx] = node.node_id

    for node in tree.objects + tree.segments:
        if node.feature.dim != tree.feature_dim:
            violations.append(
                Violation(
                    node.node_id,
                    "feature-dim",
                    f"feature has dim {node.feature.dim}, tree expects {tree.feature_dim}",
                )
            )

    for obj in tree.objects:
        obj_set = obj.mask.point_indices
        segs = tree.segments_of(obj.node_id)
        taken = np.zeros(len(obj_set), dtype=bool)
        covered = 0
        for seg in segs:
            inside = np.isin(seg.mask.point_indices, obj_set, assume_unique=True)
            if not inside.all():
                violations.append(
                    Violation(seg.node_id, "parent-containment", "segment leaves its object mask")
                )
                continue
            pos = np.searchsorted(obj_set, seg.mask.point_indices)
            if taken[pos].any():
                violations.append(
                    Violation(seg.node_id, "segment-overlap", "overlaps a sibling segment")
                )
            taken[pos] = True
            covered += len(seg.mask.point_indices)
        if covered != len(obj_set) or not taken.all():
            violations.append(
                Violation(
                    obj.node_id,
                    "coverage",
                    f"segments cover {int(taken.sum())} of {len(obj_set)} object points",
                )
            )

    for seg in tree.segments:
        if seg.mask.parent_object not in object_ids:
            violations.append(
                Violation(seg.node_id, "orphan-segment", f"parent {seg.mask.parent_object} missing")
            )

    return violations
