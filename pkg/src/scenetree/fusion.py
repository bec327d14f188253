"""Feature aggregation onto tree nodes and semantic segment merging.

Object features are the plain mean of their multi-view crop embeddings.
Segment features are observation-weighted: every (point, frame) hit on a
labeled pixel contributes that 2D segment's embedding, and the final
feature is sum/count over all hits (frame order, then point order, for a
fixed summation order). Embeddings are pooled raw; normalization happens
only inside cosine similarity.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .config import PipelineConfig
from .errors import MissingKeyError, ValidationError
from .model import (
    FeatureVector,
    PointCloud,
    SceneTree,
    SegmentMask,
    SegmentNode,
)
from .query import cosine
from .views import FrameVisibility, frame_visibility


def object_feature(crop_embeddings: Sequence[np.ndarray], dim: int) -> FeatureVector:
    """Mean of raw crop embeddings; no crops means an unobserved zero."""
    if not len(crop_embeddings):
        return FeatureVector.unobserved(dim)
    stacked = np.stack([np.asarray(e, dtype=np.float64) for e in crop_embeddings])
    if stacked.shape[1] != dim:
        raise ValidationError(f"crop embeddings have dim {stacked.shape[1]}, expected {dim}")
    return FeatureVector(stacked.mean(axis=0).astype(np.float32), observed=True)


def fuse_segment_features(
    tree: SceneTree,
    cloud: PointCloud,
    frames: Sequence,
    depths: Sequence[np.ndarray],
    label_maps: Sequence[np.ndarray],
    segment_embeddings: Mapping[str, np.ndarray],
    config: PipelineConfig,
    visibilities: Sequence[FrameVisibility] | None = None,
) -> dict[int, FeatureVector]:
    """Observation-weighted pooling of 2D-segment embeddings onto 3D segments.

    For every frame, each segment point that projects unoccluded onto a
    labeled pixel accumulates the embedding keyed "{frame_id}/{label}".
    Returns the feature per segment node id; segments with no observation
    get an unobserved zero vector.
    """
    if not (len(frames) == len(depths) == len(label_maps)):
        raise ValidationError("frames, depths, and label maps must align")
    dim = config.feature_dim
    sums = {node.node_id: np.zeros(dim) for node in tree.segments}
    counts = {node.node_id: 0 for node in tree.segments}

    for f, frame in enumerate(frames):
        labels = label_maps[f]
        if labels.shape != (frame.height, frame.width):
            raise ValidationError(
                f"label map shape {labels.shape} does not match frame {frame.frame_id}"
            )
        if visibilities is not None:
            vis = visibilities[f]
        else:
            vis = frame_visibility(cloud.positions, frame, depths[f], config.depth_tolerance)
        for node in tree.segments:
            idx = node.mask.point_indices
            seen = idx[vis.visible[idx]]
            if not len(seen):
                continue
            hit_labels = labels[vis.rows[seen], vis.cols[seen]]
            hit_labels = hit_labels[hit_labels >= 0]
            if not len(hit_labels):
                continue
            unique, tally = np.unique(hit_labels, return_counts=True)
            for label, n_hits in zip(unique, tally):
                key = f"{frame.frame_id}/{int(label)}"
                if key not in segment_embeddings:
                    raise MissingKeyError(
                        f"no embedding for 2D segment {key!r} referenced by "
                        f"segment node {node.node_id}"
                    )
                vec = np.asarray(segment_embeddings[key], dtype=np.float64)
                if len(vec) != dim:
                    raise ValidationError(f"embedding {key!r} has dim {len(vec)}, expected {dim}")
                sums[node.node_id] += n_hits * vec
                counts[node.node_id] += int(n_hits)

    features: dict[int, FeatureVector] = {}
    for node in tree.segments:
        c = counts[node.node_id]
        if c == 0:
            features[node.node_id] = FeatureVector.unobserved(dim)
        else:
            features[node.node_id] = FeatureVector(
                (sums[node.node_id] / c).astype(np.float32), observed=True
            )
    return features


def min_segment_distance(a: SegmentMask, b: SegmentMask, cloud: PointCloud) -> float:
    """Exact minimum point-to-point distance between two segments."""
    pa = cloud.positions[a.point_indices]
    pb = cloud.positions[b.point_indices]
    if len(pa) > len(pb):
        pa, pb = pb, pa
    tree = cKDTree(pb)
    dist, _ = tree.query(pa, k=1)
    return float(np.min(dist))


def _contributor_mean(tree: SceneTree, contributor_ids) -> FeatureVector:
    vectors = []
    observed = False
    for cid in contributor_ids:
        feat = tree.contributor_features[cid]
        vectors.append(feat.values.astype(np.float64))
        observed = observed or feat.observed
    mean = np.stack(vectors).mean(axis=0).astype(np.float32)
    if not observed and np.any(mean != 0):
        observed = True
    return FeatureVector(mean, observed=observed)


def semantic_merge(tree: SceneTree, cloud: PointCloud, config: PipelineConfig) -> SceneTree:
    """Iteratively merge similar nearby segments within each object.

    A candidate pair lies within thr_dist and has feature cosine at least
    thr_feat; the highest-cosine pair merges first (ties: smallest id
    pair). A merged segment unions the masks and contributor ids, and its
    feature is the unweighted mean of the original contributor features,
    which makes stored features independent of merge order. Objects are
    untouched; merged segments receive fresh node ids.
    """
    if not tree.contributor_features:
        # Tolerate trees whose pre-merge table was never filled: seed it so
        # each current segment is its own contributor group.
        for node in tree.segments:
            for cid in node.mask.contributor_ids:
                tree.contributor_features[cid] = node.feature

    next_id = tree.next_node_id
    merged_segments: list[SegmentNode] = []

    for obj in tree.objects:
        entries = [
            {
                "node_id": node.node_id,
                "indices": node.mask.point_indices,
                "contributors": set(node.mask.contributor_ids),
                "feature": node.feature,
            }
            for node in tree.segments_of(obj.node_id)
        ]
        m = len(entries)
        dist = np.full((m, m), np.inf)
        for i in range(m):
            for j in range(i + 1, m):
                d = min_segment_distance(
                    SegmentMask(entries[i]["indices"], parent_object=obj.node_id,
                                contributor_ids=(0,)),
                    SegmentMask(entries[j]["indices"], parent_object=obj.node_id,
                                contributor_ids=(0,)),
                    cloud,
                )
                dist[i, j] = dist[j, i] = d

        alive = list(range(m))
        while True:
            best = None
            for ii, i in enumerate(alive):
                for j in alive[ii + 1:]:
                    if dist[i, j] > config.thr_dist:
                        continue
                    sim = cosine(entries[i]["feature"], entries[j]["feature"])
                    if sim < config.thr_feat:
                        continue
                    id_pair = tuple(sorted((entries[i]["node_id"], entries[j]["node_id"])))
                    key = (-sim, id_pair)
                    if best is None or key < best[0]:
                        best = (key, i, j)
            if best is None:
                break
            _, i, j = best
            contributors = entries[i]["contributors"] | entries[j]["contributors"]
            union = np.union1d(entries[i]["indices"], entries[j]["indices"])
            entries.append(
                {
                    "node_id": next_id,
                    "indices": union,
                    "contributors": contributors,
                    "feature": _contributor_mean(tree, sorted(contributors)),
                }
            )
            next_id += 1
            new_pos = len(entries) - 1
            grown = np.minimum(dist[i], dist[j])
            dist = np.pad(dist, ((0, 1), (0, 1)), constant_values=np.inf)
            dist[new_pos, :-1] = grown
            dist[:-1, new_pos] = grown
            dist[new_pos, new_pos] = np.inf
            alive = [a for a in alive if a not in (i, j)] + [new_pos]

        for pos in sorted(alive, key=lambda a: entries[a]["node_id"]):
            entry = entries[pos]
            merged_segments.append(
                SegmentNode(
                    entry["node_id"],
                    SegmentMask(
                        entry["indices"],
                        parent_object=obj.node_id,
                        contributor_ids=tuple(sorted(entry["contributors"])),
                    ),
                    entry["feature"],
                )
            )

    return SceneTree(
        scene_id=tree.scene_id,
        n_points=tree.n_points,
        feature_dim=tree.feature_dim,
        objects=tree.objects,
        segments=merged_segments,
        contributor_features=tree.contributor_features,
        next_node_id=next_id,
    )
