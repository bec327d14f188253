"""End-to-end tree construction: the glue between the stage modules.

A scene bundle directory holds the interchange artifacts (cloud.ply,
frames.jsonl, depth/, labels/, objects.json, optional gt_hierarchy.json and
seg2d_embeddings.emb). Building a featured tree runs: overlap resolution →
per-object geometric segmentation → tree assembly → top-K view selection
and multi-scale crops → object features → pixel-aligned segment fusion →
semantic merging. Everything is deterministic for fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import geoseg, synthkit
from .config import PipelineConfig
from .embed import SyntheticConceptEmbedder
from .errors import FormatError, ValidationError
from .fusion import fuse_segment_features, object_feature, semantic_merge
from .io.archive import EmbeddingArchive, read_embedding_archive
from .io.crops import CropRecord
from .io.frames import FrameManifestEntry, load_frames
from .io.masks import GtObject, load_object_masks, load_part_hierarchy
from .io.pgm import read_depth, read_label_map
from .io.ply import load_point_cloud
from .metrics import ApReport, GtInstance, ap_suite
from .model import (
    InstanceMask,
    PointCloud,
    SceneTree,
    SegmentMask,
    build_tree,
    resolve_overlaps,
    validate_tree,
)
from .query import TreeIndex, instances_from_result, score_nodes
from .views import crop_boxes, crop_key, frame_visibility, select_topk_views

CropEmbedder = Callable[[int, str, int], np.ndarray]


@dataclass
class SceneBundle:
    scene_dir: Path
    scene_id: str
    cloud: PointCloud
    frames: list[FrameManifestEntry]
    depths: list[np.ndarray]
    label_maps: list[np.ndarray] | None = None
    object_masks: list[InstanceMask] | None = None
    gt_objects: list[GtObject] | None = None
    seg2d_archive: EmbeddingArchive | None = None
    meta: dict = field(default_factory=dict)


def load_bundle(scene_dir: str | Path, *, masks_path: str | Path | None = None) -> SceneBundle:
    """Load a scene directory; optional artifacts load when present."""
    scene_dir = Path(scene_dir)
    cloud_path = scene_dir / "cloud.ply"
    frames_path = scene_dir / "frames.jsonl"
    for required in (cloud_path, frames_path):
        if not required.exists():
            raise FormatError(f"scene bundle is missing {required}")
    cloud = load_point_cloud(cloud_path)
    frames = load_frames(frames_path)
    depths = [read_depth(scene_dir / f.depth_path, f.depth_scale) for f in frames]

    label_maps = None
    if (scene_dir / "labels").is_dir():
        label_maps = []
        for f in frames:
            label_path = scene_dir / "labels" / f"{f.frame_id}.pgm"
            if not label_path.exists():
                raise FormatError(f"missing label map {label_path}")
            label_maps.append(read_label_map(label_path))

    masks_file = Path(masks_path) if masks_path else scene_dir / "objects.json"
    object_masks = load_object_masks(masks_file) if masks_file.exists() else None
    gt_path = scene_dir / "gt_hierarchy.json"
    gt_objects = load_part_hierarchy(gt_path) if gt_path.exists() else None
    seg2d_path = scene_dir / "seg2d_embeddings.emb"
    seg2d = read_embedding_archive(seg2d_path) if seg2d_path.exists() else None

    meta = {}
    meta_path = scene_dir / "meta.json"
    if meta_path.exists():
        import json

        meta = json.loads(meta_path.read_text())

    return SceneBundle(
        scene_dir=scene_dir,
        scene_id=meta.get("scene_id", scene_dir.name),
        cloud=cloud,
        frames=frames,
        depths=depths,
        label_maps=label_maps,
        object_masks=object_masks,
        gt_objects=gt_objects,
        seg2d_archive=seg2d,
        meta=meta,
    )


def ensure_normals(bundle: SceneBundle) -> None:
    """Estimate normals when the cloud ships without them."""
    if bundle.cloud.normals is not None:
        return
    centers = np.stack([f.translation for f in bundle.frames]) if bundle.frames else None
    orient = centers.mean(axis=0) if centers is not None else None
    bundle.cloud = geoseg.estimate_normals(bundle.cloud, orient_toward=orient)


def predict_segments(
    cloud: PointCloud, object_masks: Sequence[InstanceMask], config: PipelineConfig
) -> tuple[list[InstanceMask], list[list[SegmentMask]]]:
    """Overlap-resolved masks and their geometric segments, ids running."""
    resolved = resolve_overlaps(object_masks, cloud.n)
    segments_per_object: list[list[SegmentMask]] = []
    next_contributor = 0
    for mask in resolved:
        segments = geoseg.segment_object(cloud, mask, config, contributor_start=next_contributor)
        next_contributor += len(segments)
        segments_per_object.append(segments)
    return resolved, segments_per_object


def archive_crop_embedder(provider) -> CropEmbedder:
    """Crop embeddings looked up by their manifest key."""

    def embed(node_id: int, frame_id: str, level: int) -> np.ndarray:
        return provider.embed_crop(crop_key(node_id, frame_id, level))

    return embed


def synthetic_crop_embedder(
    embedder: SyntheticConceptEmbedder,
    gt_objects: Sequence[GtObject],
    sigma: float = 0.0,
    noise_seed: int = 0,
) -> CropEmbedder:
    """Crop embeddings for synthetic runs.

    An object's crop shows the whole object, so its clean embedding is the
    composite of the object concept and its part concepts; optional
    Gaussian noise varies per crop key. Object node ids are assumed to
    follow ground-truth object order, which holds for generated bundles.
    """
    keys = []
    for gt in gt_objects:
        concepts = [gt.concept]
        for part in gt.parts:
            if part.concept not in concepts:
                concepts.append(part.concept)
        keys.append("concept:" + "+".join(concepts))

    def embed(node_id: int, frame_id: str, level: int) -> np.ndarray:
        if node_id >= len(keys):
            raise ValidationError(f"object node {node_id} has no ground-truth concepts")
        clean = embedder.embed_crop(keys[node_id])
        if sigma == 0.0:
            return clean
        return synthkit.perturb_embedding(
            clean, "crop/" + crop_key(node_id, frame_id, level), sigma, noise_seed
        )

    return embed


def attach_object_features(
    tree: SceneTree,
    bundle: SceneBundle,
    config: PipelineConfig,
    crop_embedder: CropEmbedder,
) -> list[CropRecord]:
    """Select top-K views per object, cut crops, and pool their embeddings."""
    records: list[CropRecord] = []
    for node in tree.objects:
        frame_ids = select_topk_views(
            node.mask,
            bundle.cloud,
            bundle.frames,
            bundle.depths,
            config.top_k_views,
            config.frame_stride,
            config.depth_tolerance,
        )
        by_id = {f.frame_id: i for i, f in enumerate(bundle.frames)}
        vectors = []
        for frame_id in frame_ids:
            frame = bundle.frames[by_id[frame_id]]
            vis = frame_visibility(
                bundle.cloud.positions[node.mask.point_indices],
                frame,
                bundle.depths[by_id[frame_id]],
                config.depth_tolerance,
            )
            boxes = crop_boxes(
                vis.uv[vis.visible],
                frame_id,
                config.crop_levels,
                config.k_exp_object,
                frame.width,
                frame.height,
            )
            for box in boxes:
                records.append(
                    CropRecord(key=crop_key(node.node_id, frame_id, box.level),
                               node_id=node.node_id, box=box)
                )
                vectors.append(crop_embedder(node.node_id, frame_id, box.level))
        node.feature = object_feature(vectors, config.feature_dim)
    return records


def attach_segment_features(
    tree: SceneTree,
    bundle: SceneBundle,
    config: PipelineConfig,
    seg2d_records: Mapping[str, np.ndarray] | None = None,
) -> None:
    """Fuse pixel-aligned 2D-segment embeddings onto the tree's segments."""
    if seg2d_records is None:
        if bundle.seg2d_archive is None:
            raise FormatError("bundle has no seg2d_embeddings.emb and no records were given")
        seg2d_records = bundle.seg2d_archive.records
    if bundle.label_maps is None:
        raise FormatError("bundle has no 2D-segment label maps")
    visibilities = [
        frame_visibility(bundle.cloud.positions, frame, depth, config.depth_tolerance)
        for frame, depth in zip(bundle.frames, bundle.depths)
    ]
    features = fuse_segment_features(
        tree,
        bundle.cloud,
        bundle.frames,
        bundle.depths,
        bundle.label_maps,
        seg2d_records,
        config,
        visibilities=visibilities,
    )
    for node in tree.segments:
        node.feature = features[node.node_id]
        for cid in node.mask.contributor_ids:
            tree.contributor_features[cid] = node.feature


def tree_from_hierarchy(
    bundle: SceneBundle, gt_objects: Sequence[GtObject], config: PipelineConfig
) -> SceneTree:
    """A tree whose objects and segments are the annotated ground truth."""
    masks = [InstanceMask(o.point_indices, confidence=1.0) for o in gt_objects]
    segments = []
    contributor = 0
    for gt in gt_objects:
        segs = []
        for part in gt.parts:
            segs.append(SegmentMask(part.point_indices, contributor_ids=(contributor,)))
            contributor += 1
        segments.append(segs)
    return build_tree(
        masks,
        segments,
        n_points=bundle.cloud.n,
        scene_id=bundle.scene_id,
        feature_dim=config.feature_dim,
    )


def build_featured_tree(
    bundle: SceneBundle,
    config: PipelineConfig,
    crop_embedder: CropEmbedder,
    seg2d_records: Mapping[str, np.ndarray] | None = None,
    *,
    object_masks: Sequence[InstanceMask] | None = None,
    segments_override: list[list[SegmentMask]] | None = None,
    merge: bool = True,
) -> tuple[SceneTree, list[CropRecord]]:
    """The full pipeline from raw masks to a featured, merged tree."""
    masks = list(object_masks) if object_masks is not None else bundle.object_masks
    if masks is None:
        raise FormatError(f"no object masks found for scene {bundle.scene_id}")
    ensure_normals(bundle)
    if segments_override is not None:
        resolved, segments = resolve_overlaps(masks, bundle.cloud.n), segments_override
    else:
        resolved, segments = predict_segments(bundle.cloud, masks, config)
    tree = build_tree(
        resolved,
        segments,
        n_points=bundle.cloud.n,
        scene_id=bundle.scene_id,
        feature_dim=config.feature_dim,
    )
    violations = validate_tree(tree)
    if violations:
        raise ValidationError(f"tree invariants violated: {violations[:3]}")
    records = attach_object_features(tree, bundle, config, crop_embedder)
    attach_segment_features(tree, bundle, config, seg2d_records)
    if merge:
        tree = semantic_merge(tree, bundle.cloud, config)
    return tree, records


def gt_instances(gt_objects: Sequence[GtObject], level: str) -> list[GtInstance]:
    if level == "object":
        return [GtInstance(o.concept, o.point_indices) for o in gt_objects]
    return [GtInstance(p.concept, p.point_indices) for o in gt_objects for p in o.parts]


def evaluate_queries(
    tree: SceneTree,
    gt_objects: Sequence[GtObject],
    provider,
    queries: Sequence[str] | None,
    config: PipelineConfig,
    mode: str | None = None,
) -> tuple[ApReport, list]:
    """Query every concept and score the ranked nodes as instances."""
    mode = mode or config.score_mode
    level = "object" if mode == "object_only" else "segment"
    gts = gt_instances(gt_objects, level)
    if queries is None:
        seen = []
        for gt in gts:
            if gt.category not in seen:
                seen.append(gt.category)
        queries = seen
    index = TreeIndex(tree)
    preds = []
    for text in queries:
        result = score_nodes(provider.embed_text(text), index, mode)
        preds.extend(instances_from_result(result, tree, text))
    return ap_suite(preds, gts), preds
