"""Fully-labeled synthetic scenes with analytic depth and label renders.

Scenes are unions of axis-aligned boxes ("parts") grouped into objects,
each part tagged with a concept string. Points are sampled on box faces by
stratified jittered grids with outward normals, so ground truth is exact at
every pipeline stage: depth images come from exact ray/box intersection,
2D-segment label maps share the same intersection routine (a pixel is
labeled iff it has depth), and 2D-segment embeddings are the concept
vectors of the rendered part — a perfect-encoder assumption, with optional
Gaussian noise as a robustness knob.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embed import SyntheticConceptEmbedder, fnv1a64, gaussian_stream
from .errors import FormatError, ValidationError
from .io.archive import EmbeddingArchive, write_embedding_archive
from .io.frames import FrameManifestEntry, save_frames
from .io.masks import (
    GtObject,
    GtPart,
    save_instances,
    save_object_masks,
    save_part_hierarchy,
)
from .io.pgm import write_depth, write_label_map
from .io.ply import save_point_cloud
from .metrics import GtInstance
from .model import InstanceMask, PointCloud, SceneTree, SegmentMask, build_tree

_EPS = 1e-9
DEFAULT_DEPTH_SCALE = 0.001  # millimeter quantization


@dataclass
class SynthObject:
    object_id: int
    concept: str


@dataclass
class SynthPart:
    object_id: int
    part_id: int
    concept: str
    box_min: np.ndarray
    box_max: np.ndarray
    density: int  # sample grid resolution per face edge

    def __post_init__(self) -> None:
        self.box_min = np.asarray(self.box_min, dtype=np.float64)
        self.box_max = np.asarray(self.box_max, dtype=np.float64)
        if not np.all(self.box_max > self.box_min):
            raise ValidationError(f"part {self.part_id}: degenerate box")
        if not self.concept:
            raise ValidationError(f"part {self.part_id}: empty concept")
        if self.density < 1:
            raise ValidationError(f"part {self.part_id}: density must be >= 1")


@dataclass
class SynthScene:
    scene_id: str
    objects: list[SynthObject]
    parts: list[SynthPart]
    cameras: list[FrameManifestEntry]

    def __post_init__(self) -> None:
        object_ids = [o.object_id for o in self.objects]
        if len(set(object_ids)) != len(object_ids):
            raise ValidationError("duplicate object id")
        part_ids = [p.part_id for p in self.parts]
        if len(set(part_ids)) != len(part_ids):
            raise ValidationError("duplicate part id")
        known = set(object_ids)
        for part in self.parts:
            if part.object_id not in known:
                raise ValidationError(f"part {part.part_id} references unknown object")
        # Overlapping boxes within one object would make part ground truth
        # ambiguous; reject them outright.
        for i, a in enumerate(self.parts):
            for b in self.parts[i + 1:]:
                if a.object_id != b.object_id:
                    continue
                if np.all(np.maximum(a.box_min, b.box_min) < np.minimum(a.box_max, b.box_max)):
                    raise ValidationError(
                        f"parts {a.part_id} and {b.part_id} of object {a.object_id} overlap"
                    )

    def part_concept(self, part_id: int) -> str:
        for part in self.parts:
            if part.part_id == part_id:
                return part.concept
        raise KeyError(f"no part {part_id}")

    def object_concept(self, object_id: int) -> str:
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj.concept
        raise KeyError(f"no object {object_id}")


@dataclass
class SynthSample:
    """One generated scene: geometry plus exact ground truth."""

    scene: SynthScene
    cloud: PointCloud
    tree: SceneTree
    point_part_ids: np.ndarray   # (N,) part id per point
    point_object_ids: np.ndarray


# -- cameras -----------------------------------------------------------------

def look_at(eye, target, up=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Camera-to-world pose looking from eye to target (x right, y down, z forward)."""
    eye = np.asarray(eye, dtype=np.float64)
    forward = np.asarray(target, dtype=np.float64) - eye
    norm = np.linalg.norm(forward)
    if norm < _EPS:
        raise ValidationError("look_at: eye and target coincide")
    forward /= norm
    up = np.asarray(up, dtype=np.float64)
    if np.linalg.norm(np.cross(forward, up)) < 1e-8:
        up = np.array([0.0, 1.0, 0.0])
    right = np.cross(forward, up)
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    pose = np.eye(4)
    pose[:3, 0] = right
    pose[:3, 1] = down
    pose[:3, 2] = forward
    pose[:3, 3] = eye
    return pose


def orbit_cameras(
    count: int,
    target,
    radius: float,
    height: float,
    *,
    fx: float = 140.0,
    fy: float = 140.0,
    width: int = 160,
    height_px: int = 120,
    depth_scale: float = DEFAULT_DEPTH_SCALE,
) -> list[FrameManifestEntry]:
    """Evenly spaced cameras on a circle, all looking at the target."""
    target = np.asarray(target, dtype=np.float64)
    entries = []
    for i in range(count):
        angle = 2.0 * math.pi * i / count
        eye = np.array(
            [target[0] + radius * math.cos(angle), target[1] + radius * math.sin(angle), height]
        )
        frame_id = f"frame_{i:04d}"
        entries.append(
            FrameManifestEntry(
                frame_id=frame_id,
                fx=fx, fy=fy, cx=width / 2.0, cy=height_px / 2.0,
                width=width, height=height_px,
                camera_to_world=look_at(eye, target),
                depth_path=f"depth/{frame_id}.pgm",
                depth_scale=depth_scale,
            )
        )
    return entries


# -- sampling ----------------------------------------------------------------

_FACES = [(axis, side) for axis in range(3) for side in (0, 1)]


def _part_color(part_id: int) -> np.ndarray:
    hue = (part_id * 0.6180339887498949) % 1.0
    i = int(hue * 6.0)
    f = hue * 6.0 - i
    v, s = 0.9, 0.65
    p, q, t = v * (1 - s), v * (1 - s * f), v * (1 - s * (1 - f))
    rgb = [(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)][i % 6]
    return np.array(rgb)


def _sample_part(rng: np.random.Generator, part: SynthPart) -> tuple[np.ndarray, np.ndarray]:
    """Stratified jittered samples on all six faces, with outward normals."""
    n = part.density
    size = part.box_max - part.box_min
    grid = np.arange(n, dtype=np.float64)
    points, normals = [], []
    for axis, side in _FACES:
        axes = [a for a in range(3) if a != axis]
        u = (grid[:, None] + rng.random((n, n))) / n
        v = (grid[None, :] + rng.random((n, n))) / n
        face = np.empty((n * n, 3))
        face[:, axes[0]] = part.box_min[axes[0]] + u.ravel() * size[axes[0]]
        face[:, axes[1]] = part.box_min[axes[1]] + v.ravel() * size[axes[1]]
        face[:, axis] = part.box_max[axis] if side else part.box_min[axis]
        normal = np.zeros((n * n, 3))
        normal[:, axis] = 1.0 if side else -1.0
        points.append(face)
        normals.append(normal)
    return np.concatenate(points), np.concatenate(normals)


def _visible_surface(points: np.ndarray, part: SynthPart, others) -> np.ndarray:
    """Keep points not buried in another solid.

    A sample lying on or inside any other part's closed box sits on a
    hidden contact interface a real scan could never observe; dropping it
    also keeps touching boxes cleanly separable in the adjacency graph.
    """
    keep = np.ones(len(points), dtype=bool)
    for other in others:
        if other.part_id == part.part_id:
            continue
        inside = np.all(points >= other.box_min - 1e-9, axis=1) & np.all(
            points <= other.box_max + 1e-9, axis=1
        )
        keep &= ~inside
    return keep


def generate_scene(scene: SynthScene, seed: int, feature_dim: int = 1152) -> SynthSample:
    """Sample the scene surface and assemble exact ground truth."""
    rng = np.random.default_rng(seed)
    points, normals, colors = [], [], []
    part_ids, object_ids = [], []
    part_ranges: dict[int, tuple[int, int]] = {}
    cursor = 0
    for part in scene.parts:
        p, nrm = _sample_part(rng, part)
        keep = _visible_surface(p, part, scene.parts)
        p, nrm = p[keep], nrm[keep]
        if not len(p):
            raise ValidationError(f"part {part.part_id} is entirely hidden by other parts")
        points.append(p)
        normals.append(nrm)
        colors.append(np.tile(_part_color(part.part_id), (len(p), 1)))
        part_ids.append(np.full(len(p), part.part_id, dtype=np.int32))
        object_ids.append(np.full(len(p), part.object_id, dtype=np.int32))
        part_ranges[part.part_id] = (cursor, cursor + len(p))
        cursor += len(p)

    cloud = PointCloud(
        positions=np.concatenate(points),
        normals=np.concatenate(normals),
        colors=np.concatenate(colors),
    )
    object_masks, segments_per_object = [], []
    for obj in scene.objects:
        obj_parts = [
            (pos, p) for pos, p in enumerate(scene.parts) if p.object_id == obj.object_id
        ]
        indices = np.concatenate(
            [np.arange(*part_ranges[p.part_id]) for _, p in obj_parts]
        )
        object_masks.append(InstanceMask(indices, confidence=1.0))
        segments = []
        for global_pos, p in obj_parts:
            lo, hi = part_ranges[p.part_id]
            segments.append(
                SegmentMask(np.arange(lo, hi), contributor_ids=(global_pos,))
            )
        segments_per_object.append(segments)

    tree = build_tree(
        object_masks,
        segments_per_object,
        n_points=cloud.n,
        scene_id=scene.scene_id,
        feature_dim=feature_dim,
    )
    return SynthSample(
        scene=scene,
        cloud=cloud,
        tree=tree,
        point_part_ids=np.concatenate(part_ids),
        point_object_ids=np.concatenate(object_ids),
    )


# -- rendering ----------------------------------------------------------------

def raycast(scene: SynthScene, frame: FrameManifestEntry) -> tuple[np.ndarray, np.ndarray]:
    """Exact per-pixel nearest box intersection.

    Returns (depth, labels): depth along the camera z-axis in meters
    (0 = no hit) and the part id of the nearest box (-1 = no hit). Ray
    directions are z-normalized so the ray parameter equals z-depth.
    """
    h, w = frame.height, frame.width
    rows, cols = np.mgrid[0:h, 0:w].astype(np.float64)
    dirs_cam = np.stack(
        [(cols - frame.cx) / frame.fx, (rows - frame.cy) / frame.fy, np.ones((h, w))], axis=-1
    )
    dirs = dirs_cam @ frame.rotation.T
    origin = frame.translation

    best_t = np.full((h, w), np.inf)
    labels = np.full((h, w), -1, dtype=np.int32)
    for part in scene.parts:
        with np.errstate(divide="ignore", invalid="ignore"):
            t_a = (part.box_min - origin) / dirs
            t_b = (part.box_max - origin) / dirs
        lo = np.minimum(t_a, t_b)
        hi = np.maximum(t_a, t_b)
        # A parallel ray starting on the slab boundary divides 0/0; treat as
        # inside the slab.
        lo = np.where(np.isnan(lo), -np.inf, lo)
        hi = np.where(np.isnan(hi), np.inf, hi)
        t_near = lo.max(axis=-1)
        t_far = hi.min(axis=-1)
        t_hit = np.where(t_near > _EPS, t_near, t_far)
        hit = (t_near <= t_far) & (t_far > _EPS) & np.isfinite(t_hit)
        closer = hit & (t_hit < best_t)
        best_t[closer] = t_hit[closer]
        labels[closer] = part.part_id

    depth = np.where(np.isfinite(best_t), best_t, 0.0).astype(np.float32)
    return depth, labels


def render_depth(scene: SynthScene, frame: FrameManifestEntry) -> np.ndarray:
    return raycast(scene, frame)[0]


def render_label_map(scene: SynthScene, frame: FrameManifestEntry) -> np.ndarray:
    return raycast(scene, frame)[1]


# -- noise knobs ---------------------------------------------------------------

def perturb_embedding(values: np.ndarray, key: str, sigma: float, seed: int) -> np.ndarray:
    """Add per-key deterministic Gaussian noise to a raw embedding."""
    noise = gaussian_stream(fnv1a64(b"noise:" + key.encode("utf-8"), seed), len(values))
    return (np.asarray(values, dtype=np.float64) + sigma * noise).astype(np.float32)


def synthetic_seg2d_embeddings(
    concept_by_part: dict[int, str],
    label_maps,
    frame_ids,
    embedder: SyntheticConceptEmbedder,
    sigma: float = 0.0,
    noise_seed: int = 0,
) -> dict[str, np.ndarray]:
    """Per-(frame, 2D segment) embeddings under the perfect-encoder assumption."""
    records: dict[str, np.ndarray] = {}
    for frame_id, labels in zip(frame_ids, label_maps):
        for label in np.unique(labels):
            if label < 0:
                continue
            key = f"{frame_id}/{int(label)}"
            vec = embedder.concept_vector(concept_by_part[int(label)])
            if sigma > 0.0:
                vec = perturb_embedding(vec, "seg2d/" + key, sigma, noise_seed)
            records[key] = vec
    return records


def part_concepts(gt_objects) -> dict[int, str]:
    """part_id → concept map from a loaded GT hierarchy."""
    return {part.part_id: part.concept for gt in gt_objects for part in gt.parts}


def inject_segmentation_noise(
    segments_per_object: list[list[SegmentMask]],
    seed: int,
    fraction: float,
) -> list[list[SegmentMask]]:
    """Corrupt predicted segments by moving points between siblings.

    Keeps each object's partition intact (masks stay disjoint and covering)
    while degrading segment purity, imitating a weak geometric
    segmentation.
    """
    rng = np.random.default_rng(seed)
    corrupted: list[list[SegmentMask]] = []
    for segments in segments_per_object:
        if len(segments) < 2:
            corrupted.append(list(segments))
            continue
        pools = [list(s.point_indices) for s in segments]
        for i, seg in enumerate(segments):
            movable = min(int(fraction * len(seg)), len(seg) - 1)
            if movable <= 0:
                continue
            chosen = rng.choice(len(seg), size=movable, replace=False)
            for idx in sorted(seg.point_indices[chosen].tolist()):
                target = int(rng.integers(len(segments) - 1))
                if target >= i:
                    target += 1
                pools[i].remove(idx)
                pools[target].append(idx)
        corrupted.append(
            [
                SegmentMask(np.array(sorted(pool)), parent_object=seg.parent_object,
                            contributor_ids=seg.contributor_ids)
                for pool, seg in zip(pools, segments)
            ]
        )
    return corrupted


# -- bundles -------------------------------------------------------------------

def write_bundle(sample: SynthSample, out_dir: str | Path, seed: int) -> None:
    """Emit a scene as the standard interchange artifacts.

    Layout: cloud.ply, frames.jsonl, depth/{frame}.pgm, labels/{frame}.pgm,
    objects.json (predicted-mask stand-in), gt_hierarchy.json,
    gt_instances_objects.json, gt_instances_parts.json,
    seg2d_embeddings.emb (clean concept vectors), concepts.txt, meta.json.
    """
    scene = sample.scene
    out = Path(out_dir)
    (out / "depth").mkdir(parents=True, exist_ok=True)
    (out / "labels").mkdir(parents=True, exist_ok=True)

    save_point_cloud(sample.cloud, out / "cloud.ply")
    save_frames(scene.cameras, out / "frames.jsonl")

    label_maps = []
    for frame in scene.cameras:
        depth, labels = raycast(scene, frame)
        write_depth(depth, frame.depth_scale, out / frame.depth_path)
        write_label_map(labels, out / "labels" / f"{frame.frame_id}.pgm")
        label_maps.append(labels)

    save_object_masks([node.mask for node in sample.tree.objects], out / "objects.json")

    gt_objects = []
    for obj_node, obj in zip(sample.tree.objects, scene.objects):
        parts = []
        for seg in sample.tree.segments_of(obj_node.node_id):
            part_pos = seg.mask.contributor_ids[0]
            part = scene.parts[part_pos]
            parts.append(
                GtPart(seg.mask.point_indices, concept=part.concept, part_id=part.part_id)
            )
        gt_objects.append(
            GtObject(obj_node.mask.point_indices, concept=obj.concept, parts=parts)
        )
    save_part_hierarchy(gt_objects, out / "gt_hierarchy.json")

    save_instances(
        [GtInstance(o.concept, o.point_indices) for o in gt_objects],
        out / "gt_instances_objects.json",
    )
    save_instances(
        [GtInstance(p.concept, p.point_indices) for o in gt_objects for p in o.parts],
        out / "gt_instances_parts.json",
    )

    embedder = SyntheticConceptEmbedder(seed, sample.tree.feature_dim)
    records = synthetic_seg2d_embeddings(
        {p.part_id: p.concept for p in scene.parts},
        label_maps,
        [f.frame_id for f in scene.cameras],
        embedder,
    )
    archive = EmbeddingArchive(dim=sample.tree.feature_dim)
    for key in sorted(records):
        archive.add(key, records[key])
    write_embedding_archive(archive, out / "seg2d_embeddings.emb")

    concepts = []
    for obj in scene.objects:
        if obj.concept not in concepts:
            concepts.append(obj.concept)
    for part in scene.parts:
        if part.concept not in concepts:
            concepts.append(part.concept)
    (out / "concepts.txt").write_text("".join(c + "\n" for c in concepts))

    meta = {
        "format": "synth-meta",
        "scene_id": scene.scene_id,
        "seed": seed,
        "feature_dim": sample.tree.feature_dim,
        "n_points": sample.cloud.n,
        "frame_count": len(scene.cameras),
    }
    (out / "meta.json").write_text(json.dumps(meta, separators=(",", ":")) + "\n")


# -- spec files ----------------------------------------------------------------

def scene_to_spec_json(scene: SynthScene) -> str:
    payload = {
        "format": "synth-scene",
        "scene_id": scene.scene_id,
        "objects": [{"object_id": o.object_id, "concept": o.concept} for o in scene.objects],
        "parts": [
            {
                "object_id": p.object_id,
                "part_id": p.part_id,
                "concept": p.concept,
                "box_min": p.box_min.tolist(),
                "box_max": p.box_max.tolist(),
                "density": p.density,
            }
            for p in scene.parts
        ],
        "cameras": [c.to_dict() for c in scene.cameras],
    }
    return json.dumps(payload, separators=(",", ":"))


def load_scene_spec(path: str | Path) -> SynthScene:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if payload.get("format") != "synth-scene":
        raise FormatError(f"{path}: expected a synth-scene spec")
    cameras_raw = payload.get("cameras", [])
    if isinstance(cameras_raw, dict):
        orbit = cameras_raw.get("orbit")
        if orbit is None:
            raise FormatError(f"{path}: cameras must be a list or an orbit spec")
        cameras = orbit_cameras(
            count=int(orbit["count"]),
            target=orbit["target"],
            radius=float(orbit["radius"]),
            height=float(orbit["height"]),
            fx=float(orbit.get("fx", 140.0)),
            fy=float(orbit.get("fy", 140.0)),
            width=int(orbit.get("width", 160)),
            height_px=int(orbit.get("height_px", 120)),
        )
    else:
        cameras = [FrameManifestEntry.from_dict(c) for c in cameras_raw]
    try:
        return SynthScene(
            scene_id=str(payload["scene_id"]),
            objects=[
                SynthObject(int(o["object_id"]), str(o["concept"]))
                for o in payload["objects"]
            ],
            parts=[
                SynthPart(
                    object_id=int(p["object_id"]),
                    part_id=int(p["part_id"]),
                    concept=str(p["concept"]),
                    box_min=p["box_min"],
                    box_max=p["box_max"],
                    density=int(p["density"]),
                )
                for p in payload["parts"]
            ],
            cameras=cameras,
        )
    except KeyError as exc:
        raise FormatError(f"{path}: missing field {exc}") from exc


# -- templates -----------------------------------------------------------------

def _shift(template: list[tuple[str, np.ndarray, np.ndarray, int]], offset) -> list:
    offset = np.asarray(offset, dtype=np.float64)
    return [(c, np.asarray(lo) + offset, np.asarray(hi) + offset, n) for c, lo, hi, n in template]


# Each template: object concept plus (part concept, box_min, box_max, density)
# in a local frame. Geometry rules that keep the pipeline's ground truth
# exact: box side ratios stay <= 3 so stratified faces remain k-NN
# connected; same-direction faces of different parts sit >= 0.1 m apart so
# the graph never bridges parts; same-concept siblings sit > thr_dist apart
# so semantic merging keeps them separate.
_TEMPLATES: dict[str, tuple[str, list]] = {
    "chair": ("chair", [
        ("seat", (0.0, 0.0, 0.34), (0.62, 0.62, 0.55), 12),
        ("backrest", (0.12, 0.31, 0.55), (0.50, 0.49, 0.95), 11),
        ("leg", (0.10, 0.10, 0.0), (0.23, 0.23, 0.34), 10),
        ("leg", (0.39, 0.10, 0.0), (0.52, 0.23, 0.34), 10),
        ("leg", (0.10, 0.39, 0.0), (0.23, 0.52, 0.34), 10),
        ("leg", (0.39, 0.39, 0.0), (0.52, 0.52, 0.34), 10),
    ]),
    "table": ("table", [
        ("tabletop", (0.0, 0.0, 0.45), (0.8, 0.8, 0.72), 13),
        ("leg", (0.12, 0.12, 0.0), (0.27, 0.27, 0.45), 10),
        ("leg", (0.53, 0.12, 0.0), (0.68, 0.27, 0.45), 10),
        ("leg", (0.12, 0.53, 0.0), (0.27, 0.68, 0.45), 10),
        ("leg", (0.53, 0.53, 0.0), (0.68, 0.68, 0.45), 10),
    ]),
    "tower": ("tower", [
        ("pedestal", (0.0, 0.0, 0.0), (0.6, 0.6, 0.3), 13),
        ("column", (0.13, 0.13, 0.3), (0.47, 0.47, 0.62), 12),
        ("cap", (0.24, 0.24, 0.62), (0.36, 0.36, 0.74), 10),
    ]),
    "bench": ("bench", [
        ("slab", (0.0, 0.0, 0.34), (0.75, 0.35, 0.6), 13),
        ("support", (0.12, 0.10, 0.0), (0.26, 0.25, 0.34), 10),
        ("support", (0.49, 0.10, 0.0), (0.63, 0.25, 0.34), 10),
    ]),
    "lamp": ("lamp", [
        ("base", (0.0, 0.0, 0.0), (0.34, 0.34, 0.12), 12),
        ("pole", (0.11, 0.11, 0.12), (0.23, 0.23, 0.48), 10),
        ("shade", (0.0, 0.0, 0.48), (0.34, 0.34, 0.62), 12),
    ]),
}

TEMPLATE_NAMES = tuple(sorted(_TEMPLATES))


def template_scene(
    name: str,
    *,
    scene_id: str | None = None,
    cameras: list[FrameManifestEntry] | None = None,
) -> SynthScene:
    """A single-object scene from the named template."""
    if name not in _TEMPLATES:
        raise ValidationError(f"unknown template {name!r}; have {TEMPLATE_NAMES}")
    concept, parts = _TEMPLATES[name]
    if cameras is None:
        cameras = orbit_cameras(12, target=(0.25, 0.25, 0.45), radius=2.2, height=1.4)
    return SynthScene(
        scene_id=scene_id or f"{name}_scene",
        objects=[SynthObject(0, concept)],
        parts=[
            SynthPart(0, i, c, lo, hi, n)
            for i, (c, lo, hi, n) in enumerate(parts)
        ],
        cameras=cameras,
    )


def random_scene(
    seed: int,
    n_objects: int = 3,
    n_cameras: int = 20,
    scene_id: str | None = None,
) -> SynthScene:
    """Several templates placed on a line, under an orbit of cameras."""
    rng = np.random.default_rng(seed)
    names = [TEMPLATE_NAMES[int(rng.integers(len(TEMPLATE_NAMES)))] for _ in range(n_objects)]
    objects, parts = [], []
    part_id = 0
    spacing = 1.4
    x0 = -spacing * (n_objects - 1) / 2.0
    for obj_id, name in enumerate(names):
        concept, template = _TEMPLATES[name]
        objects.append(SynthObject(obj_id, concept))
        for c, lo, hi, n in _shift(template, (x0 + obj_id * spacing, -0.25, 0.0)):
            parts.append(SynthPart(obj_id, part_id, c, lo, hi, n))
            part_id += 1
    cameras = orbit_cameras(
        n_cameras,
        target=(0.25, 0.0, 0.45),
        radius=3.4,
        height=2.0,
    )
    return SynthScene(
        scene_id=scene_id or f"synth_{seed}",
        objects=objects,
        parts=parts,
        cameras=cameras,
    )
