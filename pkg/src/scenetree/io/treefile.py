"""Scene-tree serialization: the "HST1" binary format and a JSON text form.

Binary layout, little-endian throughout:

    magic            4 bytes "HST1"
    version          u32 (currently 1)
    n_points         u32
    object_count     u32
    segment_count    u32
    dim              u32 (feature dimensionality D)
    next_node_id     u32
    scene_id         u16 length + utf-8 bytes
    objects, in node-id order:
        node_id u32, confidence f32, count u32, point indices u32[count]
    segments, in stored order:
        node_id u32, parent_object u32, n_contrib u32, contributor ids
        u32[n_contrib], count u32, point indices u32[count]
    contributor feature table, sorted by contributor id:
        count u32, then per entry: contributor_id u32, observed u8, f32[D]
    object features, in object order: observed u8, f32[D]
    segment features, in segment order: observed u8, f32[D]

The JSON form carries identical information; floats survive both forms
exactly (features are f32; JSON round-trips their double representation).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError
from ..model import (
    FeatureVector,
    InstanceMask,
    ObjectNode,
    SceneTree,
    SegmentMask,
    SegmentNode,
)

_MAGIC = b"HST1"
_VERSION = 1


def _pack_indices(indices: np.ndarray) -> bytes:
    return struct.pack("<I", len(indices)) + indices.astype("<u4").tobytes()


def _pack_feature(feature: FeatureVector) -> bytes:
    return struct.pack("<B", 1 if feature.observed else 0) + feature.values.astype("<f4").tobytes()


def write_tree(tree: SceneTree, path: str | Path) -> None:
    scene_id = tree.scene_id.encode("utf-8")
    out = [
        _MAGIC,
        struct.pack(
            "<IIIII",
            _VERSION,
            tree.n_points,
            len(tree.objects),
            len(tree.segments),
            tree.feature_dim,
        ),
        struct.pack("<I", tree.next_node_id),
        struct.pack("<H", len(scene_id)),
        scene_id,
    ]
    for node in tree.objects:
        out.append(struct.pack("<If", node.node_id, node.mask.confidence))
        out.append(_pack_indices(node.mask.point_indices))
    for node in tree.segments:
        out.append(struct.pack("<II", node.node_id, node.mask.parent_object))
        contribs = np.asarray(node.mask.contributor_ids, dtype=np.int64)
        out.append(_pack_indices(contribs))
        out.append(_pack_indices(node.mask.point_indices))
    contrib_ids = sorted(tree.contributor_features)
    out.append(struct.pack("<I", len(contrib_ids)))
    for cid in contrib_ids:
        out.append(struct.pack("<I", cid))
        out.append(_pack_feature(tree.contributor_features[cid]))
    for node in tree.objects:
        out.append(_pack_feature(node.feature))
    for node in tree.segments:
        out.append(_pack_feature(node.feature))
    Path(path).write_bytes(b"".join(out))


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if len(self.data) - self.pos < n:
            raise FormatError(f"{self.path}: truncated tree file")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def f32(self) -> float:
        return struct.unpack("<f", self.take(4))[0]

    def indices(self) -> np.ndarray:
        count = self.u32()
        return np.frombuffer(self.take(count * 4), dtype="<u4").astype(np.int64)

    def feature(self, dim: int) -> FeatureVector:
        observed = self.take(1)[0] != 0
        values = np.frombuffer(self.take(dim * 4), dtype="<f4").copy()
        return FeatureVector(values, observed=observed)


def read_tree(path: str | Path) -> SceneTree:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}")
    r = _Reader(data, path)
    r.pos = 4
    version = r.u32()
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported tree version {version}")
    n_points = r.u32()
    n_objects = r.u32()
    n_segments = r.u32()
    dim = r.u32()
    next_node_id = r.u32()
    (id_len,) = struct.unpack("<H", r.take(2))
    scene_id = r.take(id_len).decode("utf-8")

    raw_objects = []
    for _ in range(n_objects):
        node_id = r.u32()
        confidence = r.f32()
        raw_objects.append((node_id, confidence, r.indices()))
    raw_segments = []
    for _ in range(n_segments):
        node_id = r.u32()
        parent = r.u32()
        contribs = r.indices()
        raw_segments.append((node_id, parent, contribs, r.indices()))
    contributor_features: dict[int, FeatureVector] = {}
    for _ in range(r.u32()):
        cid = r.u32()
        contributor_features[cid] = r.feature(dim)

    objects = [
        ObjectNode(node_id, InstanceMask(idx, confidence=conf), r.feature(dim))
        for node_id, conf, idx in raw_objects
    ]
    segments = [
        SegmentNode(
            node_id,
            SegmentMask(idx, parent_object=parent, contributor_ids=tuple(int(c) for c in contribs)),
            r.feature(dim),
        )
        for node_id, parent, contribs, idx in raw_segments
    ]
    return SceneTree(
        scene_id=scene_id,
        n_points=n_points,
        feature_dim=dim,
        objects=objects,
        segments=segments,
        contributor_features=contributor_features,
        next_node_id=next_node_id,
    )


# -- JSON text form -----------------------------------------------------------

def _feature_dict(feature: FeatureVector) -> dict:
    return {"observed": feature.observed, "values": [float(v) for v in feature.values]}


def _feature_from(record: dict) -> FeatureVector:
    return FeatureVector(
        np.asarray(record["values"], dtype=np.float32), observed=bool(record["observed"])
    )


def tree_to_json(tree: SceneTree) -> str:
    payload = {
        "format": "scene-tree",
        "scene_id": tree.scene_id,
        "n_points": tree.n_points,
        "feature_dim": tree.feature_dim,
        "next_node_id": tree.next_node_id,
        "objects": [
            {
                "node_id": node.node_id,
                "confidence": node.mask.confidence,
                "point_indices": node.mask.point_indices.tolist(),
                "feature": _feature_dict(node.feature),
            }
            for node in tree.objects
        ],
        "segments": [
            {
                "node_id": node.node_id,
                "parent_object": node.mask.parent_object,
                "contributor_ids": list(node.mask.contributor_ids),
                "point_indices": node.mask.point_indices.tolist(),
                "feature": _feature_dict(node.feature),
            }
            for node in tree.segments
        ],
        "contributor_features": {
            str(cid): _feature_dict(tree.contributor_features[cid])
            for cid in sorted(tree.contributor_features)
        },
    }
    return json.dumps(payload, separators=(",", ":"))


def tree_from_json(text: str) -> SceneTree:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid tree JSON: {exc}") from exc
    if payload.get("format") != "scene-tree":
        raise FormatError("expected a scene-tree JSON document")
    objects = [
        ObjectNode(
            int(r["node_id"]),
            InstanceMask(r["point_indices"], confidence=r.get("confidence", 1.0)),
            _feature_from(r["feature"]),
        )
        for r in payload["objects"]
    ]
    segments = [
        SegmentNode(
            int(r["node_id"]),
            SegmentMask(
                r["point_indices"],
                parent_object=int(r["parent_object"]),
                contributor_ids=tuple(int(c) for c in r["contributor_ids"]),
            ),
            _feature_from(r["feature"]),
        )
        for r in payload["segments"]
    ]
    return SceneTree(
        scene_id=payload["scene_id"],
        n_points=int(payload["n_points"]),
        feature_dim=int(payload["feature_dim"]),
        objects=objects,
        segments=segments,
        contributor_features={
            int(cid): _feature_from(rec)
            for cid, rec in payload.get("contributor_features", {}).items()
        },
        next_node_id=int(payload["next_node_id"]),
    )


def write_tree_json(tree: SceneTree, path: str | Path) -> None:
    Path(path).write_text(tree_to_json(tree) + "\n")


def read_tree_json(path: str | Path) -> SceneTree:
    return tree_from_json(Path(path).read_text())
