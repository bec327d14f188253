"""JSON mask files: object masks, segments, GT part hierarchies, instances.

Every file is a single JSON object with a "format" tag:

    object-masks    {"format": "object-masks",
                     "masks": [{"confidence": f, "point_indices": [...]}]}
    segment-masks   {"format": "segment-masks",
                     "segments": [{"parent_object": i, "contributor_ids": [...],
                                   "point_indices": [...]}]}
    part-hierarchy  {"format": "part-hierarchy",
                     "objects": [{"concept": str, "point_indices": [...],
                                  "parts": [{"concept": str, "part_id": i,
                                             "point_indices": [...]}]}]}
    instances       {"format": "instances",
                     "instances": [{"category": str, "point_indices": [...],
                                    "confidence": f?}]}
    point-labels    {"format": "point-labels", "labels": [ints, -1 = ignore]}

Files are written compactly with a stable key order, so identical inputs
produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FormatError
from ..metrics import GtInstance, PredInstance
from ..model import InstanceMask, SegmentMask


def _load_tagged(path: str | Path, expected: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != expected:
        raise FormatError(f"{path}: expected a {expected!r} file")
    return payload


def _dump(payload: dict, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, separators=(",", ":"))
        fh.write("\n")


def _indices(record: dict, path, what: str) -> list:
    if "point_indices" not in record:
        raise FormatError(f"{path}: {what} missing point_indices")
    return record["point_indices"]


# -- object masks -----------------------------------------------------------

def save_object_masks(masks: list[InstanceMask], path: str | Path) -> None:
    _dump(
        {
            "format": "object-masks",
            "masks": [
                {"confidence": m.confidence, "point_indices": m.point_indices.tolist()}
                for m in masks
            ],
        },
        path,
    )


def load_object_masks(path: str | Path) -> list[InstanceMask]:
    payload = _load_tagged(path, "object-masks")
    masks = []
    for record in payload.get("masks", []):
        masks.append(
            InstanceMask(_indices(record, path, "mask"), confidence=record.get("confidence", 1.0))
        )
    return masks


# -- segment masks ----------------------------------------------------------

def save_segments(segments: list[SegmentMask], path: str | Path) -> None:
    _dump(
        {
            "format": "segment-masks",
            "segments": [
                {
                    "parent_object": s.parent_object,
                    "contributor_ids": list(s.contributor_ids),
                    "point_indices": s.point_indices.tolist(),
                }
                for s in segments
            ],
        },
        path,
    )


def load_segments(path: str | Path) -> list[SegmentMask]:
    payload = _load_tagged(path, "segment-masks")
    return [
        SegmentMask(
            _indices(record, path, "segment"),
            parent_object=int(record.get("parent_object", -1)),
            contributor_ids=tuple(record.get("contributor_ids", ())),
        )
        for record in payload.get("segments", [])
    ]


# -- GT part hierarchy ------------------------------------------------------

@dataclass
class GtPart:
    point_indices: np.ndarray
    concept: str
    part_id: int

    def __post_init__(self) -> None:
        self.point_indices = np.asarray(self.point_indices, dtype=np.int64)


@dataclass
class GtObject:
    point_indices: np.ndarray
    concept: str
    parts: list[GtPart] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.point_indices = np.asarray(self.point_indices, dtype=np.int64)


def save_part_hierarchy(objects: list[GtObject], path: str | Path) -> None:
    _dump(
        {
            "format": "part-hierarchy",
            "objects": [
                {
                    "concept": o.concept,
                    "point_indices": o.point_indices.tolist(),
                    "parts": [
                        {
                            "concept": p.concept,
                            "part_id": p.part_id,
                            "point_indices": p.point_indices.tolist(),
                        }
                        for p in o.parts
                    ],
                }
                for o in objects
            ],
        },
        path,
    )


def load_part_hierarchy(path: str | Path) -> list[GtObject]:
    payload = _load_tagged(path, "part-hierarchy")
    objects = []
    for record in payload.get("objects", []):
        parts = [
            GtPart(
                _indices(p, path, "part"),
                concept=str(p.get("concept", "")),
                part_id=int(p.get("part_id", i)),
            )
            for i, p in enumerate(record.get("parts", []))
        ]
        objects.append(
            GtObject(
                _indices(record, path, "object"),
                concept=str(record.get("concept", "")),
                parts=parts,
            )
        )
    return objects


# -- instances (predictions / GT for evaluation) -----------------------------

def save_instances(instances, path: str | Path) -> None:
    records = []
    for inst in instances:
        record = {"category": inst.category, "point_indices": inst.point_indices.tolist()}
        if isinstance(inst, PredInstance):
            record["confidence"] = inst.confidence
        records.append(record)
    _dump({"format": "instances", "instances": records}, path)


def load_gt_instances(path: str | Path) -> list[GtInstance]:
    payload = _load_tagged(path, "instances")
    return [
        GtInstance(category=str(r.get("category", "")), point_indices=_indices(r, path, "instance"))
        for r in payload.get("instances", [])
    ]


def load_pred_instances(path: str | Path) -> list[PredInstance]:
    payload = _load_tagged(path, "instances")
    instances = []
    for r in payload.get("instances", []):
        if "confidence" not in r:
            raise FormatError(f"{path}: prediction missing confidence")
        instances.append(
            PredInstance(
                category=str(r.get("category", "")),
                point_indices=_indices(r, path, "instance"),
                confidence=float(r["confidence"]),
            )
        )
    return instances


# -- per-point labels ---------------------------------------------------------

def save_point_labels(labels, path: str | Path) -> None:
    _dump({"format": "point-labels", "labels": [int(v) for v in labels]}, path)


def load_point_labels(path: str | Path) -> np.ndarray:
    payload = _load_tagged(path, "point-labels")
    if "labels" not in payload:
        raise FormatError(f"{path}: missing labels")
    return np.asarray(payload["labels"], dtype=np.int64)
