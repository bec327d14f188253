"""Crop manifests: the handoff from view selection to external encoders.

JSON Lines, one crop per line: {"key": "{node}/{frame}/{level}", "node_id",
"frame_id", "level", "x_min", "y_min", "x_max", "y_max"}. Encoders return
an EMB1 archive keyed identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import FormatError
from ..views import CropBox, crop_key


@dataclass
class CropRecord:
    key: str
    node_id: int
    box: CropBox


def write_crop_manifest(records: list[CropRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for record in records:
            fh.write(
                json.dumps(
                    {
                        "key": record.key,
                        "node_id": record.node_id,
                        "frame_id": record.box.frame_id,
                        "level": record.box.level,
                        "x_min": record.box.x_min,
                        "y_min": record.box.y_min,
                        "x_max": record.box.x_max,
                        "y_max": record.box.y_max,
                    }
                )
                + "\n"
            )


def read_crop_manifest(path: str | Path) -> list[CropRecord]:
    records = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        try:
            box = CropBox(
                frame_id=str(raw["frame_id"]),
                level=int(raw["level"]),
                x_min=int(raw["x_min"]),
                y_min=int(raw["y_min"]),
                x_max=int(raw["x_max"]),
                y_max=int(raw["y_max"]),
            )
            node_id = int(raw["node_id"])
            key = str(raw["key"])
        except KeyError as exc:
            raise FormatError(f"{path}:{lineno}: missing field {exc}") from exc
        if key != crop_key(node_id, box.frame_id, box.level):
            raise FormatError(f"{path}:{lineno}: key {key!r} does not match its fields")
        records.append(CropRecord(key=key, node_id=node_id, box=box))
    return records
