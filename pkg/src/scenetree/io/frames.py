"""Camera frame manifests.

A manifest is JSON Lines: one object per line with keys frame_id, fx, fy,
cx, cy, width, height, camera_to_world (16 numbers, row-major), depth_path,
depth_scale, and optional rgb_path. Poses are camera-to-world; the rotation
block must be a proper rotation (orthonormal within 1e-4, positive
determinant) and the bottom row (0, 0, 0, 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import FormatError


@dataclass
class FrameManifestEntry:
    frame_id: str
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    camera_to_world: np.ndarray   # (4, 4) float64
    depth_path: str
    depth_scale: float
    rgb_path: str | None = None

    def __post_init__(self) -> None:
        self.camera_to_world = np.asarray(self.camera_to_world, dtype=np.float64).reshape(4, 4)
        if self.fx <= 0 or self.fy <= 0:
            raise FormatError(f"frame {self.frame_id}: focal lengths must be positive")
        if self.width <= 0 or self.height <= 0:
            raise FormatError(f"frame {self.frame_id}: image size must be positive")
        if self.depth_scale <= 0:
            raise FormatError(f"frame {self.frame_id}: depth_scale must be positive")
        if not np.allclose(self.camera_to_world[3], (0.0, 0.0, 0.0, 1.0), atol=1e-9):
            raise FormatError(f"frame {self.frame_id}: pose bottom row must be (0,0,0,1)")
        rot = self.camera_to_world[:3, :3]
        if not np.allclose(rot @ rot.T, np.eye(3), atol=1e-4):
            raise FormatError(f"frame {self.frame_id}: rotation block is not orthonormal")
        if np.linalg.det(rot) <= 0:
            raise FormatError(f"frame {self.frame_id}: rotation block is not a proper rotation")

    @property
    def rotation(self) -> np.ndarray:
        return self.camera_to_world[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.camera_to_world[:3, 3]

    def to_dict(self) -> dict:
        record = {
            "frame_id": self.frame_id,
            "fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
            "width": self.width, "height": self.height,
            "camera_to_world": [float(v) for v in self.camera_to_world.reshape(-1)],
            "depth_path": self.depth_path,
            "depth_scale": self.depth_scale,
        }
        if self.rgb_path is not None:
            record["rgb_path"] = self.rgb_path
        return record

    @staticmethod
    def from_dict(record: dict) -> "FrameManifestEntry":
        required = ("frame_id", "fx", "fy", "cx", "cy", "width", "height",
                    "camera_to_world", "depth_path", "depth_scale")
        missing = [k for k in required if k not in record]
        if missing:
            raise FormatError(f"frame entry missing fields: {missing}")
        matrix = record["camera_to_world"]
        if len(matrix) != 16:
            raise FormatError("camera_to_world must hold 16 row-major values")
        return FrameManifestEntry(
            frame_id=str(record["frame_id"]),
            fx=float(record["fx"]), fy=float(record["fy"]),
            cx=float(record["cx"]), cy=float(record["cy"]),
            width=int(record["width"]), height=int(record["height"]),
            camera_to_world=np.array(matrix, dtype=np.float64).reshape(4, 4),
            depth_path=str(record["depth_path"]),
            depth_scale=float(record["depth_scale"]),
            rgb_path=None if record.get("rgb_path") is None else str(record["rgb_path"]),
        )


def load_frames(path: str | Path) -> list[FrameManifestEntry]:
    """Read a frame manifest, preserving file order."""
    entries = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        try:
            entries.append(FrameManifestEntry.from_dict(record))
        except FormatError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
    return entries


def save_frames(entries, path: str | Path) -> None:
    with open(path, "w") as fh:
        for entry in entries:
            fh.write(json.dumps(entry.to_dict()) + "\n")
