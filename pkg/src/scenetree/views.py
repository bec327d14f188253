"""Pinhole projection, occlusion-aware visibility, view selection, crops.

Cameras are pinhole without distortion; poses are camera-to-world with x
right, y down, z forward, so u = fx*x/z + cx and v = fy*y/z + cy. Depth
samples use the nearest pixel (round half up, no interpolation); a depth
value of 0 marks an invalid measurement and a projected point landing on
one counts as occluded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import ValidationError
from .model import InstanceMask, PointCloud

if TYPE_CHECKING:  # avoid a runtime cycle with scenetree.io
    from .io.frames import FrameManifestEntry

_MIN_Z = 1e-6
MIN_CROP_PIXELS = 8


@dataclass
class CropBox:
    """One multi-scale crop, inclusive-exclusive pixel bounds."""

    frame_id: str
    level: int
    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self) -> None:
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValidationError(
                f"degenerate crop box ({self.x_min},{self.y_min})-({self.x_max},{self.y_max})"
            )

    @property
    def area(self) -> int:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


def crop_key(node_id: int, frame_id: str, level: int) -> str:
    return f"{node_id}/{frame_id}/{level}"


def project_points(positions: np.ndarray, frame: FrameManifestEntry):
    """Project world points; returns (uv (N,2), z (N,), in_front (N,))."""
    positions = np.asarray(positions, dtype=np.float64)
    rot = frame.rotation
    cam = (positions - frame.translation) @ rot  # rot.T applied from the right
    z = cam[:, 2]
    in_front = z > _MIN_Z
    safe_z = np.where(in_front, z, 1.0)
    u = frame.fx * cam[:, 0] / safe_z + frame.cx
    v = frame.fy * cam[:, 1] / safe_z + frame.cy
    return np.stack([u, v], axis=1), z, in_front


def project_point(p, frame: FrameManifestEntry):
    """Project one point; returns (u, v, z) or None when behind the camera."""
    uv, z, in_front = project_points(np.asarray(p, dtype=np.float64).reshape(1, 3), frame)
    if not in_front[0]:
        return None
    return (float(uv[0, 0]), float(uv[0, 1]), float(z[0]))


def backproject_points(uv: np.ndarray, z: np.ndarray, frame: FrameManifestEntry) -> np.ndarray:
    """Invert project_points for given pixel coordinates and depths."""
    uv = np.asarray(uv, dtype=np.float64).reshape(-1, 2)
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    x = (uv[:, 0] - frame.cx) * z / frame.fx
    y = (uv[:, 1] - frame.cy) * z / frame.fy
    cam = np.stack([x, y, z], axis=1)
    return cam @ frame.rotation.T + frame.translation


def pixel_coords(uv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest pixel (row, col) for continuous (u, v); round half up."""
    uv = np.asarray(uv, dtype=np.float64)
    cols = np.floor(uv[:, 0] + 0.5).astype(np.int64)
    rows = np.floor(uv[:, 1] + 0.5).astype(np.int64)
    return rows, cols


@dataclass
class FrameVisibility:
    """Per-point projection results for one frame, shared across stages."""

    uv: np.ndarray        # (N, 2) float64 pixel coordinates
    rows: np.ndarray      # (N,) nearest-pixel rows (valid where inside)
    cols: np.ndarray      # (N,) nearest-pixel cols
    inside: np.ndarray    # (N,) bool: in front of camera and within bounds
    visible: np.ndarray   # (N,) bool: inside and passing the occlusion test


def frame_visibility(
    positions: np.ndarray,
    frame: FrameManifestEntry,
    depth_m: np.ndarray,
    depth_tolerance: float,
) -> FrameVisibility:
    """Project all points into one frame and run the occlusion test."""
    depth_m = np.asarray(depth_m)
    if depth_m.shape != (frame.height, frame.width):
        raise ValidationError(
            f"depth image shape {depth_m.shape} does not match frame "
            f"{frame.frame_id} ({frame.height}x{frame.width})"
        )
    uv, z, in_front = project_points(positions, frame)
    rows, cols = pixel_coords(uv)
    inside = (
        in_front
        & (rows >= 0) & (rows < frame.height)
        & (cols >= 0) & (cols < frame.width)
    )
    visible = np.zeros(len(positions), dtype=bool)
    if inside.any():
        idx = np.nonzero(inside)[0]
        sampled = depth_m[rows[idx], cols[idx]].astype(np.float64)
        ok = (sampled > 0) & (np.abs(z[idx] - sampled) <= depth_tolerance)
        visible[idx[ok]] = True
    return FrameVisibility(uv=uv, rows=rows, cols=cols, inside=inside, visible=visible)


def visibility_ratio(
    mask: InstanceMask,
    cloud: PointCloud,
    frame: FrameManifestEntry,
    depth_m: np.ndarray,
    depth_tolerance: float = 0.05,
) -> float:
    """Fraction of mask points visible and unoccluded in the frame."""
    vis = frame_visibility(cloud.positions[mask.point_indices], frame, depth_m, depth_tolerance)
    return float(vis.visible.mean())


def select_topk_views(
    mask: InstanceMask,
    cloud: PointCloud,
    frames: list[FrameManifestEntry],
    depths: list[np.ndarray],
    k: int,
    stride: int,
    depth_tolerance: float = 0.05,
) -> list[str]:
    """Frame ids of the k least-occluded views among every stride-th frame.

    Ranking is by descending visibility ratio, ties by sequence order;
    frames where nothing is visible are never selected.
    """
    if k < 1 or stride < 1:
        raise ValidationError("k and stride must be >= 1")
    if len(frames) != len(depths):
        raise ValidationError("need one depth image per frame")
    scored = []
    for i in range(0, len(frames), stride):
        ratio = visibility_ratio(mask, cloud, frames[i], depths[i], depth_tolerance)
        if ratio > 0.0:
            scored.append((-ratio, i))
    scored.sort()
    return [frames[i].frame_id for _, i in scored[:k]]


def crop_boxes(
    uv_visible: np.ndarray,
    frame_id: str,
    levels: int,
    k_exp: float,
    width: int,
    height: int,
) -> list[CropBox]:
    """Multi-scale boxes around visible projections of one node.

    Level 0 is the tightest pixel box (inflated to MIN_CROP_PIXELS per side
    when degenerate); level l scales it about its center by 1 + l*k_exp,
    then clamps to the image. Pre-clamp areas never decrease with level.
    """
    uv_visible = np.asarray(uv_visible, dtype=np.float64).reshape(-1, 2)
    if len(uv_visible) == 0:
        raise ValidationError("crop_boxes needs at least one visible projected point")
    rows, cols = pixel_coords(uv_visible)
    x0, x1 = int(cols.min()), int(cols.max()) + 1
    y0, y1 = int(rows.min()), int(rows.max()) + 1
    if x1 - x0 < MIN_CROP_PIXELS:
        cx = (x0 + x1) / 2.0
        x0 = int(np.floor(cx - MIN_CROP_PIXELS / 2.0))
        x1 = x0 + MIN_CROP_PIXELS
    if y1 - y0 < MIN_CROP_PIXELS:
        cy = (y0 + y1) / 2.0
        y0 = int(np.floor(cy - MIN_CROP_PIXELS / 2.0))
        y1 = y0 + MIN_CROP_PIXELS

    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    half_w, half_h = (x1 - x0) / 2.0, (y1 - y0) / 2.0
    boxes = []
    for level in range(levels):
        scale = 1.0 + level * k_exp
        bx0 = int(np.floor(cx - half_w * scale))
        bx1 = int(np.ceil(cx + half_w * scale))
        by0 = int(np.floor(cy - half_h * scale))
        by1 = int(np.ceil(cy + half_h * scale))
        boxes.append(
            CropBox(
                frame_id=frame_id,
                level=level,
                x_min=max(0, bx0),
                y_min=max(0, by0),
                x_max=min(width, bx1),
                y_max=min(height, by1),
            )
        )
    return boxes
