"""Score-to-color mapping and heatmap PLY export.

The colormap is a fixed piecewise-linear blue→white→red ramp: t=0 maps to
pure blue (0,0,255), t=0.5 to white, t=1 to pure red (255,0,0). Scores are
normalized over their [min, max] range; a degenerate range maps every point
to the t=0.5 color. The viewer applies the identical ramp client-side.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ValidationError
from ..model import PointCloud
from .ply import write_ply


def colormap(t: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to u8 RGB along the blue→white→red ramp."""
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    low = t <= 0.5
    s = np.where(low, t * 2.0, (t - 0.5) * 2.0)
    r = np.where(low, s, 1.0)
    g = np.where(low, s, 1.0 - s)
    b = np.where(low, 1.0, 1.0 - s)
    rgb = np.stack([r, g, b], axis=-1)
    return np.rint(rgb * 255.0).astype(np.uint8)


def normalize_scores(scores: np.ndarray) -> np.ndarray:
    """Rescale scores to [0, 1]; a constant array maps to all 0.5."""
    scores = np.asarray(scores, dtype=np.float64)
    lo, hi = scores.min(), scores.max()
    if hi == lo:
        return np.full(scores.shape, 0.5)
    return (scores - lo) / (hi - lo)


def write_heatmap_ply(cloud: PointCloud, scores, path: str | Path) -> None:
    """Write the cloud recolored by per-point scores."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (cloud.n,):
        raise ValidationError(f"scores must have length {cloud.n}, got shape {scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise ValidationError("scores must be finite")
    colors = colormap(normalize_scores(scores))
    write_ply(path, cloud.positions, colors_u8=colors, binary=True)
