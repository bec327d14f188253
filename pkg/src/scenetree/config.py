"""Pipeline configuration and the flat key=value config-file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError, ValidationError

SCORE_MODES = ("avg", "max", "object_only", "segment_only")


@dataclass
class PipelineConfig:
    """All tunables of the tree-building and query pipeline.

    Defaults are the production values; distances are in scene units
    (meters for metric scans).
    """

    k_cluster: float = 0.05            # graph-segmentation merge threshold
    min_segment_vertices: int = 100    # smallest allowed segment, enforced by post-pass
    top_k_views: int = 5               # best views per object by visibility
    frame_stride: int = 5              # keep every stride-th frame of the sequence
    crop_levels: int = 3               # multi-scale crops per selected view
    k_exp_object: float = 0.2          # per-level box expansion ratio, object crops
    k_exp_segment: float = 0.1         # per-level box expansion ratio, 2D-segment crops
    thr_dist: float = 0.07             # max gap (m) between mergeable segments
    thr_feat: float = 0.13             # min cosine between mergeable segment features
    feature_dim: int = 1152            # embedding dimensionality D
    depth_tolerance: float = 0.05      # occlusion test tolerance (m), absolute
    score_mode: str = "avg"            # avg | max | object_only | segment_only

    def validate(self) -> None:
        positive = (
            "k_cluster", "min_segment_vertices", "top_k_views", "frame_stride",
            "crop_levels", "k_exp_object", "k_exp_segment", "thr_dist",
            "thr_feat", "feature_dim", "depth_tolerance",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValidationError(f"config field {name} must be > 0")
        if self.score_mode not in SCORE_MODES:
            raise ValidationError(
                f"unknown score_mode {self.score_mode!r}; expected one of {SCORE_MODES}"
            )


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise FormatError(f"config value for {name} is not a number: {raw!r}") from exc


def load_config_file(path: str | Path) -> dict:
    """Parse a flat key=value config file into an override dict.

    Blank lines and '#' comments are ignored; unknown keys are errors.
    """
    overrides: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise FormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in _FIELD_TYPES:
            raise FormatError(f"{path}:{lineno}: unknown config key {key!r}")
        overrides[key] = _coerce(key, value)
    return overrides


def make_config(file_overrides: dict | None = None, flag_overrides: dict | None = None) -> PipelineConfig:
    """Layer config sources: flags beat the config file, which beats defaults."""
    merged: dict = {}
    merged.update(file_overrides or {})
    merged.update({k: v for k, v in (flag_overrides or {}).items() if v is not None})
    config = PipelineConfig(**merged)
    config.validate()
    return config
