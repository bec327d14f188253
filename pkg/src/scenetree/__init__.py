"""scenetree: hierarchical object/part scene trees with text search.

Builds a scene → objects → part-segments tree from reconstructed geometry
and posed RGB-D metadata, attaches open-vocabulary embedding vectors to
every node, and answers free-form text queries at object and part
granularity — plus the metrics to score such predictions.
"""

from .config import PipelineConfig
from .errors import (
    FormatError,
    MissingKeyError,
    SceneError,
    UsageError,
    ValidationError,
)
from .model import (
    FeatureVector,
    InstanceMask,
    PointCloud,
    SceneTree,
    SegmentMask,
    build_tree,
    resolve_overlaps,
    validate_tree,
)

__version__ = "0.1.0"

__all__ = [
    "FeatureVector",
    "FormatError",
    "InstanceMask",
    "MissingKeyError",
    "PipelineConfig",
    "PointCloud",
    "SceneError",
    "SceneTree",
    "SegmentMask",
    "UsageError",
    "ValidationError",
    "build_tree",
    "resolve_overlaps",
    "validate_tree",
    "__version__",
]
