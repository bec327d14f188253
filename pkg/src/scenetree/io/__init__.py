"""Interchange-file parsers and writers.

Every format read here is also written here, and every read/write pair is a
lossless round trip. The bit-exact layouts live in the submodule docs:
PLY clouds (`ply`), JSONL frame manifests (`frames`), 16-bit PGM depth and
label maps (`pgm`), EMB1 embedding archives (`archive`), HST1 scene trees
(`treefile`), JSON mask files (`masks`), crop manifests (`crops`), and
heatmap exports (`heatmap`).
"""

from .archive import EmbeddingArchive, read_embedding_archive, write_embedding_archive
from .crops import CropRecord, read_crop_manifest, write_crop_manifest
from .frames import FrameManifestEntry, load_frames, save_frames
from .heatmap import colormap, normalize_scores, write_heatmap_ply
from .masks import (
    GtObject,
    GtPart,
    load_gt_instances,
    load_object_masks,
    load_part_hierarchy,
    load_point_labels,
    load_pred_instances,
    load_segments,
    save_instances,
    save_object_masks,
    save_part_hierarchy,
    save_point_labels,
    save_segments,
)
from .pgm import (
    read_depth,
    read_label_map,
    read_pgm16,
    write_depth,
    write_label_map,
    write_pgm16,
)
from .ply import load_point_cloud, save_point_cloud, write_ply
from .treefile import (
    read_tree,
    read_tree_json,
    tree_from_json,
    tree_to_json,
    write_tree,
    write_tree_json,
)

__all__ = [name for name in dir() if not name.startswith("_")]
