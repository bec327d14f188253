#!/usr/bin/env python3
"""Propose 2D segments per frame and embed one crop per segment.

Emits 16-bit label maps (value 0 = unlabeled) plus an EMB1 archive keyed
"{frame_id}/{seg2d_id}" with one embedding per referenced segment. The
real backend wraps a promptable 2D segmenter and an image encoder; the
stub tiles each frame into a grid and embeds each tile with the synthetic
concept embedder, which keeps every downstream format contract intact.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from scenetree.embed import SyntheticConceptEmbedder
from scenetree.io.archive import EmbeddingArchive, write_embedding_archive
from scenetree.io.frames import load_frames
from scenetree.io.pgm import write_label_map

from .common import unavailable_backend, write_provenance


def tile_labels(height: int, width: int, grid: int) -> np.ndarray:
    rows = np.minimum(np.arange(height) * grid // height, grid - 1)
    cols = np.minimum(np.arange(width) * grid // width, grid - 1)
    return (rows[:, None] * grid + cols[None, :]).astype(np.int32)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scene_dir", help="scene bundle directory (needs frames.jsonl)")
    parser.add_argument("--out-labels", required=True, help="directory for label PGMs")
    parser.add_argument("--out-archive", required=True, help="output EMB1 archive")
    parser.add_argument("--backend", choices=["stub", "segment-network"], default="stub")
    parser.add_argument("--grid", type=int, default=4, help="stub tiling resolution")
    parser.add_argument("--dim", type=int, default=1152)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.backend != "stub":
        raise unavailable_backend(args.backend, "the 2D segmenter and image encoder")

    frames = load_frames(Path(args.scene_dir) / "frames.jsonl")
    labels_dir = Path(args.out_labels)
    labels_dir.mkdir(parents=True, exist_ok=True)
    embedder = SyntheticConceptEmbedder(args.seed, args.dim)
    archive = EmbeddingArchive(dim=args.dim)

    for frame in frames:
        labels = tile_labels(frame.height, frame.width, args.grid)
        write_label_map(labels, labels_dir / f"{frame.frame_id}.pgm")
        for label in np.unique(labels):
            cell = f"tile {int(label) // args.grid} {int(label) % args.grid}"
            archive.add(f"{frame.frame_id}/{int(label)}", embedder.concept_vector(cell))

    write_embedding_archive(archive, args.out_archive)
    write_provenance(args.out_archive, "extract_2d_segments", args.backend,
                     {"grid": args.grid, "dim": args.dim, "seed": args.seed,
                      "frames": len(frames)})
    print(f"wrote {len(frames)} label maps and {len(archive)} embeddings")
    return 0


if __name__ == "__main__":
    sys.exit(main())
