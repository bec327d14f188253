#!/usr/bin/env python3
"""Run the 3D object-instance predictor over a scene and emit a mask file.

The real backend wraps a pretrained instance-segmentation network; the
stub backend emits one whole-scene mask (or none with --limit 0) so the
file format and downstream plumbing can be exercised without weights.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from scenetree.io.masks import save_object_masks
from scenetree.io.ply import load_point_cloud
from scenetree.model import InstanceMask

from .common import unavailable_backend, write_provenance


def predict_stub(cloud, limit: int) -> list[InstanceMask]:
    if limit == 0 or cloud.n == 0:
        return []
    return [InstanceMask(np.arange(cloud.n), confidence=1.0)]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scene_dir", help="scene bundle directory (needs cloud.ply)")
    parser.add_argument("--out", required=True, help="output object-masks JSON")
    parser.add_argument("--backend", choices=["stub", "mask-network"], default="stub")
    parser.add_argument("--limit", type=int, default=-1,
                        help="emit at most this many masks (-1: no limit)")
    args = parser.parse_args(argv)

    cloud = load_point_cloud(Path(args.scene_dir) / "cloud.ply")
    if args.backend == "stub":
        masks = predict_stub(cloud, args.limit)
    else:
        raise unavailable_backend(args.backend, "the 3D instance segmentation checkpoint")

    save_object_masks(masks, args.out)
    write_provenance(args.out, "extract_object_masks", args.backend,
                     {"limit": args.limit, "n_points": cloud.n})
    print(f"wrote {len(masks)} object masks to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
