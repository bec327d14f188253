#!/usr/bin/env python3
"""Encode the crops listed in a crop manifest into an EMB1 archive.

Key coverage is exact: the archive holds one record per manifest key, no
more and no fewer. The real backend decodes the RGB frames, cuts the
listed boxes, and runs the image encoder; the stub derives a deterministic
vector from each key.
"""

from __future__ import annotations

import argparse
import sys

from scenetree.embed import SyntheticConceptEmbedder
from scenetree.io.archive import EmbeddingArchive, write_embedding_archive
from scenetree.io.crops import read_crop_manifest

from .common import unavailable_backend, write_provenance


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("manifest", help="crop manifest (JSONL)")
    parser.add_argument("--out", required=True, help="output EMB1 archive")
    parser.add_argument("--backend", choices=["stub", "vlm"], default="stub")
    parser.add_argument("--dim", type=int, default=1152)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.backend != "stub":
        raise unavailable_backend(args.backend, "the image encoder runtime")

    records = read_crop_manifest(args.manifest)
    embedder = SyntheticConceptEmbedder(args.seed, args.dim)
    archive = EmbeddingArchive(dim=args.dim)
    for record in records:
        archive.add(record.key, embedder.concept_vector(record.key))
    write_embedding_archive(archive, args.out)
    write_provenance(args.out, "embed_crops", args.backend,
                     {"dim": args.dim, "seed": args.seed, "crops": len(records)})
    print(f"embedded {len(records)} crops to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
