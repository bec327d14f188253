#!/usr/bin/env python3
"""Encode a vocabulary file (one query per line) into a text archive.

Archive keys are the raw lines. The real backend runs the text encoder;
the stub uses the synthetic concept embedder, which keeps text and crop
embeddings of the same concept aligned in synthetic end-to-end runs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from scenetree.embed import SyntheticConceptEmbedder
from scenetree.io.archive import EmbeddingArchive, write_embedding_archive

from .common import unavailable_backend, write_provenance


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("vocab", help="text file, one query per line")
    parser.add_argument("--out", required=True, help="output EMB1 archive")
    parser.add_argument("--backend", choices=["stub", "vlm"], default="stub")
    parser.add_argument("--dim", type=int, default=1152)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.backend != "stub":
        raise unavailable_backend(args.backend, "the text encoder runtime")

    lines = [ln.strip() for ln in Path(args.vocab).read_text().splitlines() if ln.strip()]
    embedder = SyntheticConceptEmbedder(args.seed, args.dim)
    archive = EmbeddingArchive(dim=args.dim)
    for line in lines:
        archive.add(line, embedder.embed_text(line))
    write_embedding_archive(archive, args.out)
    write_provenance(args.out, "embed_texts", args.backend,
                     {"dim": args.dim, "seed": args.seed, "queries": len(lines)})
    print(f"embedded {len(lines)} queries to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
