"""Command-line driver for the full pipeline.

Subcommands: synth, segment, crops, build, query, eval, serve. Every
config value defaults to the production constants and can be overridden by
a key=value config file (--config) and then by flags. Exit codes: 0
success, 1 usage, 2 input parse error, 3 invariant violation, 4 internal
error. SCENETREE_DATA_ROOT, when set, resolves relative scene paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import pipeline, synthkit
from .config import PipelineConfig, load_config_file, make_config
from .embed import ArchiveProvider, SyntheticConceptEmbedder
from .errors import FormatError, SceneError, UsageError, ValidationError
from .io import archive as archive_io
from .io import crops as crops_io
from .io import heatmap as heatmap_io
from .io import masks as masks_io
from .io import treefile
from .io.ply import load_point_cloud
from .metrics import ap_suite, miou_acc
from .query import TreeIndex, assign_vocabulary, heatmap, score_nodes, top_k


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    root = os.environ.get("SCENETREE_DATA_ROOT")
    if root and (Path(root) / p).exists():
        return Path(root) / p
    return p


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--k-cluster", type=float, dest="k_cluster")
    parser.add_argument("--min-seg", type=int, dest="min_segment_vertices")
    parser.add_argument("--top-k-views", type=int, dest="top_k_views")
    parser.add_argument("--stride", type=int, dest="frame_stride")
    parser.add_argument("--levels", type=int, dest="crop_levels")
    parser.add_argument("--k-exp-obj", type=float, dest="k_exp_object")
    parser.add_argument("--k-exp-seg", type=float, dest="k_exp_segment")
    parser.add_argument("--thr-dist", type=float, dest="thr_dist")
    parser.add_argument("--thr-feat", type=float, dest="thr_feat")
    parser.add_argument("--feature-dim", type=int, dest="feature_dim")
    parser.add_argument("--depth-tol", type=float, dest="depth_tolerance")
    parser.add_argument(
        "--mode",
        choices=["avg", "max", "object", "segment"],
        help="scoring mode (object/segment are single-level)",
    )


_MODE_ALIASES = {"object": "object_only", "segment": "segment_only"}


def _config_from_args(args) -> PipelineConfig:
    file_overrides = load_config_file(args.config) if args.config else {}
    flag_names = (
        "k_cluster", "min_segment_vertices", "top_k_views", "frame_stride",
        "crop_levels", "k_exp_object", "k_exp_segment", "thr_dist", "thr_feat",
        "feature_dim", "depth_tolerance",
    )
    flags = {name: getattr(args, name, None) for name in flag_names}
    mode = getattr(args, "mode", None)
    if mode is not None:
        flags["score_mode"] = _MODE_ALIASES.get(mode, mode)
    return make_config(file_overrides, flags)


def _build_parser() -> _Parser:
    parser = _Parser(prog="scenetree", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic scene bundle")
    p.add_argument("spec", help="synth-scene JSON spec")
    p.add_argument("--out", required=True, help="output bundle directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--feature-dim", type=int, dest="feature_dim", default=1152)

    p = sub.add_parser("segment", help="geometric over-segmentation per object")
    p.add_argument("scene_dir")
    p.add_argument("--masks", help="object mask file (default: objects.json in scene dir)")
    p.add_argument("--out", required=True, help="output segment-masks JSON")
    _add_config_flags(p)

    p = sub.add_parser("crops", help="select views and emit the crop manifest")
    p.add_argument("scene_dir")
    p.add_argument("--masks")
    p.add_argument("--out", required=True, help="output crop manifest (JSONL)")
    _add_config_flags(p)

    p = sub.add_parser("build", help="build a featured scene tree")
    p.add_argument("scene_dir")
    p.add_argument("--masks")
    p.add_argument("--out", required=True, help="output tree file (HST1)")
    p.add_argument("--crop-archive", help="EMB1 archive of crop embeddings")
    p.add_argument("--seg2d-archive", help="EMB1 archive of 2D-segment embeddings")
    p.add_argument("--synthetic", action="store_true",
                   help="use the synthetic concept embedder and bundle ground truth")
    p.add_argument("--seed", type=int, default=None,
                   help="synthetic embedder seed (default: bundle meta seed)")
    p.add_argument("--noise-sigma", type=float, default=0.0,
                   help="Gaussian noise on synthetic embeddings")
    p.add_argument("--no-merge", action="store_true", help="skip semantic merging")
    p.add_argument("--json", action="store_true", help="also write the JSON text form")
    _add_config_flags(p)

    p = sub.add_parser("query", help="rank tree nodes against a text query")
    p.add_argument("tree")
    p.add_argument("--text")
    p.add_argument("--vocab", help="closed-vocabulary file: one label per line")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--text-archive", help="EMB1 archive holding text embeddings")
    p.add_argument("--heatmap", help="write a heatmap PLY here")
    p.add_argument("--cloud", help="cloud PLY (needed with --heatmap)")
    _add_config_flags(p)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--semantic", action="store_true",
                   help="per-point label files instead of instances")
    p.add_argument("--classes", type=int, help="label count for --semantic")

    p = sub.add_parser("serve", help="serve a tree over HTTP")
    p.add_argument("tree")
    p.add_argument("--cloud", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--text-archive")
    _add_config_flags(p)

    return parser


def _cmd_synth(args) -> int:
    scene = synthkit.load_scene_spec(_resolve(args.spec))
    sample = synthkit.generate_scene(scene, args.seed, feature_dim=args.feature_dim)
    synthkit.write_bundle(sample, args.out, args.seed)
    print(f"wrote bundle {args.out}: {sample.cloud.n} points, "
          f"{len(sample.tree.objects)} objects, {len(sample.tree.segments)} parts")
    return 0


def _cmd_segment(args) -> int:
    config = _config_from_args(args)
    bundle = pipeline.load_bundle(_resolve(args.scene_dir), masks_path=args.masks)
    if bundle.object_masks is None:
        raise FormatError(f"no object masks at {args.masks or 'objects.json'}")
    pipeline.ensure_normals(bundle)
    _, segments_per_object = pipeline.predict_segments(
        bundle.cloud, bundle.object_masks, config
    )
    flat = []
    for obj_pos, segments in enumerate(segments_per_object):
        for seg in segments:
            seg.parent_object = obj_pos
            flat.append(seg)
    masks_io.save_segments(flat, args.out)
    print(f"wrote {len(flat)} segments for {len(segments_per_object)} objects to {args.out}")
    return 0


def _cmd_crops(args) -> int:
    config = _config_from_args(args)
    bundle = pipeline.load_bundle(_resolve(args.scene_dir), masks_path=args.masks)
    if bundle.object_masks is None:
        raise FormatError(f"no object masks at {args.masks or 'objects.json'}")
    pipeline.ensure_normals(bundle)
    resolved, segments = pipeline.predict_segments(bundle.cloud, bundle.object_masks, config)
    from .model import build_tree

    tree = build_tree(resolved, segments, n_points=bundle.cloud.n,
                      scene_id=bundle.scene_id, feature_dim=config.feature_dim)
    records = pipeline.attach_object_features(
        tree, bundle, config, lambda n, f, l: np.zeros(config.feature_dim, dtype=np.float32)
    )
    crops_io.write_crop_manifest(records, args.out)
    print(f"wrote {len(records)} crops to {args.out}")
    return 0


def _cmd_build(args) -> int:
    config = _config_from_args(args)
    bundle = pipeline.load_bundle(_resolve(args.scene_dir), masks_path=args.masks)
    if args.synthetic:
        if bundle.gt_objects is None:
            raise FormatError("--synthetic needs gt_hierarchy.json in the bundle")
        seed = args.seed if args.seed is not None else int(bundle.meta.get("seed", 0))
        embedder = SyntheticConceptEmbedder(seed, config.feature_dim)
        crop_embedder = pipeline.synthetic_crop_embedder(
            embedder, bundle.gt_objects, sigma=args.noise_sigma, noise_seed=seed
        )
        if bundle.label_maps is None:
            raise FormatError("bundle has no 2D-segment label maps")
        seg2d = synthkit.synthetic_seg2d_embeddings(
            synthkit.part_concepts(bundle.gt_objects),
            bundle.label_maps,
            [f.frame_id for f in bundle.frames],
            embedder,
            sigma=args.noise_sigma,
            noise_seed=seed,
        )
    else:
        if not args.crop_archive or not args.seg2d_archive:
            raise UsageError("build needs --crop-archive and --seg2d-archive, or --synthetic")
        crop_archive = archive_io.read_embedding_archive(_resolve(args.crop_archive))
        seg2d_archive = archive_io.read_embedding_archive(_resolve(args.seg2d_archive))
        provider = ArchiveProvider(crop_archive=crop_archive)
        crop_embedder = pipeline.archive_crop_embedder(provider)
        seg2d = seg2d_archive.records

    tree, _ = pipeline.build_featured_tree(
        bundle, config, crop_embedder, seg2d, merge=not args.no_merge
    )
    treefile.write_tree(tree, args.out)
    if args.json:
        treefile.write_tree_json(tree, str(args.out) + ".json")
    print(f"wrote tree {args.out}: {len(tree.objects)} objects, "
          f"{len(tree.segments)} segments, D={tree.feature_dim}")
    return 0


def _text_provider(args, dim: int):
    if args.synthetic:
        return SyntheticConceptEmbedder(args.seed, dim)
    if args.text_archive:
        return ArchiveProvider(text_archive=archive_io.read_embedding_archive(
            _resolve(args.text_archive)))
    raise UsageError("need --synthetic or --text-archive to embed text")


def _cmd_query(args) -> int:
    config = _config_from_args(args)
    tree = treefile.read_tree(_resolve(args.tree))
    provider = _text_provider(args, tree.feature_dim)
    index = TreeIndex(tree)

    if args.vocab:
        labels = [ln.strip() for ln in Path(args.vocab).read_text().splitlines() if ln.strip()]
        vocab = [(label, provider.embed_text(label)) for label in labels]
        level = "object" if config.score_mode == "object_only" else "segment"
        assigned = assign_vocabulary(tree, vocab, level=level)
        for node_id in sorted(assigned):
            print(f"{node_id}\t{level}\t{assigned[node_id]}")
        return 0

    if not args.text:
        raise UsageError("query needs --text or --vocab")
    result = score_nodes(provider.embed_text(args.text), index, config.score_mode)
    ranked = top_k(result, args.k)
    for rank, hit in enumerate(ranked.hits, start=1):
        node = (tree.get_segment(hit.node_id) if hit.kind == "segment"
                else tree.get_object(hit.node_id))
        print(f"{rank}\t{hit.node_id}\t{hit.kind}\t{hit.score:.6f}\t{len(node.mask)}")
    if args.heatmap:
        if not args.cloud:
            raise UsageError("--heatmap needs --cloud")
        cloud = load_point_cloud(_resolve(args.cloud))
        scores = heatmap(result, tree, cloud.n)
        heatmap_io.write_heatmap_ply(cloud, scores, args.heatmap)
        print(f"wrote heatmap {args.heatmap}")
    return 0


def _cmd_eval(args) -> int:
    if args.semantic:
        pred = masks_io.load_point_labels(_resolve(args.pred))
        gt = masks_io.load_point_labels(_resolve(args.gt))
        classes = args.classes or int(max(pred.max(initial=0), gt.max(initial=0))) + 1
        miou, acc = miou_acc(pred, gt, classes)
        print(json.dumps({"miou": miou, "acc": acc}))
        return 0
    preds = masks_io.load_pred_instances(_resolve(args.pred))
    gts = masks_io.load_gt_instances(_resolve(args.gt))
    report = ap_suite(preds, gts)
    print(json.dumps({
        "ap": report.ap, "ap50": report.ap50, "ap25": report.ap25,
        "per_category": report.per_category,
    }, indent=2, sort_keys=True))
    return 0


def _cmd_serve(args) -> int:
    from .service import SceneService

    config = _config_from_args(args)
    tree = treefile.read_tree(_resolve(args.tree))
    cloud = load_point_cloud(_resolve(args.cloud))
    provider = None
    if args.synthetic or args.text_archive:
        provider = _text_provider(args, tree.feature_dim)
    service = SceneService(tree, cloud, provider=provider, host=args.host, port=args.port,
                           default_mode=config.score_mode)
    service.start()
    print(f"serving scene {tree.scene_id!r} on http://{args.host}:{service.port}")
    try:
        service.join()
    except KeyboardInterrupt:
        service.stop()
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "segment": _cmd_segment,
    "crops": _cmd_crops,
    "build": _cmd_build,
    "query": _cmd_query,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
