"""Format-level checks: every adapter output validates against the core parsers."""

import json

import numpy as np
import pytest

from adapters import embed_crops, embed_texts, extract_2d_segments, extract_object_masks
from scenetree.cli import main as scenetree_main
from scenetree.io.archive import read_embedding_archive
from scenetree.io.crops import read_crop_manifest
from scenetree.io.masks import load_object_masks, save_object_masks
from scenetree.io.pgm import read_label_map, read_pgm16
from scenetree.io.ply import load_point_cloud


def test_object_masks_validate_and_round_trip(bundle_dir, tmp_path):
    out = tmp_path / "masks.json"
    assert extract_object_masks.main([str(bundle_dir), "--out", str(out)]) == 0
    masks = load_object_masks(out)
    cloud = load_point_cloud(bundle_dir / "cloud.ply")
    assert len(masks) == 1
    assert masks[0].point_indices[-1] < cloud.n
    assert 0.0 <= masks[0].confidence <= 1.0
    first = out.read_bytes()
    save_object_masks(masks, out)
    assert out.read_bytes() == first
    provenance = json.loads((tmp_path / "masks.json.provenance.json").read_text())
    assert provenance["tool"] == "extract_object_masks"
    assert provenance["backend"] == "stub"


def test_object_masks_empty_prediction_still_valid(bundle_dir, tmp_path):
    out = tmp_path / "empty.json"
    assert extract_object_masks.main([str(bundle_dir), "--out", str(out), "--limit", "0"]) == 0
    assert load_object_masks(out) == []


def test_2d_segments_formats(bundle_dir, tmp_path):
    labels_dir = tmp_path / "labels"
    archive_path = tmp_path / "seg2d.emb"
    assert extract_2d_segments.main([
        str(bundle_dir), "--out-labels", str(labels_dir),
        "--out-archive", str(archive_path), "--grid", "3",
    ]) == 0

    archive = read_embedding_archive(archive_path)
    assert archive.dim == 1152

    from scenetree.io.frames import load_frames

    frames = load_frames(bundle_dir / "frames.jsonl")
    for frame in frames:
        path = labels_dir / f"{frame.frame_id}.pgm"
        labels = read_label_map(path)
        assert labels.shape == (frame.height, frame.width)
        raw = read_pgm16(path)
        assert raw.min() >= 1  # file value 0 stays reserved for unlabeled
        # every label referenced by the map has an archive record
        for label in np.unique(labels):
            assert f"{frame.frame_id}/{int(label)}" in archive.records
    assert len(archive) == len(frames) * 9  # 3x3 grid per frame


def test_embed_crops_exact_key_coverage(bundle_dir, tmp_path):
    manifest = tmp_path / "crops.jsonl"
    assert scenetree_main(["crops", str(bundle_dir), "--out", str(manifest)]) == 0
    out = tmp_path / "crops.emb"
    assert embed_crops.main([str(manifest), "--out", str(out)]) == 0
    archive = read_embedding_archive(out)
    manifest_keys = [r.key for r in read_crop_manifest(manifest)]
    assert list(archive.records) == manifest_keys  # no missing, no extra, same order
    first = out.read_bytes()
    assert embed_crops.main([str(manifest), "--out", str(out)]) == 0
    assert out.read_bytes() == first  # identical rerun


def test_embed_texts_keys_are_lines(tmp_path):
    vocab = tmp_path / "vocab.txt"
    vocab.write_text("seat of a chair\nwooden leg\n\n")
    out = tmp_path / "texts.emb"
    assert embed_texts.main([str(vocab), "--out", str(out)]) == 0
    archive = read_embedding_archive(out)
    assert list(archive.records) == ["seat of a chair", "wooden leg"]
    assert archive.dim == 1152
    norms = [np.linalg.norm(v.astype(np.float64)) for v in archive.records.values()]
    assert np.allclose(norms, 1.0, atol=1e-6)


def test_adapter_archives_feed_the_build(bundle_dir, tmp_path):
    """A full archive-mode build from adapter outputs produces a valid tree."""
    manifest = tmp_path / "crops.jsonl"
    assert scenetree_main(["crops", str(bundle_dir), "--out", str(manifest)]) == 0
    crops = tmp_path / "crops.emb"
    assert embed_crops.main([str(manifest), "--out", str(crops)]) == 0
    labels_dir = bundle_dir / "labels"  # bundle labels already exist; reuse bundle seg2d
    tree_path = tmp_path / "tree.hst"
    assert scenetree_main([
        "build", str(bundle_dir),
        "--crop-archive", str(crops),
        "--seg2d-archive", str(bundle_dir / "seg2d_embeddings.emb"),
        "--out", str(tree_path),
    ]) == 0
    from scenetree.io.treefile import read_tree
    from scenetree.model import validate_tree

    tree = read_tree(tree_path)
    assert validate_tree(tree) == []
    assert labels_dir.is_dir()


def test_external_backends_fail_informatively(bundle_dir, tmp_path):
    with pytest.raises(RuntimeError, match="--backend stub"):
        extract_object_masks.main([
            str(bundle_dir), "--out", str(tmp_path / "x.json"), "--backend", "mask-network",
        ])
    with pytest.raises(RuntimeError, match="--backend stub"):
        embed_texts.main([
            str(tmp_path / "v.txt"), "--out", str(tmp_path / "x.emb"), "--backend", "vlm",
        ])
