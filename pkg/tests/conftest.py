import os

# Pin BLAS to one thread before numpy loads anywhere: the latency checks
# are specified single-threaded, and results stay reproducible.
for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from scenetree import pipeline, synthkit
from scenetree.config import PipelineConfig
from scenetree.embed import SyntheticConceptEmbedder


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def chair_bundle_dir(tmp_path_factory):
    """A generated single-chair scene bundle, shared across tests."""
    out = tmp_path_factory.mktemp("chair_bundle")
    scene = synthkit.template_scene("chair")
    sample = synthkit.generate_scene(scene, seed=7)
    synthkit.write_bundle(sample, out, seed=7)
    return out


@pytest.fixture(scope="session")
def chair_built(chair_bundle_dir):
    """The chair bundle loaded and built into a featured, merged tree."""
    bundle = pipeline.load_bundle(chair_bundle_dir)
    config = PipelineConfig()
    embedder = SyntheticConceptEmbedder(7, config.feature_dim)
    tree, records = pipeline.build_featured_tree(
        bundle,
        config,
        pipeline.synthetic_crop_embedder(embedder, bundle.gt_objects),
        bundle.seg2d_archive.records,
    )
    return bundle, config, embedder, tree
