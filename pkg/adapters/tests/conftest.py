import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))  # repo root for `adapters`

from scenetree import synthkit


@pytest.fixture(scope="session")
def bundle_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("adapter_bundle")
    scene = synthkit.template_scene("tower")
    sample = synthkit.generate_scene(scene, seed=11)
    synthkit.write_bundle(sample, out, seed=11)
    return out
