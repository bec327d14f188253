import numpy as np
import pytest

from scenetree.errors import FormatError, ValidationError
from scenetree.io.heatmap import colormap, normalize_scores, write_heatmap_ply
from scenetree.io.ply import load_point_cloud, save_point_cloud
from scenetree.model import PointCloud

ASCII_PLY = """ply
format ascii 1.0
element vertex 3
property float x
property float y
property float z
end_header
0.0 0.0 0.0
1.0 0.0 0.0
0.0 1.0 0.0
"""


def test_ascii_three_vertices(tmp_path):
    path = tmp_path / "tri.ply"
    path.write_text(ASCII_PLY)
    cloud = load_point_cloud(path)
    assert cloud.n == 3
    assert cloud.faces is None and cloud.normals is None
    assert np.allclose(cloud.positions[1], [1, 0, 0])


def random_cloud(rng, n=10_000, faces=True):
    normals = rng.normal(size=(n, 3))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    return PointCloud(
        positions=rng.uniform(-5, 5, size=(n, 3)),
        normals=normals,
        colors=rng.integers(0, 256, size=(n, 3)) / 255.0,
        faces=rng.integers(0, n, size=(40, 3)) if faces else None,
    )


def test_binary_round_trip_bit_exact(tmp_path, rng):
    cloud = random_cloud(rng)
    path = tmp_path / "cloud.ply"
    save_point_cloud(cloud, path)
    loaded = load_point_cloud(path)
    assert np.array_equal(loaded.positions, cloud.positions)
    assert np.array_equal(loaded.normals, cloud.normals)
    assert np.array_equal(loaded.colors, cloud.colors)
    assert np.array_equal(loaded.faces, cloud.faces)


def test_ascii_round_trip(tmp_path, rng):
    cloud = random_cloud(rng, n=100, faces=False)
    path = tmp_path / "cloud_ascii.ply"
    save_point_cloud(cloud, path, binary=False)
    loaded = load_point_cloud(path)
    assert np.allclose(loaded.positions, cloud.positions, atol=1e-6)
    assert np.array_equal(loaded.colors, cloud.colors)


def test_truncated_vertex_count(tmp_path):
    bad = ASCII_PLY.replace("element vertex 3", "element vertex 10")
    path = tmp_path / "bad.ply"
    path.write_text(bad)
    with pytest.raises(FormatError, match="truncated"):
        load_point_cloud(path)


def test_truncated_binary_payload(tmp_path, rng):
    cloud = random_cloud(rng, n=50, faces=False)
    path = tmp_path / "trunc.ply"
    save_point_cloud(cloud, path)
    data = path.read_bytes()
    path.write_bytes(data[:-10])
    with pytest.raises(FormatError, match="truncated"):
        load_point_cloud(path)


def test_big_endian_rejected(tmp_path):
    path = tmp_path / "be.ply"
    path.write_text(ASCII_PLY.replace("ascii", "binary_big_endian"))
    with pytest.raises(FormatError, match="big-endian"):
        load_point_cloud(path)


def test_malformed_header(tmp_path):
    path = tmp_path / "noend.ply"
    path.write_text("ply\nformat ascii 1.0\nelement vertex 1\n")
    with pytest.raises(FormatError, match="end_header"):
        load_point_cloud(path)


# -- heatmaps -------------------------------------------------------------------

def test_colormap_endpoints_and_mid():
    rgb = colormap(np.array([0.0, 0.5, 1.0]))
    assert rgb[0].tolist() == [0, 0, 255]      # pure blue
    assert rgb[1].tolist() == [255, 255, 255]  # mid color
    assert rgb[2].tolist() == [255, 0, 0]      # pure red


def test_heatmap_uniform_scores_mid_color(tmp_path, rng):
    cloud = random_cloud(rng, n=20, faces=False)
    path = tmp_path / "uniform.ply"
    write_heatmap_ply(cloud, np.full(20, 3.5), path)
    loaded = load_point_cloud(path)
    expected = colormap(np.full(20, 0.5)) / 255.0
    assert np.allclose(loaded.colors, expected, atol=1e-12)


def test_heatmap_matches_recomputed_colors(tmp_path, rng):
    cloud = random_cloud(rng, n=64, faces=False)
    scores = rng.normal(size=64)
    path = tmp_path / "random.ply"
    write_heatmap_ply(cloud, scores, path)
    loaded = load_point_cloud(path)
    expected = colormap(normalize_scores(scores)).astype(np.float64) / 255.0
    assert np.array_equal(np.rint(loaded.colors * 255), np.rint(expected * 255))


def test_heatmap_binary_extremes(tmp_path, rng):
    cloud = random_cloud(rng, n=2, faces=False)
    path = tmp_path / "extremes.ply"
    write_heatmap_ply(cloud, np.array([0.0, 1.0]), path)
    loaded = load_point_cloud(path)
    assert np.rint(loaded.colors[0] * 255).tolist() == [0, 0, 255]
    assert np.rint(loaded.colors[1] * 255).tolist() == [255, 0, 0]


def test_heatmap_length_mismatch(tmp_path, rng):
    cloud = random_cloud(rng, n=4, faces=False)
    with pytest.raises(ValidationError, match="length"):
        write_heatmap_ply(cloud, np.zeros(3), tmp_path / "x.ply")
