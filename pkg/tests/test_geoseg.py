import numpy as np
import pytest

from oracles import brute_knn_pairs, labels_to_partition, naive_felzenszwalb
from scenetree.config import PipelineConfig
from scenetree.errors import ValidationError
from scenetree.geoseg import (
    AdjacencyGraph,
    build_adjacency,
    edge_weight,
    estimate_normals,
    felzenszwalb,
    segment_object,
)
from scenetree.model import InstanceMask, PointCloud


def plane_cloud(n_side, axis=2, offset=0.0, spacing=0.05, origin=(0.0, 0.0)):
    """A flat axis-aligned grid with constant normals."""
    u, v = np.meshgrid(np.arange(n_side), np.arange(n_side), indexing="ij")
    free = [a for a in range(3) if a != axis]
    pts = np.zeros((n_side * n_side, 3))
    pts[:, free[0]] = origin[0] + u.ravel() * spacing
    pts[:, free[1]] = origin[1] + v.ravel() * spacing
    pts[:, axis] = offset
    normals = np.zeros_like(pts)
    normals[:, axis] = 1.0
    return pts, normals


# -- edge weights ---------------------------------------------------------------

def test_identical_normals_zero_weight():
    n = np.array([0.0, 0.0, 1.0])
    assert edge_weight(n, n, np.zeros(3), np.array([1.0, 0.0, 0.0])) == 0.0
    assert edge_weight(n, n, np.zeros(3), np.array([0.0, 0.0, -1.0])) == 0.0


def test_orthogonal_normals_concave():
    n_i = np.array([0.0, 0.0, 1.0])
    n_j = np.array([1.0, 0.0, 0.0])
    p_i = np.zeros(3)
    p_j = np.array([1.0, 0.0, 0.5])  # dot(n_i, p_j - p_i) = 0.5 >= 0: concave
    assert edge_weight(n_i, n_j, p_i, p_j) == 1.0


def test_orthogonal_normals_convex_squares_to_same():
    n_i = np.array([0.0, 0.0, 1.0])
    n_j = np.array([1.0, 0.0, 0.0])
    p_j = np.array([1.0, 0.0, -0.5])  # below the tangent plane: convex
    assert edge_weight(n_i, n_j, np.zeros(3), p_j) == 1.0


def test_sixty_degree_convex():
    n_i = np.array([0.0, 0.0, 1.0])
    n_j = np.array([np.sin(np.pi / 3), 0.0, np.cos(np.pi / 3)])  # 60 degrees
    p_j = np.array([1.0, 0.0, -0.1])
    w = edge_weight(n_i, n_j, np.zeros(3), p_j)
    assert w == pytest.approx(0.25, abs=1e-12)


# -- adjacency ------------------------------------------------------------------

def test_mesh_adjacency_two_triangles():
    positions = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
    normals = np.tile([0.0, 0.0, 1.0], (4, 1))
    cloud = PointCloud(positions, normals=normals, faces=np.array([[0, 1, 2], [1, 2, 3]]))
    graph = build_adjacency(cloud, InstanceMask([0, 1, 2, 3]))
    assert len(graph.edges) == 5  # shared edge (1,2) counted once


def test_mesh_edges_clipped_to_mask():
    positions = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
    normals = np.tile([0.0, 0.0, 1.0], (4, 1))
    cloud = PointCloud(positions, normals=normals, faces=np.array([[0, 1, 2], [1, 2, 3]]))
    graph = build_adjacency(cloud, InstanceMask([0, 1, 2]))
    assert len(graph.edges) == 3
    assert graph.edges.max() <= 2


def test_knn_graph_matches_brute_force(rng):
    points = rng.uniform(0, 1, size=(60, 3))
    normals = rng.normal(size=(60, 3))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    cloud = PointCloud(points, normals=normals)
    mask = InstanceMask(np.arange(60))
    graph = build_adjacency(cloud, mask, k=10)
    got = {(int(i), int(j)) for i, j in graph.edges}
    assert got == brute_knn_pairs(points, 10)
    # symmetry + degree bound
    degree = np.zeros(60, dtype=int)
    for i, j in graph.edges:
        degree[i] += 1
        degree[j] += 1
    assert degree.min() >= 10


def test_mask_too_small():
    cloud = PointCloud(np.zeros((3, 3)), normals=np.tile([0.0, 0.0, 1.0], (3, 1)))
    with pytest.raises(ValidationError, match="2 points"):
        build_adjacency(cloud, InstanceMask([0]))


def test_adjacency_requires_normals():
    cloud = PointCloud(np.random.default_rng(0).uniform(size=(5, 3)))
    with pytest.raises(ValidationError, match="normals"):
        build_adjacency(cloud, InstanceMask([0, 1, 2]))


# -- felzenszwalb ----------------------------------------------------------------

def grid_graph(n_side, weight=0.0, node_offset=0):
    """4-connected grid with constant edge weight."""
    idx = np.arange(n_side * n_side).reshape(n_side, n_side) + node_offset
    edges = []
    for r in range(n_side):
        for c in range(n_side):
            if c + 1 < n_side:
                edges.append((idx[r, c], idx[r, c + 1]))
            if r + 1 < n_side:
                edges.append((idx[r, c], idx[r + 1, c]))
    edges = np.array(edges)
    edges = np.sort(edges, axis=1)
    return idx.ravel(), edges, np.full(len(edges), float(weight))


def test_flat_plane_single_segment():
    nodes, edges, weights = grid_graph(23)  # 529 vertices, all weights 0
    labels = felzenszwalb(AdjacencyGraph(nodes, edges, weights), k=0.05, min_size=100)
    assert len(np.unique(labels)) == 1


def test_two_perpendicular_planes_stay_separate():
    nodes_a, edges_a, w_a = grid_graph(20)                    # 400 vertices
    nodes_b, edges_b, w_b = grid_graph(20, node_offset=400)   # 400 vertices
    seam = np.array([[i, 400 + i] for i in range(20)])
    edges = np.concatenate([edges_a, edges_b, seam])
    weights = np.concatenate([w_a, w_b, np.ones(20)])
    nodes = np.concatenate([nodes_a, nodes_b])
    labels = felzenszwalb(AdjacencyGraph(nodes, edges, weights), k=0.05, min_size=100)
    assert len(np.unique(labels)) == 2
    assert len(np.unique(labels[:400])) == 1
    assert len(np.unique(labels[400:])) == 1


def test_small_island_absorbed():
    nodes_a, edges_a, w_a = grid_graph(23)                    # 529 vertices
    nodes_b, edges_b, w_b = grid_graph(7, node_offset=529)    # 49-vertex island
    bridge = np.array([[0, 529]])
    nodes = np.concatenate([nodes_a, nodes_b])
    edges = np.concatenate([edges_a, edges_b, bridge])
    weights = np.concatenate([w_a, w_b, [1.5]])
    labels = felzenszwalb(AdjacencyGraph(nodes, edges, weights), k=0.05, min_size=100)
    assert len(np.unique(labels)) == 1


def test_empty_graph_rejected():
    with pytest.raises(ValidationError, match="empty"):
        felzenszwalb(AdjacencyGraph(np.array([], dtype=np.int64),
                                    np.zeros((0, 2), dtype=np.int64), np.zeros(0)),
                     k=0.05, min_size=1)


def random_graph(rng, max_nodes=500):
    n = int(rng.integers(2, max_nodes + 1))
    nodes = np.arange(n)
    # spanning tree plus random extras so the graph is usually connected
    extra = int(rng.integers(0, 3 * n))
    tree_edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    extra_edges = rng.integers(0, n, size=(extra, 2))
    edges = np.array(tree_edges + [tuple(e) for e in extra_edges if e[0] != e[1]])
    edges = np.unique(np.sort(edges, axis=1), axis=0)
    weights = rng.uniform(0.0, 1.0, size=len(edges))
    return nodes, edges, weights


def test_matches_naive_reference_on_random_graphs():
    rng = np.random.default_rng(42)
    for trial in range(30):
        nodes, edges, weights = random_graph(rng, max_nodes=120)
        k = float(rng.choice([0.05, 0.3, 1.0]))
        min_size = int(rng.choice([1, 5, 20]))
        labels = felzenszwalb(AdjacencyGraph(nodes, edges, weights), k=k, min_size=min_size)
        assert labels_to_partition(nodes, labels) == naive_felzenszwalb(
            nodes, edges, weights, k, min_size
        ), f"trial {trial} diverged"


def test_k_monotonicity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        nodes, edges, weights = random_graph(rng, max_nodes=150)
        coarse = felzenszwalb(AdjacencyGraph(nodes, edges, weights), k=0.5, min_size=1)
        fine = felzenszwalb(AdjacencyGraph(nodes, edges, weights), k=0.05, min_size=1)
        assert len(np.unique(coarse)) <= len(np.unique(fine))


def test_determinism():
    rng = np.random.default_rng(3)
    nodes, edges, weights = random_graph(rng)
    graph = AdjacencyGraph(nodes, edges, weights)
    a = felzenszwalb(graph, k=0.1, min_size=10)
    b = felzenszwalb(graph, k=0.1, min_size=10)
    assert np.array_equal(a, b)


# -- segment_object ----------------------------------------------------------------

def test_l_shaped_object_two_segments():
    pts_a, nrm_a = plane_cloud(20, axis=2, offset=0.0)
    pts_b, nrm_b = plane_cloud(20, axis=1, offset=0.0)
    cloud = PointCloud(np.concatenate([pts_a, pts_b]),
                       normals=np.concatenate([nrm_a, nrm_b]))
    config = PipelineConfig()
    segments = segment_object(cloud, InstanceMask(np.arange(800)), config)
    assert len(segments) == 2
    sizes = sorted(len(s) for s in segments)
    assert sizes == [400, 400]


def test_tiny_object_single_segment():
    pts, nrm = plane_cloud(9)  # 81 points < min_size
    cloud = PointCloud(pts, normals=nrm)
    config = PipelineConfig()
    segments = segment_object(cloud, InstanceMask(np.arange(81)), config)
    assert len(segments) == 1
    assert len(segments[0]) == 81


def test_segments_partition_mask(rng):
    pts_a, nrm_a = plane_cloud(15, axis=2)
    pts_b, nrm_b = plane_cloud(15, axis=0, origin=(0.8, 0.0))
    cloud = PointCloud(np.concatenate([pts_a, pts_b]),
                       normals=np.concatenate([nrm_a, nrm_b]))
    mask = InstanceMask(np.arange(450))
    segments = segment_object(cloud, mask, PipelineConfig(), contributor_start=5)
    union = np.sort(np.concatenate([s.point_indices for s in segments]))
    assert np.array_equal(union, mask.point_indices)
    contribs = sorted(c for s in segments for c in s.contributor_ids)
    assert contribs == list(range(5, 5 + len(segments)))


def test_estimate_normals_flat_plane(rng):
    pts, _ = plane_cloud(12)
    pts = pts + rng.normal(scale=1e-6, size=pts.shape)
    cloud = PointCloud(pts)
    estimated = estimate_normals(cloud, orient_toward=np.array([0.0, 0.0, 10.0]))
    assert np.allclose(np.abs(estimated.normals[:, 2]), 1.0, atol=1e-3)
    assert (estimated.normals[:, 2] > 0).all()  # oriented toward the reference
