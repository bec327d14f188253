"""Search over a featured scene tree.

Node features are L2-normalized once when an index is built, so a query is
a single dot-product pass over a float32 matrix plus a sort; zero vectors
(unobserved nodes) stay zero and therefore score 0 against everything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .metrics import PredInstance
from .model import FeatureVector, SceneTree

_NORM_EPS = 1e-12


def _values(vector) -> np.ndarray:
    if isinstance(vector, FeatureVector):
        return vector.values
    return np.asarray(vector)


def cosine(a, b) -> float:
    """Cosine similarity; defined as 0 when either vector is (near) zero."""
    av = _values(a).astype(np.float64)
    bv = _values(b).astype(np.float64)
    if av.shape != bv.shape:
        raise ValidationError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    na = np.linalg.norm(av)
    nb = np.linalg.norm(bv)
    if na < _NORM_EPS or nb < _NORM_EPS:
        return 0.0
    return float(np.dot(av, bv) / (na * nb))


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix.astype(np.float64), axis=1)
    safe = np.where(norms < _NORM_EPS, 1.0, norms)
    return (matrix / safe[:, None]).astype(np.float32)


@dataclass
class QueryHit:
    node_id: int
    kind: str        # "object" | "segment"
    score: float


@dataclass
class QueryResult:
    """Ranked nodes, array-backed so scoring 10k nodes stays cheap."""

    node_ids: np.ndarray
    scores: np.ndarray
    kind: str

    def __len__(self) -> int:
        return len(self.node_ids)

    @property
    def hits(self) -> list[QueryHit]:
        return [
            QueryHit(int(n), self.kind, float(s))
            for n, s in zip(self.node_ids.tolist(), self.scores.tolist())
        ]


class TreeIndex:
    """Pre-normalized feature matrices for fast repeated scoring."""

    def __init__(self, tree: SceneTree):
        self.tree = tree
        self.dim = tree.feature_dim
        self.object_ids = np.array([n.node_id for n in tree.objects], dtype=np.int64)
        self.segment_ids = np.array([n.node_id for n in tree.segments], dtype=np.int64)
        obj_rows = (
            np.stack([n.feature.values for n in tree.objects])
            if tree.objects else np.zeros((0, self.dim), dtype=np.float32)
        )
        seg_rows = (
            np.stack([n.feature.values for n in tree.segments])
            if tree.segments else np.zeros((0, self.dim), dtype=np.float32)
        )
        self.object_matrix = _normalize_rows(obj_rows)
        self.segment_matrix = _normalize_rows(seg_rows)
        obj_pos = {int(node_id): i for i, node_id in enumerate(self.object_ids)}
        self.segment_parent_pos = np.array(
            [obj_pos[n.mask.parent_object] for n in tree.segments], dtype=np.int64
        )

    def _query_vector(self, e_txt) -> np.ndarray:
        q = _values(e_txt).astype(np.float64).reshape(-1)
        if len(q) != self.dim:
            raise ValidationError(f"query has dim {len(q)}, index expects {self.dim}")
        norm = np.linalg.norm(q)
        if norm < _NORM_EPS:
            return np.zeros(self.dim, dtype=np.float32)
        return (q / norm).astype(np.float32)

    def score(self, e_txt, mode: str) -> tuple[np.ndarray, np.ndarray, str]:
        """Raw (ids, scores, kind) before sorting."""
        q = self._query_vector(e_txt)
        obj_cos = self.object_matrix @ q
        if mode == "object_only":
            return self.object_ids, obj_cos.astype(np.float64), "object"
        seg_cos = (self.segment_matrix @ q).astype(np.float64)
        if mode == "segment_only":
            return self.segment_ids, seg_cos, "segment"
        parent_cos = obj_cos.astype(np.float64)[self.segment_parent_pos]
        if mode == "avg":
            return self.segment_ids, (seg_cos + parent_cos) / 2.0, "segment"
        if mode == "max":
            return self.segment_ids, np.maximum(seg_cos, parent_cos), "segment"
        raise ValidationError(f"unknown score mode {mode!r}")


def score_nodes(e_txt, tree_or_index, mode: str = "avg") -> QueryResult:
    """Rank nodes against a text embedding.

    avg / max combine each segment's cosine with its parent object's;
    segment_only and object_only use a single level. Results are sorted by
    descending score, ties by ascending node id.
    """
    index = tree_or_index if isinstance(tree_or_index, TreeIndex) else TreeIndex(tree_or_index)
    ids, scores, kind = index.score(e_txt, mode)
    order = np.lexsort((ids, -scores))
    return QueryResult(node_ids=ids[order], scores=scores[order], kind=kind)


def top_k(result: QueryResult, k: int) -> QueryResult:
    if k < 1:
        raise ValidationError("k must be >= 1")
    return QueryResult(
        node_ids=result.node_ids[:k], scores=result.scores[:k], kind=result.kind
    )


def heatmap(result: QueryResult, tree: SceneTree, n_points: int) -> np.ndarray:
    """Per-point scores: each point takes its segment's score.

    Points outside every object receive the minimum observed score so they
    render as the coldest color.
    """
    if len(result) == 0:
        return np.zeros(n_points)
    if result.kind != "segment":
        raise ValidationError("heatmap needs a segment-level result")
    scores = np.full(n_points, float(result.scores.min()))
    for node_id, score in zip(result.node_ids.tolist(), result.scores.tolist()):
        node = tree.get_segment(node_id)
        scores[node.mask.point_indices] = score
    return scores


def assign_vocabulary(tree: SceneTree, vocab, level: str = "segment") -> dict[int, str]:
    """Closed-vocabulary assignment: each node gets its argmax-cosine label.

    `vocab` is a sequence of (label, embedding); ties resolve to the first
    label in vocabulary order.
    """
    if not vocab:
        raise ValidationError("vocabulary must be non-empty")
    if level not in ("object", "segment"):
        raise ValidationError(f"unknown level {level!r}")
    labels = [label for label, _ in vocab]
    matrix = _normalize_rows(
        np.stack([_values(vec).astype(np.float32) for _, vec in vocab])
    )
    if matrix.shape[1] != tree.feature_dim:
        raise ValidationError(
            f"vocabulary dim {matrix.shape[1]} does not match tree dim {tree.feature_dim}"
        )
    nodes = tree.objects if level == "object" else tree.segments
    out: dict[int, str] = {}
    for node in nodes:
        feat = node.feature.values.astype(np.float64)
        norm = np.linalg.norm(feat)
        if norm < _NORM_EPS:
            scores = np.zeros(len(labels))
        else:
            scores = matrix.astype(np.float64) @ (feat / norm)
        out[node.node_id] = labels[int(np.argmax(scores))]
    return out


def instances_from_result(
    result: QueryResult, tree: SceneTree, category: str
) -> list[PredInstance]:
    """Turn a ranked result into instance predictions for evaluation.

    Every node appears once with confidence equal to its score; the PR
    sweep over confidences happens inside the AP computation. A score of
    exactly 0.0 is the defined similarity of a zero (unobserved) feature
    vector, so such nodes carry no signal and are not emitted.
    """
    get_node = tree.get_segment if result.kind == "segment" else tree.get_object
    instances = []
    for node_id, score in zip(result.node_ids.tolist(), result.scores.tolist()):
        if score == 0.0:
            continue
        instances.append(
            PredInstance(
                category=category,
                point_indices=get_node(node_id).mask.point_indices,
                confidence=score,
            )
        )
    return instances
