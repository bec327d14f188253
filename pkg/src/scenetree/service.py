"""A small concurrent HTTP service over one loaded scene index.

The index is immutable after startup and shared read-only across request
threads, so concurrent queries return exactly the sequential results.

Endpoints (JSON unless noted):
    GET  /health        {"ok": true}
    GET  /scene         {"scene_id", "n_points", "object_count",
                         "segment_count", "dim"}
    GET  /scene/points  binary stream: u32 N, then N x (3 f32 xyz + 3 u8 rgb),
                        little-endian, content-type application/octet-stream
    GET  /node/{id}     {"id", "kind", "point_indices", "feature_norm"}
    POST /query         {"text" | "embedding": [D floats], "mode"?, "k"?,
                         "include_heatmap"?}
                        -> {"results": [{"id","kind","score","point_count"}],
                            "heatmap"? : {"min","max","values_b64"}}

Heatmaps travel u8-quantized with their float range; the dequantization
error is at most (max-min)/510 per point. A text query without a text
provider yields 503; malformed bodies, unknown modes, or wrong embedding
dimensions yield 400; unknown nodes 404.
"""

from __future__ import annotations

import base64
import json
import struct
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .config import SCORE_MODES
from .errors import ValidationError
from .model import PointCloud, SceneTree
from .query import TreeIndex, heatmap, score_nodes, top_k


def _point_stream(cloud: PointCloud) -> bytes:
    n = cloud.n
    table = np.empty(n, dtype=np.dtype([("xyz", "<f4", 3), ("rgb", "u1", 3)]))
    table["xyz"] = cloud.positions.astype(np.float32)
    if cloud.colors is not None:
        table["rgb"] = np.rint(cloud.colors * 255.0).astype(np.uint8)
    else:
        table["rgb"] = 200
    return struct.pack("<I", n) + table.tobytes()


def quantize_heatmap(scores: np.ndarray) -> dict:
    lo = float(scores.min())
    hi = float(scores.max())
    if hi > lo:
        q = np.rint((scores - lo) / (hi - lo) * 255.0).astype(np.uint8)
    else:
        q = np.zeros(len(scores), dtype=np.uint8)
    return {"min": lo, "max": hi, "values_b64": base64.b64encode(q.tobytes()).decode("ascii")}


class SceneService:
    """Immutable scene index behind a threading HTTP server."""

    def __init__(
        self,
        tree: SceneTree,
        cloud: PointCloud,
        provider=None,
        host: str = "127.0.0.1",
        port: int = 0,
        default_mode: str = "avg",
    ):
        if cloud.n != tree.n_points:
            raise ValidationError(
                f"cloud has {cloud.n} points but the tree was built over {tree.n_points}"
            )
        self.tree = tree
        self.cloud = cloud
        self.provider = provider
        self.index = TreeIndex(tree)
        self.default_mode = default_mode
        self.point_stream = _point_stream(cloud)
        self.nodes = {n.node_id: ("object", n) for n in tree.objects}
        self.nodes.update({n.node_id: ("segment", n) for n in tree.segments})
        self._server = ThreadingHTTPServer((host, port), _make_handler(self))
        self._server.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def join(self) -> None:
        if self._thread is not None:
            self._thread.join()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    # -- request logic, transport-independent --------------------------------

    def handle_query(self, body: dict) -> tuple[int, dict]:
        mode = body.get("mode", self.default_mode)
        if mode not in SCORE_MODES:
            return 400, {"error": f"unknown mode {mode!r}"}
        k = body.get("k", 10)
        if not isinstance(k, int) or k < 1:
            return 400, {"error": "k must be a positive integer"}

        if "embedding" in body:
            embedding = np.asarray(body["embedding"], dtype=np.float64)
            if embedding.ndim != 1 or len(embedding) != self.tree.feature_dim:
                return 400, {
                    "error": f"embedding must have dimension {self.tree.feature_dim}"
                }
        elif "text" in body:
            if self.provider is None:
                return 503, {"error": "no text provider configured"}
            embedding = self.provider.embed_text(str(body["text"]))
        else:
            return 400, {"error": "query needs 'text' or 'embedding'"}

        result = score_nodes(embedding, self.index, mode)
        ranked = top_k(result, k)
        payload = {
            "results": [
                {
                    "id": hit.node_id,
                    "kind": hit.kind,
                    "score": hit.score,
                    "point_count": len(self.nodes[hit.node_id][1].mask),
                }
                for hit in ranked.hits
            ]
        }
        if body.get("include_heatmap"):
            if mode == "object_only":
                return 400, {"error": "heatmaps need a segment-level mode"}
            scores = heatmap(result, self.tree, self.tree.n_points)
            payload["heatmap"] = quantize_heatmap(scores)
        return 200, payload

    def handle_node(self, node_id: int) -> tuple[int, dict]:
        if node_id not in self.nodes:
            return 404, {"error": f"no node {node_id}"}
        kind, node = self.nodes[node_id]
        return 200, {
            "id": node_id,
            "kind": kind,
            "point_indices": node.mask.point_indices.tolist(),
            "feature_norm": float(np.linalg.norm(node.feature.values.astype(np.float64))),
        }

    def scene_meta(self) -> dict:
        return {
            "scene_id": self.tree.scene_id,
            "n_points": self.tree.n_points,
            "object_count": len(self.tree.objects),
            "segment_count": len(self.tree.segments),
            "dim": self.tree.feature_dim,
        }


def _make_handler(service: SceneService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _send_json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/health":
                self._send_json(200, {"ok": True})
            elif self.path == "/scene":
                self._send_json(200, service.scene_meta())
            elif self.path == "/scene/points":
                self.send_response(200)
                self.send_header("Content-Type", "application/octet-stream")
                self.send_header("Content-Length", str(len(service.point_stream)))
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                self.wfile.write(service.point_stream)
            elif self.path.startswith("/node/"):
                try:
                    node_id = int(self.path[len("/node/"):])
                except ValueError:
                    self._send_json(400, {"error": "node id must be an integer"})
                    return
                status, payload = service.handle_node(node_id)
                self._send_json(status, payload)
            else:
                self._send_json(404, {"error": f"unknown path {self.path}"})

        def do_POST(self):
            if self.path != "/query":
                self._send_json(404, {"error": f"unknown path {self.path}"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length) or b"{}")
                if not isinstance(body, dict):
                    raise ValueError("body must be a JSON object")
            except (ValueError, json.JSONDecodeError) as exc:
                self._send_json(400, {"error": f"malformed request body: {exc}"})
                return
            try:
                status, payload = service.handle_query(body)
            except ValidationError as exc:
                self._send_json(400, {"error": str(exc)})
                return
            self._send_json(status, payload)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

    return Handler


def serve(tree: SceneTree, cloud: PointCloud, provider=None, port: int = 8080,
          host: str = "127.0.0.1") -> SceneService:
    """Start a service in a background thread; caller owns stop()."""
    service = SceneService(tree, cloud, provider=provider, host=host, port=port)
    service.start()
    return service
