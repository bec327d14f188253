"""Shared helpers for the adapter scripts."""

from __future__ import annotations

import json
from pathlib import Path

ADAPTER_VERSION = "0.1.0"


def write_provenance(out_path: str | Path, tool: str, backend: str, params: dict) -> Path:
    """Record what produced an artifact next to the artifact itself."""
    sidecar = Path(str(out_path) + ".provenance.json")
    sidecar.write_text(
        json.dumps(
            {
                "tool": tool,
                "backend": backend,
                "adapter_version": ADAPTER_VERSION,
                "params": params,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return sidecar


def unavailable_backend(backend: str, needs: str) -> RuntimeError:
    return RuntimeError(
        f"backend {backend!r} needs {needs}; install the model runtime and weights, "
        "or use --backend stub for format-level runs"
    )
