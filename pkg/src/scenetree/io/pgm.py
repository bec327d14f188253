"""16-bit PGM images for depth maps and 2D-segment label maps.

The header is standard P5 with maxval 65535. The payload is row-major u16
stored LITTLE-endian — a deliberate deviation from netpbm's big-endian
convention, chosen so the raster matches the other binary formats in this
package; files written and read here are self-consistent.

Depth maps: value 0 is invalid, meters = value * depth_scale.
Label maps: value 0 is unlabeled, label = value - 1.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import FormatError


def write_pgm16(values: np.ndarray, path: str | Path) -> None:
    values = np.asarray(values, dtype=np.uint16)
    if values.ndim != 2:
        raise FormatError("PGM payload must be a 2-D array")
    h, w = values.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(values.astype("<u2").tobytes())


def read_pgm16(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # with optional '#' comment lines.
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise FormatError(f"{path}: truncated PGM header")
        ch = data[pos:pos + 1]
        if ch == b"#":
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    pos += 1  # single whitespace after maxval
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if maxval != 65535:
        raise FormatError(f"{path}: expected 16-bit PGM (maxval 65535), got {maxval}")
    need = w * h * 2
    payload = data[pos:pos + need]
    if len(payload) < need:
        raise FormatError(f"{path}: truncated PGM payload ({len(payload)} of {need} bytes)")
    return np.frombuffer(payload, dtype="<u2").reshape(h, w).astype(np.uint16)


def write_depth(depth_m: np.ndarray, depth_scale: float, path: str | Path) -> None:
    """Quantize a metric depth image to u16; zeros stay invalid."""
    depth_m = np.asarray(depth_m, dtype=np.float64)
    raw = np.rint(depth_m / depth_scale)
    if raw.max(initial=0) > 65535:
        raise FormatError(
            f"depth exceeds the u16 range at scale {depth_scale} (max {depth_m.max():.3f} m)"
        )
    write_pgm16(raw.astype(np.uint16), path)


def read_depth(path: str | Path, depth_scale: float) -> np.ndarray:
    """Read a depth PGM into float32 meters (0 = invalid)."""
    return read_pgm16(path).astype(np.float32) * np.float32(depth_scale)


def write_label_map(labels: np.ndarray, path: str | Path) -> None:
    """Store integer labels (-1 = unlabeled) as label + 1."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min(initial=0) < -1 or labels.max(initial=0) > 65534:
        raise FormatError("labels must lie in [-1, 65534]")
    write_pgm16((labels + 1).astype(np.uint16), path)


def read_label_map(path: str | Path) -> np.ndarray:
    """Read a label map back to int32 with -1 = unlabeled."""
    return read_pgm16(path).astype(np.int32) - 1
