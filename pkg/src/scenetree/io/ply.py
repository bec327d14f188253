"""PLY point-cloud reader and writer.

Supported subset: `format ascii 1.0` and `format binary_little_endian 1.0`;
element "vertex" with float/double properties x, y, z, optionally nx, ny, nz
(float/double) and red, green, blue (uchar); optional element "face" with
`property list uchar int vertex_indices` holding triangles. Unknown scalar
vertex properties are read and discarded; big-endian files are rejected.

The writer emits positions and normals as doubles and colors as uchar, so a
write→read round trip reproduces the in-memory cloud bit-exactly (colors map
u8 k ↔ float k/255).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import FormatError
from ..model import PointCloud

_SCALAR_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "<i2", "int16": "<i2",
    "ushort": "<u2", "uint16": "<u2",
    "int": "<i4", "int32": "<i4",
    "uint": "<u4", "uint32": "<u4",
    "float": "<f4", "float32": "<f4",
    "double": "<f8", "float64": "<f8",
}

_INT_LIST_TYPES = {"char", "int8", "uchar", "uint8", "short", "int16", "ushort",
                   "uint16", "int", "int32", "uint", "uint32"}


def _parse_header(data: bytes, path):
    end = data.find(b"end_header\n")
    if end < 0:
        raise FormatError(f"{path}: missing end_header")
    try:
        header = data[:end].decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: non-ascii header") from exc
    lines = [ln.strip() for ln in header.splitlines() if ln.strip()]
    if not lines or lines[0] != "ply":
        raise FormatError(f"{path}: not a PLY file")

    fmt = None
    elements = []  # (name, count, [(kind, name, type...)])
    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "comment":
            continue
        if parts[0] == "format":
            if len(parts) != 3:
                raise FormatError(f"{path}: malformed format line")
            fmt = parts[1]
        elif parts[0] == "element":
            if len(parts) != 3 or not parts[2].isdigit():
                raise FormatError(f"{path}: malformed element line {line!r}")
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise FormatError(f"{path}: property before any element")
            if parts[1] == "list":
                if len(parts) != 5:
                    raise FormatError(f"{path}: malformed list property {line!r}")
                elements[-1][2].append(("list", parts[4], parts[2], parts[3]))
            else:
                if len(parts) != 3 or parts[1] not in _SCALAR_TYPES:
                    raise FormatError(f"{path}: unsupported property {line!r}")
                elements[-1][2].append(("scalar", parts[2], parts[1]))
        else:
            raise FormatError(f"{path}: unexpected header line {line!r}")

    if fmt == "binary_big_endian":
        raise FormatError(f"{path}: big-endian PLY is not supported")
    if fmt not in ("ascii", "binary_little_endian"):
        raise FormatError(f"{path}: unknown format {fmt!r}")
    return fmt, elements, end + len(b"end_header\n")


def _vertex_columns(columns: dict, path):
    for req in ("x", "y", "z"):
        if req not in columns:
            raise FormatError(f"{path}: vertex element missing property {req!r}")
    positions = np.stack([columns["x"], columns["y"], columns["z"]], axis=1).astype(np.float64)
    normals = None
    if all(c in columns for c in ("nx", "ny", "nz")):
        normals = np.stack([columns["nx"], columns["ny"], columns["nz"]], axis=1).astype(np.float64)
    colors = None
    if all(c in columns for c in ("red", "green", "blue")):
        rgb = np.stack([columns["red"], columns["green"], columns["blue"]], axis=1)
        colors = rgb.astype(np.float64) / 255.0
    return positions, normals, colors


def load_point_cloud(path: str | Path) -> PointCloud:
    """Read a PLY file into a PointCloud."""
    path = Path(path)
    data = path.read_bytes()
    fmt, elements, offset = _parse_header(data, path)

    positions = normals = colors = faces = None
    if fmt == "binary_little_endian":
        for name, count, props in elements:
            if name == "vertex":
                if any(p[0] == "list" for p in props):
                    raise FormatError(f"{path}: list property on vertex element")
                dtype = np.dtype([(p[1], _SCALAR_TYPES[p[2]]) for p in props])
                need = dtype.itemsize * count
                if len(data) - offset < need:
                    raise FormatError(
                        f"{path}: truncated vertex payload "
                        f"({len(data) - offset} of {need} bytes)"
                    )
                table = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
                offset += need
                columns = {p[1]: table[p[1]] for p in props}
                positions, normals, colors = _vertex_columns(columns, path)
            elif name == "face":
                faces = []
                for _ in range(count):
                    if len(data) - offset < 1:
                        raise FormatError(f"{path}: truncated face payload")
                    n_idx = data[offset]
                    offset += 1
                    if n_idx != 3:
                        raise FormatError(f"{path}: only triangular faces are supported")
                    if len(data) - offset < 12:
                        raise FormatError(f"{path}: truncated face payload")
                    faces.append(np.frombuffer(data, dtype="<i4", count=3, offset=offset))
                    offset += 12
                faces = np.array(faces, dtype=np.int64) if faces else None
            else:
                dtype = np.dtype([(p[1], _SCALAR_TYPES[p[2]]) for p in props if p[0] == "scalar"])
                if any(p[0] == "list" for p in props):
                    raise FormatError(f"{path}: cannot skip element {name!r} with list property")
                offset += dtype.itemsize * count
    else:
        body = data[offset:].decode("ascii", errors="replace").splitlines()
        cursor = 0
        for name, count, props in elements:
            if len(body) - cursor < count:
                raise FormatError(
                    f"{path}: truncated ascii payload for element {name!r} "
                    f"({len(body) - cursor} of {count} rows)"
                )
            rows = body[cursor:cursor + count]
            cursor += count
            if name == "vertex":
                if any(p[0] == "list" for p in props):
                    raise FormatError(f"{path}: list property on vertex element")
                names = [p[1] for p in props]
                try:
                    values = np.array([[float(tok) for tok in row.split()] for row in rows])
                except ValueError as exc:
                    raise FormatError(f"{path}: bad ascii vertex row") from exc
                if values.size == 0:
                    values = values.reshape(0, len(names))
                if values.shape[1] != len(names):
                    raise FormatError(f"{path}: vertex row has wrong column count")
                columns = {col: values[:, i] for i, col in enumerate(names)}
                positions, normals, colors = _vertex_columns(columns, path)
            elif name == "face":
                parsed = []
                for row in rows:
                    toks = row.split()
                    if not toks or toks[0] != "3" or len(toks) != 4:
                        raise FormatError(f"{path}: only triangular faces are supported")
                    parsed.append([int(t) for t in toks[1:]])
                faces = np.array(parsed, dtype=np.int64) if parsed else None

    if positions is None:
        raise FormatError(f"{path}: no vertex element")
    return PointCloud(positions=positions, normals=normals, colors=colors, faces=faces)


def _color_bytes(colors: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(colors, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_ply(
    path: str | Path,
    positions: np.ndarray,
    *,
    normals: np.ndarray | None = None,
    colors_u8: np.ndarray | None = None,
    faces: np.ndarray | None = None,
    binary: bool = True,
) -> None:
    """Low-level PLY writer shared by the cloud and heatmap exports."""
    path = Path(path)
    n = len(positions)
    header = ["ply", f"format {'binary_little_endian' if binary else 'ascii'} 1.0",
              f"element vertex {n}"]
    header += [f"property double {c}" for c in "xyz"]
    if normals is not None:
        header += [f"property double n{c}" for c in "xyz"]
    if colors_u8 is not None:
        header += [f"property uchar {c}" for c in ("red", "green", "blue")]
    if faces is not None:
        header += [f"element face {len(faces)}", "property list uchar int vertex_indices"]
    header.append("end_header")

    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        if binary:
            fields = [("x", "<f8"), ("y", "<f8"), ("z", "<f8")]
            if normals is not None:
                fields += [("nx", "<f8"), ("ny", "<f8"), ("nz", "<f8")]
            if colors_u8 is not None:
                fields += [("red", "u1"), ("green", "u1"), ("blue", "u1")]
            table = np.empty(n, dtype=np.dtype(fields))
            table["x"], table["y"], table["z"] = positions.T
            if normals is not None:
                table["nx"], table["ny"], table["nz"] = normals.T
            if colors_u8 is not None:
                table["red"], table["green"], table["blue"] = colors_u8.T
            fh.write(table.tobytes())
            if faces is not None:
                rows = np.empty(len(faces), dtype=np.dtype([("n", "u1"), ("idx", "<i4", 3)]))
                rows["n"] = 3
                rows["idx"] = faces.astype("<i4")
                fh.write(rows.tobytes())
        else:
            for i in range(n):
                parts = [repr(float(v)) for v in positions[i]]
                if normals is not None:
                    parts += [repr(float(v)) for v in normals[i]]
                if colors_u8 is not None:
                    parts += [str(int(v)) for v in colors_u8[i]]
                fh.write((" ".join(parts) + "\n").encode("ascii"))
            if faces is not None:
                for tri in faces:
                    fh.write(f"3 {tri[0]} {tri[1]} {tri[2]}\n".encode("ascii"))


def save_point_cloud(cloud: PointCloud, path: str | Path, *, binary: bool = True) -> None:
    """Write a PointCloud as PLY (binary little-endian by default)."""
    write_ply(
        path,
        cloud.positions,
        normals=cloud.normals,
        colors_u8=None if cloud.colors is None else _color_bytes(cloud.colors),
        faces=cloud.faces,
        binary=binary,
    )
