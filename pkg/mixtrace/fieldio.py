"""Binary field container (MTGF) and CSV slice export."""
import json
import struct
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import ValidationError

from mixtrace.errors import FieldFormatError
from mixtrace.models import AnisoBall, AnisoBox, Grid, GridField

MAGIC = b"MTGF"
VERSION = 1
_PREFIX = struct.Struct("<4sHI")


def _cert_header(u: GridField) -> Optional[dict]:
    cert = u.support_cert
    if cert is None:
        return None
    kind = "ball" if isinstance(cert, AnisoBall) else "box"
    return {"kind": kind, **cert.model_dump()}


def dumps(u: GridField) -> bytes:
    """Header (grid, certificate) followed by interleaved little-endian complex doubles."""
    header = json.dumps(
        {"grid": u.grid.model_dump(), "support_cert": _cert_header(u)}, sort_keys=True
    ).encode("utf-8")
    payload = np.ascontiguousarray(u.values, dtype="<c16").tobytes(order="C")
    return _PREFIX.pack(MAGIC, VERSION, len(header)) + header + payload


def loads(blob: bytes) -> GridField:
    if len(blob) < _PREFIX.size:
        raise FieldFormatError("truncated field container")
    magic, version, header_len = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise FieldFormatError("not an MTGF field container")
    if version != VERSION:
        raise FieldFormatError(f"unsupported container version {version}")
    start = _PREFIX.size
    try:
        header = json.loads(blob[start:start + header_len].decode("utf-8"))
        grid = Grid(**header["grid"])
        cert_data = header.get("support_cert")
        cert = None
        if cert_data is not None:
            kind = cert_data.pop("kind")
            cert = AnisoBall(**cert_data) if kind == "ball" else AnisoBox(**cert_data)
    except (KeyError, ValueError, ValidationError) as e:
        raise FieldFormatError(f"bad container header: {e}") from e
    payload = blob[start + header_len:]
    if len(payload) != grid.size * 16:
        raise FieldFormatError(f"payload has {len(payload)} bytes, expected {grid.size * 16}")
    values = np.frombuffer(payload, dtype="<c16").reshape(grid.points)
    return GridField(grid=grid, values=values, support_cert=cert)


def write_field(u: GridField, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(u))
    return path


def read_field(path: Path | str) -> GridField:
    return loads(Path(path).read_bytes())


def export_slice_csv(u: GridField, path: Path | str) -> Path:
    """Write x_1[, x_2], re, im rows; axes beyond the second are cut at x = 0."""
    values = u.values
    for axis in range(u.n, 2, -1):
        values = np.take(values, u.grid.points[axis - 1] // 2, axis=axis - 1)
    kept = min(u.n, 2)
    nodes = np.meshgrid(*[u.grid.axis_nodes(k) for k in range(1, kept + 1)], indexing="ij")
    columns = [m.ravel() for m in nodes] + [values.real.ravel(), values.imag.ravel()]
    names = [f"x{k}" for k in range(1, kept + 1)] + ["re", "im"]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack(columns), delimiter=",", header=",".join(names), comments="", fmt="%.17g")
    return path
