"""Binary snapshot files and small CSV helpers.

Layout (all little-endian)::

    magic     4 bytes  b"ELBM"
    version   u16      1
    nx, ny    u32, u32
    count     u8       number of fields
    names     count x (u8 length, UTF-8 bytes)
    data      count x (ny rows of nx float64), row index y, column index x

Arrays in memory are indexed ``[x, y]``; on disk each field is its
transpose in C order, so a row is a line of constant ``y``.
"""

import csv
import struct

import numpy as np

MAGIC = b"ELBM"
VERSION = 1
_HEAD = struct.Struct("<4sHIIB")


class SnapshotFormatError(ValueError):
    pass


def write_snapshot(path, fields):
    """Write a mapping ``name -> (nx, ny) array`` to ``path``."""
    if not fields:
        raise ValueError("no fields to write")
    if len(fields) > 255:
        raise ValueError("at most 255 fields per snapshot")
    arrays = {name: np.asarray(a, dtype=float) for name, a in fields.items()}
    shapes = {a.shape for a in arrays.values()}
    if len(shapes) != 1 or len(next(iter(shapes))) != 2:
        raise ValueError(f"fields must share one 2-D shape, got {shapes}")
    nx, ny = next(iter(shapes))
    for name, a in arrays.items():
        if not np.isfinite(a).all():
            raise ValueError(f"field {name!r} has non-finite values")
    parts = [_HEAD.pack(MAGIC, VERSION, nx, ny, len(arrays))]
    for name in arrays:
        raw = name.encode("utf-8")
        if not 0 < len(raw) < 256:
            raise ValueError(f"field name {name!r} must encode to 1..255 bytes")
        parts.append(struct.pack("<B", len(raw)) + raw)
    for a in arrays.values():
        parts.append(np.ascontiguousarray(a.T, dtype="<f8").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def read_snapshot(path):
    """Inverse of :func:`write_snapshot`; returns ``{name: (nx, ny) array}``."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEAD.size:
        raise SnapshotFormatError(f"file is {len(blob)} bytes, shorter than the {_HEAD.size}-byte header")
    magic, version, nx, ny, count = _HEAD.unpack_from(blob)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version} (reader handles {VERSION})")
    pos = _HEAD.size
    names = []
    for _ in range(count):
        if pos >= len(blob):
            raise SnapshotFormatError("truncated field-name table")
        n = blob[pos]
        pos += 1
        if pos + n > len(blob):
            raise SnapshotFormatError("truncated field-name table")
        names.append(blob[pos:pos + n].decode("utf-8"))
        pos += n
    size = nx * ny * 8
    expected = pos + count * size
    if len(blob) != expected:
        raise SnapshotFormatError(
            f"file length {len(blob)} does not match {expected} bytes for "
            f"{count} fields of {nx}x{ny}")
    out = {}
    for name in names:
        a = np.frombuffer(blob, dtype="<f8", count=nx * ny, offset=pos).reshape(ny, nx)
        out[name] = a.T.astype(float)
        pos += size
    return out


def state_fields(state):
    """The macroscopic fields of a solver state as a snapshot mapping."""
    return {"rho": state.rho, "jx": state.j[0], "jy": state.j[1],
            "Pxx": state.P[0], "Pxy": state.P[1], "Pyy": state.P[2]}


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
