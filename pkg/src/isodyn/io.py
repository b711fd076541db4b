"""Self-describing field snapshots.

A snapshot is a short UTF-8 text header followed by raw little-endian
float64 payloads, one per named array, in header order::

    ISODYN-SNAPSHOT 1
    endianness = little
    dtype = float64
    D = 2
    lambda = 1.0
    spacings = h1,h2,h3,dX
    lattice.n1 = 16
    ...
    meta.t = 0.25
    array a = 2,2,16,16,17,16,16
    array pi = 2,2,16,16,17,16,16
    END

Floats are written with ``repr`` so every value round-trips exactly.
"""
from __future__ import annotations

import math
from dataclasses import fields as dc_fields
from pathlib import Path

import numpy as np

from .lattice import LatticeSpec

MAGIC = "ISODYN-SNAPSHOT 1"


class SnapshotError(ValueError):
    pass


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def save_snapshot(path, lat: LatticeSpec, arrays: dict, meta: dict | None = None) -> Path:
    """Write named float64 arrays with the lattice description."""
    path = Path(path)
    lines = [MAGIC, "endianness = little", "dtype = float64",
             f"D = {lat.D}", f"lambda = {lat.lam!r}",
             "spacings = " + ",".join(repr(float(h)) for h in (lat.h1, lat.h2, lat.h3, lat.dX))]
    for f in dc_fields(lat):
        lines.append(f"lattice.{f.name} = {_fmt(getattr(lat, f.name))}")
    for k, v in (meta or {}).items():
        lines.append(f"meta.{k} = {_fmt(v)}")
    payload = []
    for name, arr in arrays.items():
        if not name.isidentifier():
            raise SnapshotError(f"array name {name!r} is not an identifier")
        arr = np.asarray(arr, dtype=np.float64)
        lines.append(f"array {name} = " + ",".join(str(s) for s in arr.shape))
        payload.append(np.ascontiguousarray(arr, dtype="<f8").tobytes(order="C"))
    lines.append("END")
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("utf-8"))
        for blob in payload:
            fh.write(blob)
    return path


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_snapshot(path):
    """Return ``(lattice, arrays, meta)`` from a snapshot file."""
    data = Path(path).read_bytes()
    end = data.find(b"\nEND\n")
    if not data.startswith(MAGIC.encode()) or end < 0:
        raise SnapshotError(f"{path}: not an isodyn snapshot")
    header = data[:end].decode("utf-8").splitlines()[1:]
    offset = end + len(b"\nEND\n")
    lat_kw, meta, shapes = {}, {}, []
    for line in header:
        if line.startswith("array "):
            name, _, shp = line[6:].partition(" = ")
            shape = tuple(int(s) for s in shp.split(",") if s)
            shapes.append((name, shape))
            continue
        key, _, val = line.partition(" = ")
        if key == "endianness" and val != "little":
            raise SnapshotError("only little-endian payloads are supported")
        if key == "dtype" and val != "float64":
            raise SnapshotError("only float64 payloads are supported")
        if key.startswith("lattice."):
            lat_kw[key[8:]] = _parse_value(val)
        elif key.startswith("meta."):
            meta[key[5:]] = _parse_value(val)
    known = {f.name: f.type for f in dc_fields(LatticeSpec)}
    for k in list(lat_kw):
        if k not in known:
            raise SnapshotError(f"unknown lattice field {k!r}")
        if k in ("l1", "l2", "l3", "l_inner", "lam", "dt"):
            lat_kw[k] = float(lat_kw[k])
    lat = LatticeSpec(**lat_kw)
    arrays = {}
    for name, shape in shapes:
        n = math.prod(shape) * 8
        blob = data[offset:offset + n]
        if len(blob) != n:
            raise SnapshotError(f"{path}: truncated payload for {name}")
        arrays[name] = np.frombuffer(blob, dtype="<f8").reshape(shape).astype(np.float64)
        offset += n
    if offset != len(data):
        raise SnapshotError(f"{path}: trailing bytes after payload")
    return lat, arrays, meta
