"""Serialization of grid functions and multipliers.

JSON layout::

    {"format": "lacsphere-grid", "version": 1, "d": d, "M": M, "flags": flags,
     "dtype": "float64" | "complex128", "values": [...]}

``values`` is the flattened array in row-major (C) order; complex data is
interleaved as re, im, re, im, ...

Binary layout: the 8-byte magic ``LSGRID01``, then four little-endian uint32
fields d, M, flags, dtype code (0 = float64, 1 = complex128), then the
little-endian values in row-major order (complex as interleaved re, im).

``flags`` bit 0 marks indicator (set) data.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import DomainError
from .multiplier import FreqMultiplier
from .operators import GridFunction

MAGIC = b"LSGRID01"
FORMAT = "lacsphere-grid"
VERSION = 1
FLAG_SET = 1
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<c16")}
_NAMES = {0: "float64", 1: "complex128"}


def _unpack(obj) -> tuple[int, int, int, np.ndarray]:
    if isinstance(obj, GridFunction):
        if obj.exact:
            raise DomainError("exact (Fraction) grids are not serializable; convert to float first")
        return obj.d, obj.M, FLAG_SET if obj.is_set else 0, np.asarray(obj.values, dtype=float)
    if isinstance(obj, FreqMultiplier):
        return obj.d, obj.M, 0, obj.values
    raise DomainError(f"cannot serialize {type(obj).__name__}")


def _pack(d: int, M: int, flags: int, values: np.ndarray, kind: str):
    if kind == "multiplier":
        return FreqMultiplier(d, M, values.astype(complex))
    if np.iscomplexobj(values):
        raise DomainError("grid functions are real-valued")
    return GridFunction(d, M, values, is_set=bool(flags & FLAG_SET))


def to_bytes(obj) -> bytes:
    d, M, flags, vals = _unpack(obj)
    code = 1 if np.iscomplexobj(vals) else 0
    data = np.ascontiguousarray(vals, dtype=_DTYPES[code]).tobytes(order="C")
    return MAGIC + struct.pack("<4I", d, M, flags, code) + data


def from_bytes(buf: bytes, kind: str = "grid"):
    if buf[:8] != MAGIC:
        raise DomainError("bad magic; not a lacsphere binary grid")
    d, M, flags, code = struct.unpack("<4I", buf[8:24])
    if code not in _DTYPES:
        raise DomainError(f"unknown dtype code {code}")
    dt = _DTYPES[code]
    expected = M**d * dt.itemsize
    if len(buf) - 24 != expected:
        raise DomainError(f"payload has {len(buf) - 24} bytes, header implies {expected}")
    vals = np.frombuffer(buf, dtype=dt, offset=24).reshape((M,) * d).astype(dt.newbyteorder("="))
    return _pack(d, M, flags, vals, kind)


def to_json(obj) -> str:
    d, M, flags, vals = _unpack(obj)
    flat = np.ascontiguousarray(vals).reshape(-1)
    if np.iscomplexobj(flat):
        payload = np.stack([flat.real, flat.imag], axis=1).reshape(-1).tolist()
        dtype = _NAMES[1]
    else:
        payload = flat.tolist()
        dtype = _NAMES[0]
    doc = {"format": FORMAT, "version": VERSION, "d": d, "M": M, "flags": flags, "dtype": dtype, "values": payload}
    return json.dumps(doc, separators=(",", ":"))


def from_json(text: str, kind: str = "grid"):
    doc = json.loads(text)
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise DomainError("not a lacsphere grid document (format/version mismatch)")
    d, M, flags = int(doc["d"]), int(doc["M"]), int(doc["flags"])
    raw = np.asarray(doc["values"], dtype=float)
    if doc["dtype"] == _NAMES[1]:
        if raw.size != 2 * M**d:
            raise DomainError("complex payload length mismatch")
        vals = (raw[0::2] + 1j * raw[1::2]).reshape((M,) * d)
    elif doc["dtype"] == _NAMES[0]:
        if raw.size != M**d:
            raise DomainError("payload length mismatch")
        vals = raw.reshape((M,) * d)
    else:
        raise DomainError(f"unknown dtype {doc['dtype']!r}")
    return _pack(d, M, flags, vals, kind)


def save(obj, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(to_json(obj))
    else:
        path.write_bytes(to_bytes(obj))


def load(path: str | Path, kind: str = "grid"):
    path = Path(path)
    if path.suffix == ".json":
        return from_json(path.read_text(), kind)
    return from_bytes(path.read_bytes(), kind)
