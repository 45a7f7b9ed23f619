import json
import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lacsphere import gridio
from lacsphere.errors import DomainError
from lacsphere.multiplier import FreqMultiplier
from lacsphere.operators import GridFunction


@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 2**31), st.booleans())
def test_grid_roundtrip(d, M, seed, is_set):
    rng = np.random.default_rng(seed)
    vals = (rng.random((M,) * d) < 0.5).astype(float) if is_set else rng.standard_normal((M,) * d)
    g = GridFunction(d, M, vals, is_set=is_set)
    for back in (gridio.from_bytes(gridio.to_bytes(g)), gridio.from_json(gridio.to_json(g))):
        assert np.array_equal(back.values, g.values)
        assert back.is_set == is_set and (back.d, back.M) == (d, M)


def test_multiplier_roundtrip():
    rng = np.random.default_rng(1)
    m = FreqMultiplier(2, 4, rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    for back in (gridio.from_bytes(gridio.to_bytes(m), "multiplier"), gridio.from_json(gridio.to_json(m), "multiplier")):
        assert np.array_equal(back.values, m.values)


def test_binary_layout_is_fixed():
    g = GridFunction(2, 2, np.array([[1.0, 2.0], [3.0, 4.0]]), is_set=False)
    buf = gridio.to_bytes(g)
    assert buf[:8] == b"LSGRID01"
    assert struct.unpack("<4I", buf[8:24]) == (2, 2, 0, 0)
    assert struct.unpack("<4d", buf[24:]) == (1.0, 2.0, 3.0, 4.0)
    m = FreqMultiplier(1, 2, np.array([1 + 2j, 3 - 4j]))
    buf = gridio.to_bytes(m)
    assert struct.unpack("<4I", buf[8:24]) == (1, 2, 0, 1)
    assert struct.unpack("<4d", buf[24:]) == (1.0, 2.0, 3.0, -4.0)


def test_json_layout_is_fixed():
    m = FreqMultiplier(1, 2, np.array([1 + 2j, 3 - 4j]))
    doc = json.loads(gridio.to_json(m))
    assert doc == {"format": "lacsphere-grid", "version": 1, "d": 1, "M": 2, "flags": 0, "dtype": "complex128", "values": [1.0, 2.0, 3.0, -4.0]}


def test_corrupt_inputs_rejected():
    g = GridFunction(2, 2, np.zeros((2, 2)))
    buf = gridio.to_bytes(g)
    with pytest.raises(DomainError):
        gridio.from_bytes(b"XXXXXXXX" + buf[8:])
    with pytest.raises(DomainError):
        gridio.from_bytes(buf[:-8])
    doc = json.loads(gridio.to_json(g))
    doc["values"] = doc["values"][:-1]
    with pytest.raises(DomainError):
        gridio.from_json(json.dumps(doc))
    with pytest.raises(DomainError):
        gridio.to_json(g.to_exact())


def test_file_roundtrip(tmp_path):
    g = GridFunction(3, 4, np.arange(64.0).reshape(4, 4, 4))
    for name in ("g.json", "g.bin"):
        gridio.save(g, tmp_path / name)
        assert np.array_equal(gridio.load(tmp_path / name).values, g.values)
