import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfaloc import grid as g
from tfaloc import io as tio
from tfaloc.grid import GridSpec, SampledField, SampledFunction
from tfaloc.quant import OperatorMatrix


def test_header_layout(grid, phi):
    data = tio.dumps_sampled(phi)
    assert data[:8] == b"TFAGRID1"
    assert struct.unpack_from("<IId", data, 8) == (1, 256, 1 / 16)
    assert len(data) == 8 + 16 + 256 * 16


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1), st.booleans())
def test_sampled_round_trip(seed, field):
    G = GridSpec(1, 16)
    r = np.random.default_rng(seed)
    shape = (16, 16) if field else (16,)
    obj = (SampledField if field else SampledFunction)(G, r.normal(size=shape) + 1j * r.normal(size=shape))
    back = tio.loads_sampled(tio.dumps_sampled(obj))
    assert type(back) is type(obj)
    assert back.grid == G
    assert np.array_equal(back.values, obj.values)


def test_operator_round_trip(tmp_path, rng):
    G = GridSpec(1, 16)
    M = OperatorMatrix(G, rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
    path = tmp_path / "m.op"
    tio.write_operator(path, M)
    assert path.read_bytes()[:8] == b"TFAOPM01"
    assert np.array_equal(tio.read_operator(path).entries, M.entries)


def test_bad_magic_and_size():
    with pytest.raises(ValueError):
        tio.loads_sampled(b"XXXXXXXX" + bytes(40))
    G = GridSpec(1, 16)
    payload = b"TFAGRID1" + struct.pack("<IId", 1, 16, G.dx) + bytes(16 * 3)
    with pytest.raises(ValueError):
        tio.loads_sampled(payload)


def test_csv_round_trip(phi):
    buf = io.StringIO()
    tio.write_csv(buf, phi)
    text = buf.getvalue()
    assert text.splitlines()[0] == "w0,re,im"
    back = tio.read_csv(io.StringIO(text), phi.grid)
    assert np.array_equal(back.values, phi.values)


def test_bytes_are_deterministic(grid):
    F = g.field_gaussian(grid, center=[0.25, -0.5])
    assert tio.dumps_sampled(F) == tio.dumps_sampled(g.field_gaussian(grid, center=[0.25, -0.5]))
