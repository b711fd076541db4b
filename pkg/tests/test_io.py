import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from isodyn.io import SnapshotError, load_snapshot, save_snapshot
from isodyn.lattice import LatticeSpec

floats = st.floats(allow_nan=True, allow_infinity=True, width=64)


@settings(max_examples=25, deadline=None)
@given(arr=arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 5)), elements=floats),
       lam=st.floats(0.1, 10.0), t=st.floats(-1e6, 1e6))
def test_roundtrip_bit_exact(tmp_path_factory, arr, lam, t):
    lat = LatticeSpec(n1=4, n2=4, n3=5, k_inner=4, lam=lam, l_inner=1.0 / 3.0)
    path = tmp_path_factory.mktemp("snap") / "x.snap"
    save_snapshot(path, lat, {"a": arr, "b": arr[:1]}, {"t": t, "step": 7})
    lat2, got, meta = load_snapshot(path)
    assert lat2 == lat
    assert got["a"].tobytes() == arr.astype("<f8").tobytes()
    assert got["b"].shape == arr[:1].shape
    assert meta == {"t": t, "step": 7}


def test_header_is_self_describing(tmp_path):
    lat = LatticeSpec(n1=4, n2=4, n3=5, k_inner=4)
    path = save_snapshot(tmp_path / "s.snap", lat, {"pi": np.zeros((2, 3))})
    head = path.read_bytes().split(b"\nEND\n")[0].decode()
    for key in ("endianness = little", "dtype = float64", "D = 2", "lambda = 1.0", "spacings = ",
                "array pi = 2,3"):
        assert key in head


def test_corrupt_files(tmp_path):
    lat = LatticeSpec(n1=4, n2=4, n3=5, k_inner=4)
    path = save_snapshot(tmp_path / "s.snap", lat, {"a": np.ones(10)})
    data = path.read_bytes()
    (tmp_path / "short.snap").write_bytes(data[:-8])
    with pytest.raises(SnapshotError):
        load_snapshot(tmp_path / "short.snap")
    (tmp_path / "long.snap").write_bytes(data + b"\0")
    with pytest.raises(SnapshotError):
        load_snapshot(tmp_path / "long.snap")
    (tmp_path / "junk.snap").write_bytes(b"hello")
    with pytest.raises(SnapshotError):
        load_snapshot(tmp_path / "junk.snap")
    with pytest.raises(SnapshotError):
        save_snapshot(tmp_path / "bad.snap", lat, {"not a name": np.ones(1)})
