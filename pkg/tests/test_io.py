import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracsfe import Field, FormatError, Grid, GridMismatch, load_field, save_field
from fracsfe.io import MAGIC, dumps_field, loads_field


def random_field(dim, side, pts, seed=0):
    g = Grid(dim, side, pts)
    return Field(g, np.random.default_rng(seed).standard_normal(g.shape))


class TestRoundTrip:
    @given(dim=st.integers(1, 3), pts=st.sampled_from([4, 6, 8]), side=st.floats(0.1, 100.0), seed=st.integers(0, 99))
    def test_bytes(self, dim, pts, side, seed):
        u = random_field(dim, side, pts, seed)
        v = loads_field(dumps_field(u))
        assert v.grid == u.grid
        assert np.array_equal(v.values, u.values)

    def test_file(self, tmp_path):
        u = random_field(2, 3.5, 16)
        save_field(tmp_path / "u.frf", u)
        v = load_field(tmp_path / "u.frf", Grid(2, 3.5, 16))
        assert np.array_equal(v.values, u.values) and v.grid.side == 3.5

    def test_layout(self):
        u = random_field(2, 1.0, 4)
        data = dumps_field(u)
        assert data[:4] == MAGIC
        assert len(data) == 4 + 4 + 4 + 8 + 16 * 8


class TestErrors:
    def test_short(self):
        with pytest.raises(FormatError):
            loads_field(b"FRF1")

    def test_magic(self):
        data = bytearray(dumps_field(random_field(2, 1.0, 4)))
        data[:4] = b"XXXX"
        with pytest.raises(FormatError):
            loads_field(bytes(data))

    def test_truncated_payload(self):
        with pytest.raises(FormatError):
            loads_field(dumps_field(random_field(2, 1.0, 4))[:-8])

    def test_bad_grid(self):
        data = bytearray(dumps_field(random_field(2, 1.0, 4)))
        data[8:12] = (5).to_bytes(4, "little")
        with pytest.raises(FormatError):
            loads_field(bytes(data))

    def test_grid_mismatch(self, tmp_path):
        save_field(tmp_path / "u.frf", random_field(2, 1.0, 8))
        with pytest.raises(GridMismatch):
            load_field(tmp_path / "u.frf", Grid(2, 1.0, 16))

    def test_dilated_side_accepted(self, tmp_path):
        save_field(tmp_path / "u.frf", random_field(2, 2.7, 8))
        assert load_field(tmp_path / "u.frf", Grid(2, 4.0, 8)).grid.side == 2.7

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_field(tmp_path / "absent.frf")
