"""Container format checks for the binary map writer."""

import struct

import numpy as np
import pytest

from camextract import write_smap


HEADER = struct.Struct("<4sBII")


def read_back(path):
    raw = path.read_bytes()
    magic, version, h, w = HEADER.unpack_from(raw)
    payload = np.frombuffer(raw, dtype="<f4", offset=HEADER.size).reshape(h, w)
    return magic, version, payload


class TestWriteSmap:
    def test_single_pixel_layout(self, tmp_path):
        p = tmp_path / "one.smap"
        write_smap(np.array([[0.5]]), p)
        raw = p.read_bytes()
        assert len(raw) == 17
        assert raw[:4] == b"SMAP"
        assert raw[4] == 1
        assert struct.unpack_from("<II", raw, 5) == (1, 1)
        assert raw[13:] == b"\x00\x00\x00?"

    def test_round_trip_preserves_values(self, tmp_path):
        rng = np.random.default_rng(3)
        values = rng.normal(size=(7, 11)).astype(np.float32)
        p = tmp_path / "map.smap"
        write_smap(values, p)
        magic, version, payload = read_back(p)
        assert magic == b"SMAP"
        assert version == 1
        assert np.array_equal(payload, values)

    def test_negatives_survive_untouched(self, tmp_path):
        p = tmp_path / "neg.smap"
        write_smap(np.array([[-0.25, 1.5]]), p)
        _, _, payload = read_back(p)
        assert payload[0, 0] == np.float32(-0.25)
        assert payload[0, 1] == np.float32(1.5)

    def test_row_major_order(self, tmp_path):
        p = tmp_path / "rm.smap"
        write_smap(np.array([[1.0, 2.0], [3.0, 4.0]]), p)
        _, _, payload = read_back(p)
        assert payload.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    @pytest.mark.parametrize("bad", [np.zeros((0, 4)), np.zeros(5), np.zeros((2, 2, 2))])
    def test_bad_shapes_rejected(self, tmp_path, bad):
        with pytest.raises(ValueError):
            write_smap(bad, tmp_path / "bad.smap")

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_smap(np.array([[np.nan, 0.0]]), tmp_path / "nan.smap")
        with pytest.raises(ValueError):
            write_smap(np.array([[np.inf, 0.0]]), tmp_path / "inf.smap")

    def test_float32_overflow_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_smap(np.array([[1e300]]), tmp_path / "big.smap")
