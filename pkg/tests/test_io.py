import struct

import numpy as np
import pytest

from tsketch import FormatError, read_t3b, write_t3b


def test_round_trip(tmp_path):
    rng = np.random.default_rng(31)
    for shape in [(1, 1, 1), (3, 2, 4), (5, 5, 2)]:
        a = rng.standard_normal(shape)
        path = tmp_path / "a.t3b"
        write_t3b(path, a)
        assert np.array_equal(read_t3b(path), a)


def test_byte_layout(tmp_path):
    # column-major within a slice, slices consecutive
    a = np.arange(1.0, 9.0).reshape(2, 2, 2)
    path = tmp_path / "a.t3b"
    write_t3b(path, a)
    raw = path.read_bytes()
    assert raw[:4] == b"T3B1"
    assert struct.unpack("<QQQ", raw[4:28]) == (2, 2, 2)
    values = struct.unpack("<8d", raw[28:])
    expected = (
        a[0, 0, 0], a[1, 0, 0], a[0, 1, 0], a[1, 1, 0],
        a[0, 0, 1], a[1, 0, 1], a[0, 1, 1], a[1, 1, 1],
    )
    assert values == expected


def test_handcrafted_tube(tmp_path):
    path = tmp_path / "tube.t3b"
    path.write_bytes(b"T3B1" + struct.pack("<QQQ", 1, 1, 3) + struct.pack("<3d", 5, 6, 7))
    a = read_t3b(path)
    assert a.shape == (1, 1, 3)
    assert np.array_equal(a[0, 0], [5, 6, 7])


def test_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.t3b"
    path.write_bytes(b"XXXX" + struct.pack("<QQQ", 1, 1, 1) + struct.pack("<d", 0))
    with pytest.raises(FormatError):
        read_t3b(path)


def test_rejects_truncated_payload(tmp_path):
    path = tmp_path / "short.t3b"
    path.write_bytes(b"T3B1" + struct.pack("<QQQ", 2, 2, 2) + b"\x00" * 40)
    with pytest.raises(FormatError):
        read_t3b(path)


def test_rejects_truncated_header(tmp_path):
    path = tmp_path / "hdr.t3b"
    path.write_bytes(b"T3B1" + b"\x00" * 10)
    with pytest.raises(FormatError):
        read_t3b(path)


def test_rejects_trailing_bytes(tmp_path):
    path = tmp_path / "extra.t3b"
    path.write_bytes(b"T3B1" + struct.pack("<QQQ", 1, 1, 1) + struct.pack("<d", 1) + b"!")
    with pytest.raises(FormatError):
        read_t3b(path)


def test_rejects_zero_dimension(tmp_path):
    path = tmp_path / "zero.t3b"
    path.write_bytes(b"T3B1" + struct.pack("<QQQ", 0, 1, 1))
    with pytest.raises(FormatError):
        read_t3b(path)


def test_rejects_nonfinite(tmp_path):
    path = tmp_path / "nan.t3b"
    path.write_bytes(b"T3B1" + struct.pack("<QQQ", 1, 1, 1) + struct.pack("<d", float("nan")))
    with pytest.raises(FormatError):
        read_t3b(path)
    a = np.full((1, 1, 1), np.inf)
    with pytest.raises(FormatError):
        write_t3b(tmp_path / "inf.t3b", a)
