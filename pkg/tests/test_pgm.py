import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graybayes import PgmFormatError, quantize_levels, read_pgm, write_pgm


def test_write_read_round_trip(tmp_path):
    path = str(tmp_path / "img.pgm")
    samples = np.array([[0, 7, 3], [15, 1, 8]])
    write_pgm(path, samples, 15)
    back, maxval = read_pgm(path)
    assert maxval == 15
    assert np.array_equal(back, samples)


def test_read_binary_p5(tmp_path):
    path = tmp_path / "bin.pgm"
    raster = bytes([0, 1, 2, 3, 4, 5])
    path.write_bytes(b"P5\n3 2\n255\n" + raster)
    samples, maxval = read_pgm(str(path))
    assert maxval == 255
    assert samples.tolist() == [[0, 1, 2], [3, 4, 5]]


def test_read_sixteen_bit_p5_big_endian(tmp_path):
    path = tmp_path / "deep.pgm"
    values = np.array([[300, 0], [65535, 256]], dtype=">u2")
    path.write_bytes(b"P5 2 2 65535\n" + values.tobytes())
    samples, maxval = read_pgm(str(path))
    assert maxval == 65535
    assert samples.tolist() == [[300, 0], [65535, 256]]


def test_header_comments_are_skipped(tmp_path):
    path = tmp_path / "commented.pgm"
    path.write_bytes(b"P2\n# made by hand\n2 1\n# maxval next\n9\n4 9\n")
    samples, maxval = read_pgm(str(path))
    assert maxval == 9
    assert samples.tolist() == [[4, 9]]


def test_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(PgmFormatError):
        read_pgm(str(path))


def test_rejects_bad_maxval(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P2\n1 1\n0\n0\n")
    with pytest.raises(PgmFormatError):
        read_pgm(str(path))
    path.write_bytes(b"P2\n1 1\n70000\n0\n")
    with pytest.raises(PgmFormatError):
        read_pgm(str(path))


def test_rejects_truncated_raster(tmp_path):
    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(PgmFormatError):
        read_pgm(str(path))
    path.write_bytes(b"P2\n2 2\n255\n1 2 3\n")
    with pytest.raises(PgmFormatError):
        read_pgm(str(path))


def test_rejects_out_of_range_sample(tmp_path):
    path = tmp_path / "over.pgm"
    path.write_bytes(b"P2\n2 1\n7\n3 8\n")
    with pytest.raises(PgmFormatError):
        read_pgm(str(path))


def test_rejects_missing_file():
    with pytest.raises(PgmFormatError):
        read_pgm("/nonexistent/image.pgm")


def test_write_validates_range(tmp_path):
    path = str(tmp_path / "img.pgm")
    with pytest.raises(ValueError):
        write_pgm(path, np.array([[5]]), 4)
    with pytest.raises(ValueError):
        write_pgm(path, np.array([1, 2, 3]), 255)


def test_quantize_maps_eight_bit_to_sixteen_levels():
    samples = np.array([0, 15, 16, 127, 128, 255])
    assert quantize_levels(samples, 255, 16).tolist() == [0, 0, 1, 7, 8, 15]


def test_quantize_identity_when_depth_matches():
    samples = np.arange(16)
    assert np.array_equal(quantize_levels(samples, 15, 16), samples)


@given(
    width=st.integers(min_value=1, max_value=8),
    height=st.integers(min_value=1, max_value=8),
    maxval=st.integers(min_value=1, max_value=65535),
    seed=st.integers(min_value=0, max_value=2**31),
)
@settings(max_examples=50, deadline=None)
def test_round_trip_any_depth(tmp_path_factory, width, height, maxval, seed):
    rng = np.random.default_rng(seed)
    samples = rng.integers(0, maxval + 1, size=(height, width))
    path = str(tmp_path_factory.mktemp("pgm") / "any.pgm")
    write_pgm(path, samples, maxval)
    back, got_maxval = read_pgm(path)
    assert got_maxval == maxval
    assert np.array_equal(back, samples)
