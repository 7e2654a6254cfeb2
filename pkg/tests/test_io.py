import gzip
import struct

import numpy as np
import pytest

from wecure import io
from wecure.errors import ParseError, UnsupportedFormatError


def test_idx_labels(tmp_path):
    p = tmp_path / "labels.idx"
    p.write_bytes(bytes([0, 0, 8, 1, 0, 0, 0, 3, 7, 2, 1]))
    np.testing.assert_array_equal(io.load_idx(p), [7, 2, 1])


def test_idx_images(tmp_path):
    p = tmp_path / "images.idx"
    p.write_bytes(struct.pack(">IIII", 0x803, 1, 2, 2) + bytes([0, 255, 0, 255]))
    np.testing.assert_array_equal(io.load_idx(p), [[0.0, 1.0, 0.0, 1.0]])


def test_idx_gzip_round_trip(tmp_path):
    a = np.random.default_rng(0).integers(0, 256, (3, 4, 5)).astype(np.uint8)
    p = tmp_path / "x-idx3-ubyte.gz"
    io.write_idx(p, a)
    assert gzip.decompress(p.read_bytes())[:4] == b"\x00\x00\x08\x03"
    np.testing.assert_array_equal(io.load_idx(p), a.reshape(3, 20) / 255.0)


def test_idx_bad_magic(tmp_path):
    p = tmp_path / "bad.idx"
    p.write_bytes(struct.pack(">II", 0x802, 1) + b"\x00")
    with pytest.raises(ParseError) as err:
        io.load_idx(p)
    assert err.value.offset == 0


def test_idx_truncated(tmp_path):
    p = tmp_path / "short.idx"
    p.write_bytes(struct.pack(">II", 0x801, 5) + b"\x01\x02")
    with pytest.raises(ParseError) as err:
        io.load_idx(p)
    assert err.value.offset == 10
    p.write_bytes(b"\x00\x00")
    with pytest.raises(ParseError):
        io.load_idx(p)


def test_csv_points_only(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("1,2,3\n4,5,6\n")
    t = io.load_pointcloud_csv(p)
    assert t.points.shape == (2, 3)
    assert t.labeled.size == 0


def test_csv_with_missing_labels(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("0.5,1\n0.1,\n0.2,2\n")
    t = io.load_pointcloud_csv(p, label_column=-1)
    np.testing.assert_array_equal(t.labeled, [0, 2])
    np.testing.assert_array_equal(t.labels, [1, 2])
    np.testing.assert_array_equal(t.points, [[0.5], [0.1], [0.2]])


def test_csv_header_and_named_label(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("label,x,y\n3,0,1\n,2,3\n")
    t = io.load_pointcloud_csv(p, label_column="label", header=True)
    np.testing.assert_array_equal(t.points, [[0, 1], [2, 3]])
    np.testing.assert_array_equal(t.labeled, [0])


def test_csv_ragged(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("1,2\n3,4\n5\n")
    with pytest.raises(ParseError) as err:
        io.load_pointcloud_csv(p)
    assert err.value.offset == 3 and "line 3" in str(err.value)


def test_csv_non_numeric(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("1,2\n3,x\n")
    with pytest.raises(ParseError) as err:
        io.load_pointcloud_csv(p)
    assert err.value.offset == 2


def test_pgm_header_fixture(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5 2 2 255\n" + bytes([1, 2, 3, 4]))
    np.testing.assert_array_equal(io.load_image(p), [[1, 2], [3, 4]])


def test_pgm_comments(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n# made by hand\n3 1\n255\n" + bytes([9, 8, 7]))
    np.testing.assert_array_equal(io.load_image(p), [[9, 8, 7]])


@pytest.mark.parametrize("suffix", [".pgm", ".png"])
def test_image_round_trip(tmp_path, suffix):
    img = np.random.default_rng(1).integers(0, 256, (7, 9)).astype(np.float64)
    p = tmp_path / f"img{suffix}"
    io.write_image(img, p)
    np.testing.assert_array_equal(io.load_image(p), img)


def test_pgm_bytes_are_stable(tmp_path):
    img = np.arange(6.0).reshape(2, 3)
    io.write_image(img, tmp_path / "a.pgm")
    assert (tmp_path / "a.pgm").read_bytes() == b"P5\n3 2\n255\n" + bytes(range(6))


def test_sixteen_bit_pgm_rejected(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5 1 1 65535\n\x00\x01")
    with pytest.raises(UnsupportedFormatError):
        io.load_image(p)


def test_unsupported_formats(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("hello")
    with pytest.raises(UnsupportedFormatError):
        io.load_image(p)
    from PIL import Image
    Image.new("RGB", (2, 2)).save(tmp_path / "c.png")
    with pytest.raises(UnsupportedFormatError):
        io.load_image(tmp_path / "c.png")


def test_truncated_pgm(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5 4 4 255\n" + bytes(3))
    with pytest.raises(ParseError):
        io.load_image(p)


def test_mask_round_trip(tmp_path):
    m = np.random.default_rng(2).random((5, 6)) < 0.3
    io.write_mask(m, tmp_path / "m.pgm")
    raw = io.load_image(tmp_path / "m.pgm")
    assert set(np.unique(raw)) <= {0.0, 255.0}
    np.testing.assert_array_equal(io.load_mask(tmp_path / "m.pgm"), m)


def test_mask_rejects_gray_values(tmp_path):
    io.write_image(np.full((2, 2), 128.0), tmp_path / "m.pgm")
    with pytest.raises(ParseError):
        io.load_mask(tmp_path / "m.pgm")


def test_bundled_fixtures():
    from wecure import datasets
    X, y = datasets.load_mnist2000()
    assert X.shape == (2000, 784) and X.min() >= 0 and X.max() <= 1
    np.testing.assert_array_equal(np.bincount(y), np.full(10, 200))
    img = datasets.load_cameraman128()
    assert img.shape == (128, 128) and img.std() > 20
