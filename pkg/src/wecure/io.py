"""
File formats: IDX tensors (MNIST), numeric CSV point clouds, 8-bit PGM/PNG
grayscale images and observation masks.

``.gz`` compressed IDX files are decompressed transparently.
"""
import csv
import gzip
import struct
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ParseError, UnsupportedFormatError
from .ssl import LabeledDataset

IDX_IMAGES = 0x00000803
IDX_LABELS = 0x00000801


def _read_bytes(path):
    path = Path(path)
    data = path.read_bytes()
    if path.suffix == ".gz" or data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def load_idx(path):
    """Read an unsigned-byte IDX file.

    Image tensors (magic 0x803) come back as an ``(count, rows*cols)`` float
    array scaled to [0, 1]; label vectors (magic 0x801) as an int array.
    """
    data = _read_bytes(path)
    if len(data) < 8:
        raise ParseError(f"{path}: truncated header", offset=len(data))
    magic, count = struct.unpack(">II", data[:8])
    if magic == IDX_LABELS:
        dims, offset = (count,), 8
    elif magic == IDX_IMAGES:
        if len(data) < 16:
            raise ParseError(f"{path}: truncated header", offset=len(data))
        rows, cols = struct.unpack(">II", data[8:16])
        dims, offset = (count, rows, cols), 16
    else:
        raise ParseError(f"{path}: bad magic number 0x{magic:08x}", offset=0)
    size = int(np.prod(dims))
    if len(data) < offset + size:
        raise ParseError(f"{path}: payload truncated, expected {size} bytes after the header",
                         offset=len(data))
    payload = np.frombuffer(data, dtype=np.uint8, count=size, offset=offset)
    if magic == IDX_LABELS:
        return payload.astype(np.int64)
    return payload.reshape(count, -1).astype(np.float64) / 255.0


def write_idx(path, array):
    """Write a uint8 label vector (1-D) or image stack (3-D) in IDX format."""
    a = np.asarray(array)
    if a.dtype != np.uint8:
        raise UnsupportedFormatError("IDX writer only supports uint8 data")
    if a.ndim == 1:
        header = struct.pack(">II", IDX_LABELS, a.shape[0])
    elif a.ndim == 3:
        header = struct.pack(">IIII", IDX_IMAGES, *a.shape)
    else:
        raise UnsupportedFormatError(f"IDX writer expects 1-D or 3-D data, got {a.ndim}-D")
    blob = header + np.ascontiguousarray(a).tobytes()
    path = Path(path)
    if path.suffix == ".gz":
        blob = gzip.compress(blob, mtime=0)
    path.write_bytes(blob)


class PointTable(NamedTuple):
    """Rows of a CSV file: coordinates plus the optionally labeled subset."""
    points: np.ndarray
    labeled: np.ndarray
    labels: np.ndarray

    def dataset(self, classes=None):
        return LabeledDataset(self.points, self.labeled, self.labels, classes)


def load_pointcloud_csv(path, label_column=None, header=False):
    """Read one point per row.

    ``label_column`` (index, or name when ``header`` is set) holds integer
    labels; an empty field leaves that point unlabeled.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    start = 1 if header else 0
    names = [c.strip() for c in rows[0]] if header and rows else None
    body = [(i + 1, r) for i, r in enumerate(rows) if i >= start and any(c.strip() for c in r)]
    if not body:
        raise ParseError(f"{path}: no data rows", offset=1)
    width = len(body[0][1])
    col = None
    if label_column is not None:
        if isinstance(label_column, str) and names is not None:
            if label_column not in names:
                raise ParseError(f"{path}: no column named {label_column!r}", offset=1)
            col = names.index(label_column)
        else:
            col = int(label_column) % width
    points, labeled, labels = [], [], []
    for k, (line, row) in enumerate(body):
        if len(row) != width:
            raise ParseError(f"{path}: line {line} has {len(row)} fields, expected {width}",
                             offset=line)
        feats = []
        for j, cell in enumerate(row):
            cell = cell.strip()
            if j == col:
                if cell:
                    try:
                        labels.append(int(float(cell)))
                    except ValueError:
                        raise ParseError(f"{path}: line {line}: bad label {cell!r}",
                                         offset=line) from None
                    labeled.append(k)
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise ParseError(f"{path}: line {line}: non-numeric value {cell!r}",
                                 offset=line) from None
        points.append(feats)
    return PointTable(np.array(points, dtype=np.float64),
                      np.array(labeled, dtype=np.int64), np.array(labels, dtype=np.int64))


def _pgm_tokens(data):
    # header: magic, width, height, maxval; '#' comments run to end of line
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ParseError("truncated PGM header", offset=pos)
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos + 1  # exactly one whitespace byte before the raster


def read_pgm(path):
    data = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(data)
    if magic != b"P5":
        raise UnsupportedFormatError(f"{path}: only binary PGM (P5) is supported, got {magic!r}")
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise ParseError(f"{path}: malformed PGM header", offset=0) from None
    if maxval > 255:
        raise UnsupportedFormatError(f"{path}: 16-bit PGM (maxval {maxval}) is not supported")
    if len(data) < pos + w * h:
        raise ParseError(f"{path}: raster truncated", offset=len(data))
    return np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos).reshape(h, w)


def load_image(path):
    """Grayscale image as a float ``(rows, cols)`` array with values in [0, 255]."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head[:2] in (b"P5", b"P2"):
        return read_pgm(path).astype(np.float64)
    if head == b"\x89PNG\r\n\x1a\n":
        from PIL import Image
        with Image.open(path) as im:
            if im.mode != "L":
                raise UnsupportedFormatError(
                    f"{path}: PNG mode {im.mode!r} is not 8-bit grayscale")
            return np.asarray(im, dtype=np.float64)
    raise UnsupportedFormatError(f"{path}: not a PGM or PNG file")


def write_image(img, path):
    """Write ``img`` rounded to 8 bits, as PNG if the suffix is ``.png``, else P5 PGM."""
    a = np.clip(np.rint(np.asarray(img, dtype=np.float64)), 0, 255).astype(np.uint8)
    if a.ndim != 2:
        raise UnsupportedFormatError(f"expected a 2-D grayscale image, got shape {a.shape}")
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image
        Image.fromarray(a, mode="L").save(path)
        return
    h, w = a.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + a.tobytes())


def load_mask(path):
    """Observation mask: True where the pixel value is 255 (observed)."""
    m = load_image(path)
    if not np.all((m == 0) | (m == 255)):
        raise ParseError(f"{path}: mask pixels must be 0 or 255")
    return m == 255


def write_mask(mask, path):
    write_image(np.where(np.asarray(mask, dtype=bool), 255, 0), path)
