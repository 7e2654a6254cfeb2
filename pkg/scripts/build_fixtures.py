"""Regenerate the bundled fixtures in src/wecure/data/.

cameraman128.pgm
    Rows 60:188, columns 180:308 of ``skimage.data.camera()``.
mnist2000-*.gz
    200 images per digit drawn (seed 20190521) from the 5000-sample MNIST
    subset shipped inside the mlxtend wheel (``mlxtend/data/data/mnist_5k.csv.gz``).
    Pass the path of a downloaded wheel: ``pip download --no-deps mlxtend``.
"""
import gzip
import io
import sys
import zipfile
from pathlib import Path

import numpy as np
import skimage.data

from wecure.io import write_idx, write_image

DATA = Path(__file__).resolve().parents[1] / "src" / "wecure" / "data"


def cameraman():
    write_image(skimage.data.camera()[60:188, 180:308], DATA / "cameraman128.pgm")


def mnist(wheel):
    with zipfile.ZipFile(wheel) as z:
        raw = gzip.decompress(z.read("mlxtend/data/data/mnist_5k.csv.gz"))
    table = np.loadtxt(io.BytesIO(raw), delimiter=",")
    X, y = table[:, :-1].astype(np.uint8), table[:, -1].astype(np.uint8)
    rng = np.random.default_rng(20190521)
    keep = np.concatenate([rng.choice(np.flatnonzero(y == c), 200, replace=False)
                           for c in range(10)])
    keep = rng.permutation(keep)
    write_idx(DATA / "mnist2000-images-idx3-ubyte.gz", X[keep].reshape(-1, 28, 28))
    write_idx(DATA / "mnist2000-labels-idx1-ubyte.gz", y[keep])


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    cameraman()
    if len(sys.argv) > 1:
        mnist(sys.argv[1])
