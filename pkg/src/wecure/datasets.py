"""Small datasets bundled with the package.

``mnist2000``
    2000 handwritten digits, 200 per class, 28x28 pixels scaled to [0, 1].
``cameraman128``
    128x128 8-bit grayscale crop of the classic cameraman photograph.
"""
from importlib import resources

from . import io


def data_path(name):
    """Filesystem path of a bundled data file."""
    return resources.files(__package__).joinpath("data", name)


def load_mnist2000():
    """Return ``(points, labels)``: a ``(2000, 784)`` float array and int labels."""
    X = io.load_idx(data_path("mnist2000-images-idx3-ubyte.gz"))
    y = io.load_idx(data_path("mnist2000-labels-idx1-ubyte.gz"))
    return X, y


def load_cameraman128():
    """Return the 128x128 test image as floats in [0, 255]."""
    return io.load_image(data_path("cameraman128.pgm"))
