"""Image quality: PSNR and Gaussian-window SSIM."""
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import InvalidArgumentError


def _pair(f, g):
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != g.shape:
        raise InvalidArgumentError(f"image shapes differ: {f.shape} vs {g.shape}")
    return f, g


def psnr(f, f_star, peak=255.0):
    """Peak signal-to-noise ratio in dB, ``20 log10(peak / RMSE)``.

    Returns ``inf`` for identical images.
    """
    f, f_star = _pair(f, f_star)
    rmse = np.sqrt(np.mean((f - f_star) ** 2))
    if rmse == 0:
        return float("inf")
    return float(20.0 * np.log10(peak / rmse))


@dataclass(frozen=True)
class SsimParams:
    """SSIM exponents, stabilizers and window.

    Defaults are the usual ``C1 = (0.01 L)^2``, ``C2 = (0.03 L)^2``,
    ``C3 = C2 / 2`` with ``L = 255`` and an 11x11 Gaussian window of
    standard deviation 1.5.
    """
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    c1: float = (0.01 * 255) ** 2
    c2: float = (0.03 * 255) ** 2
    c3: float = (0.03 * 255) ** 2 / 2
    sigma: float = 1.5
    radius: int = 5

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3) <= 0:
            raise InvalidArgumentError("SSIM stabilizers must be positive")


def ssim_map(x, y, p=SsimParams()):
    """Local SSIM for every window lying fully inside the image."""
    x, y = _pair(x, y)
    r = p.radius
    if x.ndim != 2 or min(x.shape) < 2 * r + 1:
        raise InvalidArgumentError(
            f"images must be 2-D and at least {2 * r + 1} pixels per side, got {x.shape}")

    def local_mean(a):
        return gaussian_filter(a, p.sigma, truncate=r / p.sigma)[r:-r, r:-r]

    mx, my = local_mean(x), local_mean(y)
    vx = local_mean(x * x) - mx * mx
    vy = local_mean(y * y) - my * my
    cov = local_mean(x * y) - mx * my
    lum = (2 * mx * my + p.c1) / (mx * mx + my * my + p.c1)
    if p.beta == p.gamma == 1 and p.c3 == p.c2 / 2:
        # contrast * structure collapses to a single ratio in this case
        return lum ** p.alpha * (2 * cov + p.c2) / (vx + vy + p.c2)
    sx = np.sqrt(np.maximum(vx, 0))
    sy = np.sqrt(np.maximum(vy, 0))
    con = (2 * sx * sy + p.c2) / (sx * sx + sy * sy + p.c2)
    struct = (cov + p.c3) / (sx * sy + p.c3)
    return lum ** p.alpha * con ** p.beta * struct ** p.gamma


def ssim(x, y, p=SsimParams()):
    """Mean structural similarity of two grayscale images."""
    return float(np.mean(ssim_map(x, y, p)))
