"""
Inpainting on the patch manifold.

Every pixel is represented by the patch centered on it plus its (scaled)
position, a weight graph is built on these vectors and the image is
re-interpolated from the observed pixels. Patches are then re-extracted
from the new image and the process repeats.

Example
-------
```py
from wecure import inpaint, io, metrics

truth = io.load_image("cameraman128.pgm")
mask = inpaint.sample_mask(truth.shape, 0.2, seed=0)
restored = inpaint.inpaint(truth, mask, inpaint.InpaintConfig(method="wecure"))
print(metrics.psnr(restored, truth))
```
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidArgumentError, NonConvergenceError
from .graph import GraphConfig, build_weight_graph
from .solver import METHODS, RecoveryProblem, recover

log = logging.getLogger(__name__)


def _patch_shape(s1, s2):
    s2 = s1 if s2 is None else s2
    for s in (s1, s2):
        if s < 1 or s % 2 == 0:
            raise InvalidArgumentError(f"patch sides must be odd positive integers, got {s1}x{s2}")
    return int(s1), int(s2)


def extract_patches(img, s1, s2=None):
    """One flattened ``s1 x s2`` patch per pixel, row-major over pixels.

    Windows crossing the border are mirrored about the edge sample, which
    is not repeated (index -1 reads index 1).
    """
    s1, s2 = _patch_shape(s1, s2)
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise InvalidArgumentError(f"expected a 2-D image, got shape {img.shape}")
    r1, r2 = s1 // 2, s2 // 2
    padded = np.pad(img, ((r1, r1), (r2, r2)), mode="reflect")
    windows = sliding_window_view(padded, (s1, s2))
    return windows.reshape(img.size, s1 * s2)


class PatchSet(NamedTuple):
    """Semi-local patch vectors: the raw patch followed by two scaled coordinates."""
    vectors: np.ndarray
    patch_shape: Tuple[int, int]
    lam_bar: float

    @property
    def center_values(self):
        s1, s2 = self.patch_shape
        return self.vectors[:, (s1 // 2) * s2 + s2 // 2]


def semilocal_augment(patches, shape, peak, lam_bar, patch_shape=None):
    """Append ``lam_bar * (i * peak / m, j * peak / n)`` to each patch.

    ``(i, j)`` are 1-based row and column indices of the center pixel of an
    ``m x n`` image and ``peak`` is the largest observed intensity.
    """
    m, n = shape
    patches = np.asarray(patches, dtype=np.float64)
    if patches.shape[0] != m * n:
        raise InvalidArgumentError(f"{patches.shape[0]} patches for a {m}x{n} image")
    if lam_bar < 0:
        raise InvalidArgumentError(f"lam_bar must be nonnegative, got {lam_bar}")
    if patch_shape is None:
        side = int(round(np.sqrt(patches.shape[1])))
        patch_shape = (side, side)
    rows, cols = np.meshgrid(np.arange(1, m + 1), np.arange(1, n + 1), indexing="ij")
    coords = np.column_stack([rows.ravel() * peak / m, cols.ravel() * peak / n])
    return PatchSet(np.hstack([patches, lam_bar * coords]), tuple(patch_shape), float(lam_bar))


def observed_peak(img, mask):
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise InvalidArgumentError("the observation mask is empty")
    return float(np.max(np.abs(np.asarray(img)[mask])))


def lambda_schedule(initial, floor, step):
    """Semi-local weight after ``step`` decrements of one, never below ``floor``."""
    if initial < floor:
        raise InvalidArgumentError(f"initial value {initial} is below the floor {floor}")
    return max(initial - step, floor)


def sample_mask(shape, rate, seed=None):
    """Observation mask with ``floor(rate * pixels)`` uniformly chosen pixels."""
    if not 0 < rate <= 1:
        raise InvalidArgumentError(f"sampling rate must lie in (0, 1], got {rate}")
    size = int(np.prod(shape))
    count = int(np.floor(rate * size))
    rng = np.random.default_rng(seed)
    mask = np.zeros(size, dtype=bool)
    mask[rng.choice(size, size=count, replace=False)] = True
    return mask.reshape(shape)


def initialize_image(img, mask, seed=None):
    """Fill missing pixels with Gaussian noise matching the observed mean and spread."""
    img = np.asarray(img, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != img.shape:
        raise InvalidArgumentError(f"mask shape {mask.shape} differs from image shape {img.shape}")
    if not mask.any():
        raise InvalidArgumentError("the observation mask is empty")
    obs = img[mask]
    mu, sd = obs.mean(), obs.std()
    rng = np.random.default_rng(seed)
    out = img.copy()
    missing = ~mask
    out[missing] = np.clip(rng.normal(mu, sd, size=int(missing.sum())), 0, 255)
    return out


@dataclass(frozen=True)
class InpaintConfig:
    """Settings for :func:`inpaint`.

    ``outer_iters`` counts all outer iterations, including the first
    ``warm_start_iters`` which use ``wnll`` when ``method`` is ``cure`` or
    ``wecure``. ``tol_change`` optionally stops early once the relative
    change between iterates falls below it.
    """
    method: str = "wecure"
    patch_size: Tuple[int, int] = (11, 11)
    lam: float = 1.0
    gamma: Optional[float] = None
    k_sigma: int = 20
    k_trunc: int = 50
    outer_iters: int = 10
    warm_start_iters: int = 6
    lam_bar_start: float = 10.0
    lam_bar_floor: float = 3.0
    cg_tol: float = 1e-6
    cg_max_iters: Optional[int] = None
    tol_change: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidArgumentError(f"unknown method {self.method!r}")
        if self.outer_iters < 1:
            raise InvalidArgumentError("outer_iters must be at least 1")
        if self.warm_start_iters < 0:
            raise InvalidArgumentError("warm_start_iters must be nonnegative")
        _patch_shape(*self.patch_size)
        GraphConfig(self.k_sigma, self.k_trunc)
        lambda_schedule(self.lam_bar_start, self.lam_bar_floor, 0)

    def method_at(self, k):
        if self.method in ("cure", "wecure") and k < self.warm_start_iters:
            return "wnll"
        return self.method


def inpaint(img, mask, cfg=InpaintConfig(), callback=None, resume=None):
    """Restore the pixels outside ``mask`` (True = observed).

    ``callback(k, method, image)``, when given, sees every iterate.
    ``resume=(k, image)`` continues from the iterate produced by outer
    iteration ``k - 1`` of an earlier run, e.g. to branch several methods off
    one shared warm start.
    Returns the restored image with observed pixels equal to ``img``.
    """
    f = np.asarray(img, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if resume is None:
        first, u = 0, initialize_image(f, mask, cfg.seed)
    else:
        first, u = resume
        u = np.array(u, dtype=np.float64)
        if u.shape != f.shape or not 0 <= first <= cfg.outer_iters:
            raise InvalidArgumentError("resume state does not match the image or config")
    if mask.all():
        return u
    peak = observed_peak(f, mask)
    labeled = np.flatnonzero(mask.ravel())
    values = f.ravel()[labeled]
    graph_cfg = GraphConfig(cfg.k_sigma, cfg.k_trunc)
    for k in range(first, cfg.outer_iters):
        lam_bar = lambda_schedule(cfg.lam_bar_start, cfg.lam_bar_floor, k)
        method = cfg.method_at(k)
        patches = semilocal_augment(extract_patches(u, *cfg.patch_size), f.shape, peak,
                                    lam_bar, cfg.patch_size)
        graph = build_weight_graph(patches.vectors, graph_cfg)
        problem = RecoveryProblem(graph, labeled, values, method, cfg.lam, cfg.gamma,
                                  cfg.cg_tol, cfg.cg_max_iters)
        try:
            new = recover(problem).reshape(f.shape)
        except NonConvergenceError as exc:
            raise NonConvergenceError(exc.residual, exc.iterations,
                                      f"outer iteration {k}: {exc}") from None
        np.clip(new, 0, 255, out=new)
        new[mask] = f[mask]
        change = np.linalg.norm(new - u) / max(np.linalg.norm(u), 1e-300)
        log.info("iteration %d (%s, lam_bar=%g): relative change %.3e", k, method, lam_bar, change)
        u = new
        if callback is not None:
            callback(k, method, u)
        if cfg.tol_change is not None and change < cfg.tol_change:
            break
    return u
