"""
Graph-based interpolation on point clouds with curvature regularization.

Unknown values on a point cloud are recovered from a labeled subset by
minimizing a Dirichlet energy, optionally with a second-order (squared graph
Laplacian) penalty and reweighting of the labeled terms. The same solver
drives semi-supervised classification (:mod:`wecure.ssl`) and patch-based
image inpainting (:mod:`wecure.inpaint`).

Methods
-------
``ldmm``    Dirichlet energy only.
``wnll``    Dirichlet energy, labeled terms weighted by ``n / |S|``.
``cure``    Dirichlet energy plus ``lam / 2 * |GL u|^2``.
``wecure``  both of the above.
"""
from .errors import (DegenerateBandwidthError, InvalidArgumentError, NonConvergenceError,
                     ParseError, SingularSystemError, UnsupportedFormatError, WecureError)
from .graph import GraphConfig, WeightGraph, build_weight_graph
from .inpaint import InpaintConfig
from .metrics import psnr, ssim
from .solver import METHODS, RecoveryProblem, SolverParams, recover
from .ssl import LabeledDataset, classify

__version__ = "0.1.0"

__all__ = [
    "DegenerateBandwidthError", "GraphConfig", "InpaintConfig", "InvalidArgumentError",
    "LabeledDataset", "METHODS", "NonConvergenceError", "ParseError", "RecoveryProblem",
    "SingularSystemError", "SolverParams", "UnsupportedFormatError", "WecureError",
    "WeightGraph", "build_weight_graph", "classify", "psnr", "recover", "ssim",
]
