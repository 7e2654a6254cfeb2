"""
One-vs-rest semi-supervised classification.

For every class ``c`` an indicator is interpolated from the labeled points
(1 on points labeled ``c``, 0 on the other labeled points) and each
unlabeled point takes the class whose indicator is largest there.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .graph import GraphConfig, as_points, build_weight_graph
from .solver import SolverParams, assemble_system, solve_cg

# bandwidth neighbor used for the three benchmark families
K_SIGMA = {"mnist": 20, "coil20": 15, "isolet": 15}


@dataclass(frozen=True)
class LabeledDataset:
    """Point cloud with class labels on the subset ``labeled``.

    ``classes`` defaults to the distinct labels present; when given
    explicitly every class must occur among the labeled points.
    """
    points: np.ndarray
    labeled: np.ndarray
    labels: np.ndarray
    classes: np.ndarray = None

    def __post_init__(self):
        X = as_points(self.points)
        labeled = np.asarray(self.labeled, dtype=np.int64).ravel()
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if labeled.size == 0:
            raise InvalidArgumentError("no labeled points")
        if labeled.shape != labels.shape:
            raise InvalidArgumentError("labeled ids and labels differ in length")
        if labeled.min() < 0 or labeled.max() >= X.shape[0]:
            raise InvalidArgumentError("labeled id out of range")
        if np.unique(labeled).size != labeled.size:
            raise InvalidArgumentError("labeled ids must be distinct")
        present = np.unique(labels)
        classes = present if self.classes is None else np.unique(np.asarray(self.classes, dtype=np.int64))
        missing = np.setdiff1d(classes, present)
        if missing.size:
            raise InvalidArgumentError(f"classes without labeled points: {missing.tolist()}")
        extra = np.setdiff1d(present, classes)
        if extra.size:
            raise InvalidArgumentError(f"labels outside the class set: {extra.tolist()}")
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "labeled", labeled)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "classes", classes)

    @property
    def n(self):
        return self.points.shape[0]


def _graph(ds, graph, graph_cfg):
    if graph is not None:
        if graph.n != ds.n:
            raise InvalidArgumentError(f"graph has {graph.n} vertices, dataset {ds.n}")
        return graph
    return build_weight_graph(ds.points, graph_cfg or GraphConfig())


def interpolate_indicators(ds, params=SolverParams(), graph=None, graph_cfg=None):
    """Indicator interpolants for all classes, shape ``(len(ds.classes), n)``.

    The system matrix is assembled once and reused for every class.
    """
    phi = np.zeros((ds.classes.size, ds.n))
    onehot = (ds.labels[None, :] == ds.classes[:, None]).astype(np.float64)
    phi[:, ds.labeled] = onehot
    if ds.labeled.size == ds.n:
        return phi
    graph = _graph(ds, graph, graph_cfg)
    sys = None
    for c, g in enumerate(onehot):
        if sys is None:
            sys = assemble_system(params.problem(graph, ds.labeled, g))
        else:
            sys = sys.with_observed(g)
        phi[c, sys.unlabeled] = solve_cg(sys, sys.b, params.cg_tol, params.cg_max_iters).x
    return phi


def interpolate_indicator(ds, class_id, params=SolverParams(), graph=None, graph_cfg=None):
    """Interpolant of the indicator of ``class_id`` over all points."""
    if class_id not in ds.classes:
        raise InvalidArgumentError(f"unknown class {class_id}")
    g = (ds.labels == class_id).astype(np.float64)
    phi = np.empty(ds.n)
    phi[ds.labeled] = g
    if ds.labeled.size < ds.n:
        sys = assemble_system(params.problem(_graph(ds, graph, graph_cfg), ds.labeled, g))
        phi[sys.unlabeled] = solve_cg(sys, sys.b, params.cg_tol, params.cg_max_iters).x
    return phi


def classify(ds, params=SolverParams(), graph=None, graph_cfg=None):
    """Predicted class for every point; labeled points keep their label.

    Ties in the argmax go to the smallest class id.
    """
    phi = interpolate_indicators(ds, params, graph, graph_cfg)
    pred = ds.classes[np.argmax(phi, axis=0)]
    pred[ds.labeled] = ds.labels
    return pred


def accuracy(predicted, truth, exclude=()):
    """Fraction of agreeing entries outside ``exclude``.

    Returns 1.0 (with a warning) when nothing is left to evaluate.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise InvalidArgumentError(
            f"length mismatch: {predicted.shape} vs {truth.shape}")
    keep = np.ones(truth.shape[0], dtype=bool)
    keep[np.asarray(sorted(exclude), dtype=np.int64)] = False
    if not keep.any():
        warnings.warn("no points left to evaluate; reporting accuracy 1.0")
        return 1.0
    return float(np.mean(predicted[keep] == truth[keep]))


def sample_training_set(labels, count, rng, max_attempts=100):
    """Draw ``count`` distinct ids uniformly so that every class is present.

    Redraws up to ``max_attempts`` times.
    """
    labels = np.asarray(labels)
    n = labels.size
    classes = np.unique(labels)
    if not classes.size <= count <= n:
        raise InvalidArgumentError(
            f"cannot draw {count} labels covering {classes.size} classes from {n} points")
    for _ in range(max_attempts):
        ids = np.sort(rng.choice(n, size=count, replace=False))
        if np.unique(labels[ids]).size == classes.size:
            return ids
    raise InvalidArgumentError(
        f"no draw of {count} labels covered all {classes.size} classes in {max_attempts} attempts")
