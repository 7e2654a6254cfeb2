"""
kNN weight graphs and the graph Laplacian.

Points are stored as an ``(n, d)`` float array (a point cloud). Weights use
a locally scaled Gaussian kernel

    w(x, y) = exp(-|x - y|^2 / sigma(x)^2),

where ``sigma(x)`` is the distance from ``x`` to its ``k_sigma``-th nearest
neighbor. Each row is truncated to the ``k_trunc`` nearest neighbors and the
result is symmetrized by averaging with its transpose on the union support.

Example
-------
```py
import numpy as np
from wecure import graph

X = np.random.default_rng(0).random((500, 2))
W = graph.build_weight_graph(X, graph.GraphConfig(k_sigma=10, k_trunc=20))
L = graph.assemble_laplacian_matrix(W)
```
"""
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import DegenerateBandwidthError, InvalidArgumentError

_BLOCK_ROWS = 512


@dataclass(frozen=True)
class GraphConfig:
    """Neighborhood sizes for :func:`build_weight_graph`.

    ``k_sigma`` selects the neighbor whose distance sets the bandwidth,
    ``k_trunc`` the number of neighbors kept per row. Self loops are never
    stored.
    """
    k_sigma: int = 20
    k_trunc: int = 50
    self_loops: bool = False

    def __post_init__(self):
        if self.self_loops:
            raise InvalidArgumentError("self loops are not supported")
        if not (1 <= self.k_sigma <= self.k_trunc):
            raise InvalidArgumentError(
                f"need 1 <= k_sigma <= k_trunc, got k_sigma={self.k_sigma}, "
                f"k_trunc={self.k_trunc}")

    def check(self, n):
        if self.k_trunc >= n:
            raise InvalidArgumentError(
                f"k_trunc={self.k_trunc} must be smaller than the number of points n={n}")


@dataclass(frozen=True)
class WeightGraph:
    """Symmetric sparse weight matrix with zero diagonal.

    Attributes
    ----------
    weights : scipy.sparse.csr_matrix
        ``(n, n)`` symmetric weights, all stored entries in (0, 1].
    degree : numpy.ndarray
        Row sums of ``weights``.
    """
    weights: sparse.csr_matrix
    degree: np.ndarray

    @property
    def n(self):
        return self.weights.shape[0]

    @classmethod
    def from_matrix(cls, W):
        """Wrap an explicit weight matrix (dense or sparse).

        The matrix must be square, exactly symmetric, have zero diagonal and
        entries in [0, 1]; zero entries are treated as missing edges.
        """
        W = sparse.csr_matrix(W, dtype=np.float64)
        if W.shape[0] != W.shape[1]:
            raise InvalidArgumentError(f"weight matrix must be square, got {W.shape}")
        W.eliminate_zeros()
        if W.nnz and (W.data.min() < 0 or W.data.max() > 1 or not np.all(np.isfinite(W.data))):
            raise InvalidArgumentError("weights must lie in (0, 1]")
        if W.diagonal().any():
            raise InvalidArgumentError("weight matrix must have a zero diagonal")
        if (W != W.T).nnz:
            raise InvalidArgumentError("weight matrix must be exactly symmetric")
        W.sort_indices()
        return cls(W, _row_sums(W))


def as_points(points):
    """Validate and return a point cloud as a float ``(n, d)`` array.

    A 1-D input is read as ``n`` points on the real line.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InvalidArgumentError(f"expected an (n, d) array of points, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidArgumentError("point coordinates must be finite")
    return X


def knn_search(points, query_index, k):
    """Exact k nearest neighbors of one point, self excluded.

    Returns a list of ``(vertex_id, distance)`` sorted by distance, ties
    broken by the smaller vertex id.
    """
    X = as_points(points)
    n = X.shape[0]
    if not 0 <= query_index < n:
        raise InvalidArgumentError(f"query index {query_index} out of range for n={n}")
    if not 1 <= k < n:
        raise InvalidArgumentError(f"need 1 <= k < n, got k={k}, n={n}")
    ids, dist = _exact_rows(X, np.array([query_index]), k)
    return [(int(j), float(r)) for j, r in zip(ids[0], dist[0])]


def knn_table(points, k):
    """Exact k nearest neighbors of every point.

    Returns
    -------
    ids : (n, k) int array
    dist : (n, k) float array
        Euclidean distances, ascending per row; equal distances are ordered
        by vertex id.

    Notes
    -----
    Candidates are preselected with a float32 Gram-matrix expansion, then
    re-ranked with distances computed directly in float64. Rows whose
    candidate list cannot be certified against the rounding error bound are
    retried in float64 and, failing that, scanned exhaustively, so the
    result does not depend on rounding.
    """
    X = as_points(points)
    n, d = X.shape
    if not 1 <= k < n:
        raise InvalidArgumentError(f"need 1 <= k < n, got k={k}, n={n}")
    kc = k + max(8, k // 4)
    if kc >= n - 1:
        return _exact_rows(X, np.arange(n), k)

    Xc = X - X.mean(axis=0)
    sq = np.einsum("ij,ij->i", Xc, Xc)
    ids = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k))
    rows = np.arange(n)
    # float32 pass for everything, float64 pass for rows it cannot certify
    for dtype in (np.float32, np.float64):
        rows = _certified_rows(X, Xc, sq, rows, k, kc, dtype, ids, dist)
        if rows.size == 0:
            return ids, dist
    ids[rows], dist[rows] = _exact_rows(X, rows, k)
    return ids, dist


def _certified_rows(X, Xc, sq, rows, k, kc, dtype, ids, dist):
    """Fill ``ids``/``dist`` for ``rows``; return the rows left uncertified."""
    d = X.shape[1]
    Y = Xc.astype(dtype)
    sqy = sq.astype(dtype)
    # bound on the rounding error of sq_i + sq_j - 2 <x_i, x_j> in ``dtype``
    err_scale = 2.0 * (d + 4) * float(np.finfo(dtype).eps)
    sq_max = sq.max()
    left = []
    for start in range(0, rows.size, _BLOCK_ROWS):
        blk = rows[start:start + _BLOCK_ROWS]
        approx = sqy[blk, None] + sqy[None, :] - 2.0 * (Y[blk] @ Y.T)
        approx[np.arange(blk.size), blk] = np.inf
        cand = np.argpartition(approx, kc, axis=1)[:, :kc + 1]
        # every excluded point has an approximate value >= the largest kept one
        thresh = np.take_along_axis(approx, cand, axis=1).max(axis=1).astype(np.float64)
        exact = _distances(X[cand], X[blk, None, :])
        order = np.lexsort((cand, exact), axis=1)[:, :k]
        ids[blk] = np.take_along_axis(cand, order, axis=1)
        dist[blk] = np.take_along_axis(exact, order, axis=1)
        bound = err_scale * (sq[blk] + sq_max)
        left.append(blk[dist[blk, -1] ** 2 + 2.0 * bound >= thresh])
    return np.concatenate(left)


def _distances(a, b):
    return np.sqrt(np.sum((a - b) ** 2, axis=-1))


def _exact_rows(X, rows, k):
    n = X.shape[0]
    ids = np.empty((len(rows), k), dtype=np.int64)
    dist = np.empty((len(rows), k))
    step = max(1, 4_000_000 // (n * X.shape[1]))
    for s in range(0, len(rows), step):
        r = rows[s:s + step]
        dd = _distances(X[None, :, :], X[r, None, :])
        dd[np.arange(len(r)), r] = np.inf
        allid = np.broadcast_to(np.arange(n), dd.shape)
        order = np.lexsort((allid, dd), axis=1)[:, :k]
        ids[s:s + step] = order
        dist[s:s + step] = np.take_along_axis(dd, order, axis=1)
    return ids, dist


def local_scale(points, cfg):
    """Per-point bandwidth: distance to the ``cfg.k_sigma``-th neighbor."""
    X = as_points(points)
    if cfg.k_sigma >= X.shape[0]:
        raise InvalidArgumentError(
            f"k_sigma={cfg.k_sigma} must be smaller than n={X.shape[0]}")
    _, dist = knn_table(X, cfg.k_sigma)
    return _check_sigma(dist[:, -1])


def _check_sigma(sigma):
    bad = np.flatnonzero(sigma <= 0)
    if bad.size:
        raise DegenerateBandwidthError(bad[0])
    return sigma


def gaussian_weight(dist, sigma):
    """``exp(-(dist / sigma)^2)``."""
    return np.exp(-(np.asarray(dist) / sigma) ** 2)


def build_weight_graph(points, cfg):
    """Truncated, locally scaled Gaussian kNN graph (see module docstring)."""
    X = as_points(points)
    n = X.shape[0]
    cfg.check(n)
    ids, dist = knn_table(X, cfg.k_trunc)
    sigma = _check_sigma(dist[:, cfg.k_sigma - 1].copy())
    w = gaussian_weight(dist, sigma[:, None])
    rows = np.repeat(np.arange(n), cfg.k_trunc)
    W = sparse.csr_matrix((w.ravel(), (rows, ids.ravel())), shape=(n, n))
    W = ((W + W.T) * 0.5).tocsr()
    W.setdiag(0.0)
    W.eliminate_zeros()
    W.sort_indices()
    return WeightGraph(W, _row_sums(W))


def _row_sums(W):
    # same accumulation as W @ u, so W @ 1 - degree is exactly zero
    return W @ np.ones(W.shape[0])


def graph_laplacian_apply(graph, u):
    """``(GL u)_i = sum_j w_ij (u_i - u_j)``."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (graph.n,):
        raise InvalidArgumentError(f"expected a vector of length {graph.n}, got shape {u.shape}")
    return graph.degree * u - graph.weights @ u


def assemble_laplacian_matrix(graph):
    """Sparse matrix ``L = diag(degree) - W``."""
    L = (sparse.diags(graph.degree) - graph.weights).tocsr()
    L.sort_indices()
    return L


def dirichlet_energy(graph, u):
    """``1/2 sum_ij w_ij (u_i - u_j)^2`` evaluated edge by edge."""
    W = graph.weights.tocoo()
    u = np.asarray(u, dtype=np.float64)
    return 0.5 * np.sum(W.data * (u[W.row] - u[W.col]) ** 2)
