"""
Graph interpolation with first- and second-order (curvature) regularization.

Given a weight graph on ``n`` points, values ``g`` on a labeled subset ``S``
and the unlabeled remainder ``U``, the unknowns ``u_U`` solve

    (L_UU + gamma*diag(DW) + lam*(L^T D L)_UU) u_U
        = W_US g + gamma*W_SU^T g - lam*(L^T D L)_US g

with ``L`` the graph Laplacian, ``DW_i = sum_{j in S} w_ij`` and
``D = diag(1 on U, gamma on S)``. The four methods differ only in the
effective coefficients:

======  =========  ============
method  lam        gamma
======  =========  ============
ldmm    0          1
wnll    0          |P|/|S|
cure    lam        1
wecure  lam        |P|/|S|
======  =========  ============
"""
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse import csgraph

from .errors import InvalidArgumentError, NonConvergenceError, SingularSystemError
from .graph import WeightGraph, assemble_laplacian_matrix

METHODS = ("ldmm", "wnll", "cure", "wecure")
DENSE_LIMIT = 2000


@dataclass(frozen=True)
class RecoveryProblem:
    """Interpolation problem on a weight graph.

    Parameters
    ----------
    graph : WeightGraph
    labeled : array of int
        Vertex ids with known values (the set S).
    observed : array of float
        Values at ``labeled``, in the same order.
    method : {'ldmm', 'wnll', 'cure', 'wecure'}
    lam : float
        Curvature coefficient; ignored by ldmm and wnll.
    gamma : float, optional
        Labeled-point weight for wnll/wecure. Defaults to ``n / |S|``.
    cg_tol, cg_max_iters
        Conjugate gradient stopping rule; ``cg_max_iters`` defaults to
        ``10 * |U|``.
    """
    graph: WeightGraph
    labeled: np.ndarray
    observed: np.ndarray
    method: str = "wecure"
    lam: float = 1.0
    gamma: Optional[float] = None
    cg_tol: float = 1e-6
    cg_max_iters: Optional[int] = None

    def __post_init__(self):
        labeled = np.asarray(self.labeled, dtype=np.int64).ravel()
        observed = np.asarray(self.observed, dtype=np.float64).ravel()
        n = self.graph.n
        if self.method not in METHODS:
            raise InvalidArgumentError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if labeled.size == 0:
            raise InvalidArgumentError("the labeled set is empty")
        if labeled.shape != observed.shape:
            raise InvalidArgumentError(
                f"{labeled.size} labeled ids but {observed.size} observed values")
        if labeled.min() < 0 or labeled.max() >= n:
            raise InvalidArgumentError(f"labeled ids must lie in [0, {n})")
        if np.unique(labeled).size != labeled.size:
            raise InvalidArgumentError("labeled ids must be distinct")
        if not np.all(np.isfinite(observed)):
            raise InvalidArgumentError("observed values must be finite")
        if self.lam < 0:
            raise InvalidArgumentError(f"lam must be nonnegative, got {self.lam}")
        if self.gamma is not None and self.gamma <= 0:
            raise InvalidArgumentError(f"gamma must be positive, got {self.gamma}")
        if self.cg_tol <= 0:
            raise InvalidArgumentError("cg_tol must be positive")
        object.__setattr__(self, "labeled", labeled)
        object.__setattr__(self, "observed", observed)

    def effective_params(self):
        """``(lam, gamma)`` actually used by the selected method."""
        weight = self.gamma if self.gamma is not None else self.graph.n / self.labeled.size
        return {
            "ldmm": (0.0, 1.0),
            "wnll": (0.0, float(weight)),
            "cure": (float(self.lam), 1.0),
            "wecure": (float(self.lam), float(weight)),
        }[self.method]

    @property
    def unlabeled(self):
        mask = np.ones(self.graph.n, dtype=bool)
        mask[self.labeled] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True)
class AssembledSystem:
    """Linear system over the unlabeled vertices.

    The operator is applied matrix-free (``A @ v``); :meth:`matrix` forms it
    explicitly, which is only practical for moderate sizes since
    ``(L^T D L)`` couples second neighbors.
    """
    laplacian: sparse.csr_matrix
    d: np.ndarray
    unlabeled: np.ndarray
    labeled: np.ndarray
    dw: np.ndarray
    lam: float
    gamma: float
    b: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def shape(self):
        m = self.unlabeled.size
        return (m, m)

    def __matmul__(self, v):
        L, U = self.laplacian, self.unlabeled
        x = np.zeros(L.shape[0])
        x[U] = v
        y = L @ x
        out = y[U] + self.gamma * self.dw * v
        if self.lam:
            out += self.lam * (L @ (self.d * y))[U]  # L is symmetric
        return out

    def matrix(self):
        """Explicit sparse ``A``, exactly symmetric."""
        if "A" not in self._cache:
            L, U = self.laplacian, self.unlabeled
            LU = L[:, U]
            A = LU[U] + sparse.diags(self.gamma * self.dw)
            if self.lam:
                A = A + self.lam * (LU.T @ sparse.diags(self.d) @ LU)
            A = A.tocsr()
            A = ((A + A.T) * 0.5).tocsr()
            A.sort_indices()
            self._cache["A"] = A
        return self._cache["A"]

    def rhs(self, observed):
        """Right-hand side for new labeled values; the matrix is unchanged."""
        g = np.asarray(observed, dtype=np.float64)
        if g.shape != self.labeled.shape:
            raise InvalidArgumentError(
                f"expected {self.labeled.size} observed values, got shape {g.shape}")
        L, U, S = self.laplacian, self.unlabeled, self.labeled
        W = -L  # off-diagonal blocks of -L are the weights
        b = W[U][:, S] @ g + self.gamma * (W[S][:, U].T @ g)
        if self.lam:
            x = np.zeros(L.shape[0])
            x[S] = g
            b = b - self.lam * (L @ (self.d * (L @ x)))[U]
        return b

    def with_observed(self, observed):
        return replace(self, b=self.rhs(observed), _cache=self._cache)


@dataclass(frozen=True)
class SolverParams:
    """Method and coefficients, independent of any particular graph."""
    method: str = "wecure"
    lam: float = 1.0
    gamma: Optional[float] = None
    cg_tol: float = 1e-6
    cg_max_iters: Optional[int] = None

    def problem(self, graph, labeled, observed, method=None):
        return RecoveryProblem(graph, labeled, observed, method or self.method,
                               self.lam, self.gamma, self.cg_tol, self.cg_max_iters)


class CGResult(NamedTuple):
    x: np.ndarray
    iterations: int
    residual: float


def check_connectivity(graph, labeled):
    """Raise if some connected component contains no labeled vertex."""
    ncomp, comp = csgraph.connected_components(graph.weights, directed=False)
    if ncomp == 1:
        return
    seeded = np.zeros(ncomp, dtype=bool)
    seeded[comp[labeled]] = True
    orphans = np.flatnonzero(~seeded[comp])
    if orphans.size:
        raise SingularSystemError(
            f"{orphans.size} vertices lie in components without labeled points "
            f"(e.g. vertex {orphans[0]})", vertex=int(orphans[0]))


def assemble_system(problem):
    lam, gamma = problem.effective_params()
    check_connectivity(problem.graph, problem.labeled)
    U, S = problem.unlabeled, problem.labeled
    L = assemble_laplacian_matrix(problem.graph)
    d = np.ones(problem.graph.n)
    d[S] = gamma
    dw = problem.graph.weights[U][:, S] @ np.ones(S.size)
    sys = AssembledSystem(L, d, U, S, dw, lam, gamma, np.zeros(U.size))
    return replace(sys, b=sys.rhs(problem.observed))


def _operator(A):
    if isinstance(A, AssembledSystem):
        return A
    if sparse.issparse(A):
        return A.tocsr()
    return np.asarray(A, dtype=np.float64)


def solve_cg(A, b, tol=1e-6, max_iters=None):
    """Unpreconditioned conjugate gradient from a zero initial guess.

    Stops once ``|b - A x| <= tol * |b|`` holds for the true residual (the
    recursive residual is re-synchronized when it drifts).

    Returns
    -------
    CGResult
        ``(x, iterations, relative residual)``.

    Raises
    ------
    NonConvergenceError
        If the tolerance is not met within ``max_iters`` (default ``10 * len(b)``).
    SingularSystemError
        If a non-positive curvature ``p^T A p`` is met.
    """
    A = _operator(A)
    b = np.asarray(b, dtype=np.float64)
    m = b.size
    if max_iters is None:
        max_iters = 10 * max(m, 1)
    x = np.zeros(m)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return CGResult(x, 0, 0.0)
    target = tol * bnorm
    r = b.copy()
    p = r.copy()
    rr = r @ r
    for it in range(1, max_iters + 1):
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0:
            raise SingularSystemError(f"matrix is not positive definite (p^T A p = {pAp:.3e})")
        alpha = rr / pAp
        x += alpha * p
        r -= alpha * Ap
        rr_new = r @ r
        if np.sqrt(rr_new) <= target:
            r = b - A @ x
            rr_new = r @ r
            res = np.sqrt(rr_new)
            if res <= target:
                return CGResult(x, it, res / bnorm)
            p = r.copy()
            rr = rr_new
            continue
        p = r + (rr_new / rr) * p
        rr = rr_new
    res = np.linalg.norm(b - A @ x) / bnorm
    raise NonConvergenceError(res, max_iters)


def solve_dense_oracle(A, b):
    """Dense Cholesky solve, for verification.

    Returns ``(x, min_eigenvalue)``. Refuses systems larger than 2000.
    """
    if isinstance(A, AssembledSystem):
        A = A.matrix()
    A = A.toarray() if sparse.issparse(A) else np.array(A, dtype=np.float64, ndmin=2)
    b = np.asarray(b, dtype=np.float64)
    m = A.shape[0]
    if m > DENSE_LIMIT:
        raise InvalidArgumentError(f"dense oracle limited to {DENSE_LIMIT} unknowns, got {m}")
    if m == 0:
        return np.zeros(0), np.inf
    scale = np.abs(A).max()
    min_eig = scipy.linalg.eigvalsh(A, subset_by_index=[0, 0])[0]
    try:
        c, low = scipy.linalg.cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"dense factorization failed: {exc}") from None
    if np.min(np.diag(c)) ** 2 < 1e-14 * scale:
        raise SingularSystemError("matrix is numerically singular")
    return scipy.linalg.cho_solve((c, low), b), min_eig


def recover(problem):
    """Recovered values on all vertices; equal to ``observed`` on the labeled set."""
    u = np.empty(problem.graph.n)
    u[problem.labeled] = problem.observed
    U = problem.unlabeled
    if U.size == 0:
        return u
    sys = assemble_system(problem)
    u[U] = solve_cg(sys, sys.b, problem.cg_tol, problem.cg_max_iters).x
    return u


def recovery_energy(problem, u):
    """Discrete energy whose constrained minimizer is :func:`recover`'s output.

    ``1/2 u^T L u + gamma/2 sum_{x in S, y} w_xy (u_x - u_y)^2 + lam/2 |sqrt(D) L u|^2``
    """
    lam, gamma = problem.effective_params()
    g = problem.graph
    u = np.asarray(u, dtype=np.float64)
    L = assemble_laplacian_matrix(g)
    Lu = L @ u
    d = np.ones(g.n)
    d[problem.labeled] = gamma
    W = g.weights[problem.labeled].tocoo()
    rows = problem.labeled[W.row]
    labeled_term = np.sum(W.data * (u[rows] - u[W.col]) ** 2)
    return 0.5 * u @ Lu + 0.5 * gamma * labeled_term + 0.5 * lam * np.sum(d * Lu ** 2)
