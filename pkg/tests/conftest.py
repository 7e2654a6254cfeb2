import sys

import numpy as np
import pytest
from scipy import sparse

from wecure.graph import WeightGraph


def connected_graph(rng, n, extra=3.0):
    """Random spanning tree plus about ``extra * n`` random edges, weights in (0.05, 1]."""
    rows, cols = [], []
    perm = rng.permutation(n)
    for i in range(1, n):
        rows.append(perm[i])
        cols.append(perm[rng.integers(i)])
    m = int(extra * n)
    a, b = rng.integers(n, size=m), rng.integers(n, size=m)
    keep = a != b
    rows += a[keep].tolist()
    cols += b[keep].tolist()
    r = np.minimum(rows, cols)
    c = np.maximum(rows, cols)
    A = sparse.coo_matrix((np.ones(len(r)), (r, c)), shape=(n, n)).tocsr()
    A.data = rng.uniform(0.05, 1.0, A.nnz)  # duplicates were merged above
    return WeightGraph.from_matrix(A + A.T)


def random_labels(rng, n, frac):
    m = min(n - 1, max(1, int(round(frac * n))))
    return np.sort(rng.choice(n, size=m, replace=False))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
