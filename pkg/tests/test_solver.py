import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wecure import solver
from wecure.errors import InvalidArgumentError, NonConvergenceError, SingularSystemError
from wecure.graph import WeightGraph, assemble_laplacian_matrix
from wecure.solver import RecoveryProblem, assemble_system, recover, solve_cg, solve_dense_oracle

from conftest import connected_graph, random_labels


def two_vertex(w):
    return WeightGraph.from_matrix([[0.0, w], [w, 0.0]])


@pytest.mark.parametrize("w", [0.3, 1.0])
@pytest.mark.parametrize("lam", [0.0, 0.1, 1.0, 7.5])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 40.0])
def test_two_vertex_closed_form(w, lam, gamma):
    g = -3.25
    p = RecoveryProblem(two_vertex(w), [1], [g], "wecure", lam=lam, gamma=gamma)
    sys = assemble_system(p)
    A = sys.matrix().toarray()
    expected_A = w + gamma * w + lam * w * w * (1 + gamma)
    expected_b = (1 + gamma) * w * g + lam * w * w * (1 + gamma) * g
    assert A[0, 0] == pytest.approx(expected_A, rel=1e-14)
    assert sys.b[0] == pytest.approx(expected_b, rel=1e-14)
    assert (sys @ np.ones(1))[0] == pytest.approx(expected_A, rel=1e-14)
    assert recover(p)[0] == pytest.approx(g, abs=1e-12)
    assert solve_dense_oracle(sys, sys.b)[0][0] == pytest.approx(g, abs=1e-12)


def test_ldmm_system_is_harmonic_interpolation(rng):
    G = connected_graph(rng, 30)
    S = random_labels(rng, 30, 0.3)
    sys = assemble_system(RecoveryProblem(G, S, rng.normal(size=S.size), "ldmm", lam=5.0))
    L = assemble_laplacian_matrix(G)
    U = sys.unlabeled
    dw = G.weights[U][:, S].toarray().sum(axis=1)
    expected = L[U][:, U].toarray() + np.diag(dw)
    np.testing.assert_allclose(sys.matrix().toarray(), expected, rtol=0, atol=1e-15)


@pytest.mark.parametrize("method", solver.METHODS)
def test_constant_satisfies_system(method, rng):
    G = connected_graph(rng, 40)
    S = random_labels(rng, 40, 0.2)
    sys = assemble_system(RecoveryProblem(G, S, np.full(S.size, 2.5), method, lam=0.7))
    np.testing.assert_allclose(sys @ np.full(sys.shape[0], 2.5), sys.b, rtol=1e-12, atol=1e-12)


def test_effective_params():
    G = connected_graph(np.random.default_rng(0), 10)
    base = dict(graph=G, labeled=[0, 1], observed=[0.0, 1.0], lam=0.3)
    assert RecoveryProblem(method="ldmm", **base).effective_params() == (0.0, 1.0)
    assert RecoveryProblem(method="wnll", **base).effective_params() == (0.0, 5.0)
    assert RecoveryProblem(method="cure", **base).effective_params() == (0.3, 1.0)
    assert RecoveryProblem(method="wecure", **base).effective_params() == (0.3, 5.0)
    assert RecoveryProblem(method="wecure", gamma=2.0, **base).effective_params() == (0.3, 2.0)


def test_problem_validation():
    G = connected_graph(np.random.default_rng(0), 5)
    with pytest.raises(InvalidArgumentError):
        RecoveryProblem(G, [], [])
    with pytest.raises(InvalidArgumentError):
        RecoveryProblem(G, [0, 0], [1.0, 1.0])
    with pytest.raises(InvalidArgumentError):
        RecoveryProblem(G, [7], [1.0])
    with pytest.raises(InvalidArgumentError):
        RecoveryProblem(G, [1], [1.0], method="tv")
    with pytest.raises(InvalidArgumentError):
        RecoveryProblem(G, [1], [1.0], lam=-1)


def test_disconnected_component_without_labels():
    W = np.zeros((5, 5))
    W[0, 1] = W[1, 0] = 0.5
    W[2, 3] = W[3, 2] = W[3, 4] = W[4, 3] = 0.5
    G = WeightGraph.from_matrix(W)
    with pytest.raises(SingularSystemError) as err:
        assemble_system(RecoveryProblem(G, [0], [1.0]))
    assert err.value.vertex in (2, 3, 4)
    # one label per component is enough
    u = recover(RecoveryProblem(G, [0, 3], [1.0, 4.0], cg_tol=1e-12))
    np.testing.assert_allclose(u, [1, 1, 4, 4, 4], atol=1e-10)


def test_cg_identity():
    r = solve_cg(np.eye(2), [3.0, 7.0])
    np.testing.assert_array_equal(r.x, [3.0, 7.0])
    assert r.iterations == 1


def test_cg_diagonal():
    r = solve_cg(np.diag([1.0, 2.0]), [1.0, 2.0], tol=1e-14)
    np.testing.assert_allclose(r.x, [1.0, 1.0], rtol=1e-14)
    assert r.residual <= 1e-14


def test_cg_zero_rhs():
    r = solve_cg(np.eye(3), np.zeros(3))
    assert r.iterations == 0 and not r.x.any()


@pytest.mark.parametrize("seed", range(5))
def test_cg_random_spd_matches_dense(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(20, 20))
    A = M @ M.T + 0.5 * np.eye(20)
    b = rng.normal(size=20)
    x = solve_cg(A, b, tol=1e-13).x
    xd, min_eig = solve_dense_oracle(A, b)
    assert min_eig > 0
    assert np.linalg.norm(x - xd) <= 1e-8 * np.linalg.norm(xd)
    np.testing.assert_allclose(xd, np.linalg.solve(A, b), rtol=1e-9)


def test_cg_nonconvergence_reports_residual():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(30, 30))
    A = M @ M.T + np.eye(30)
    with pytest.raises(NonConvergenceError) as err:
        solve_cg(A, rng.normal(size=30), tol=1e-12, max_iters=2)
    assert err.value.iterations == 2
    assert err.value.residual > 1e-12


def test_cg_rejects_indefinite():
    with pytest.raises(SingularSystemError):
        solve_cg(np.diag([1.0, -1.0]), [1.0, 1.0])


def test_cg_is_deterministic(rng):
    G = connected_graph(rng, 150)
    S = random_labels(rng, 150, 0.1)
    sys = assemble_system(RecoveryProblem(G, S, rng.normal(size=S.size), "wecure"))
    a, b = solve_cg(sys, sys.b), solve_cg(sys, sys.b)
    assert np.array_equal(a.x, b.x) and a.iterations == b.iterations


def test_dense_oracle_scalar():
    x, min_eig = solve_dense_oracle([[2.0]], [4.0])
    assert x[0] == pytest.approx(2.0, rel=1e-15) and min_eig == pytest.approx(2.0, rel=1e-15)


def test_dense_oracle_singular():
    with pytest.raises(SingularSystemError):
        solve_dense_oracle(np.array([[1.0, 1.0], [1.0, 1.0]]), [1.0, 1.0])


def test_dense_oracle_size_guard():
    with pytest.raises(InvalidArgumentError):
        solve_dense_oracle(np.eye(2001), np.ones(2001))


def test_recover_single_unlabeled_vertex():
    # star: vertex 0 unlabeled, neighbors 1..3 labeled; closed form for ldmm/wnll
    w = np.array([0.2, 0.5, 0.9])
    g = np.array([1.0, -2.0, 4.0])
    W = np.zeros((4, 4))
    W[0, 1:] = W[1:, 0] = w
    G = WeightGraph.from_matrix(W)
    for method in ("ldmm", "wnll"):
        u = recover(RecoveryProblem(G, [1, 2, 3], g, method, cg_tol=1e-14))
        assert u[0] == pytest.approx(w @ g / w.sum(), rel=1e-13)
        np.testing.assert_array_equal(u[1:], g)
    for method in ("cure", "wecure"):
        p = RecoveryProblem(G, [1, 2, 3], g, method, lam=0.4, cg_tol=1e-14)
        sys = assemble_system(p)
        xd, _ = solve_dense_oracle(sys, sys.b)
        assert recover(p)[0] == pytest.approx(xd[0], rel=1e-12)


def test_recover_path_midpoint():
    W = np.array([[0, 0.6, 0], [0.6, 0, 0.6], [0, 0.6, 0]])
    u = recover(RecoveryProblem(WeightGraph.from_matrix(W), [0, 2], [0.0, 1.0], "ldmm",
                                cg_tol=1e-14))
    assert u[1] == pytest.approx(0.5, abs=1e-14)


def test_recover_all_labeled():
    G = connected_graph(np.random.default_rng(0), 6)
    g = np.arange(6.0)
    np.testing.assert_array_equal(recover(RecoveryProblem(G, np.arange(6), g)), g)


@pytest.mark.parametrize("method", solver.METHODS)
def test_recover_constant(method, rng):
    G = connected_graph(rng, 80)
    S = random_labels(rng, 80, 0.15)
    u = recover(RecoveryProblem(G, S, np.full(S.size, 5.0), method, lam=2.0, cg_tol=1e-12))
    np.testing.assert_allclose(u, 5.0, rtol=1e-10)


def test_recover_keeps_observed_values_exactly(rng):
    G = connected_graph(rng, 50)
    S = random_labels(rng, 50, 0.2)
    g = rng.normal(size=S.size)
    u = recover(RecoveryProblem(G, S, g))
    np.testing.assert_array_equal(u[S], g)


def test_matrix_free_operator_matches_matrix(rng):
    G = connected_graph(rng, 60)
    S = random_labels(rng, 60, 0.2)
    sys = assemble_system(RecoveryProblem(G, S, rng.normal(size=S.size), "wecure", lam=0.9))
    A = sys.matrix()
    assert (A != A.T).nnz == 0
    v = rng.normal(size=sys.shape[0])
    np.testing.assert_allclose(sys @ v, A @ v, rtol=1e-12, atol=1e-12)


def test_rhs_two_sum_form(rng):
    G = connected_graph(rng, 25)
    S = random_labels(rng, 25, 0.3)
    g = rng.normal(size=S.size)
    p = RecoveryProblem(G, S, g, "wecure", lam=0.5)
    lam, gamma = p.effective_params()
    sys = assemble_system(p)
    W = G.weights.toarray()
    L = assemble_laplacian_matrix(G).toarray()
    d = np.ones(25)
    d[S] = gamma
    full = np.zeros(25)
    full[S] = g
    U = sys.unlabeled
    expected = W[np.ix_(U, S)] @ g + gamma * W[np.ix_(S, U)].T @ g - lam * (L.T @ np.diag(d) @ L @ full)[U]
    np.testing.assert_allclose(sys.b, expected, rtol=1e-12, atol=1e-12)


def test_reuse_matrix_for_new_observations(rng):
    G = connected_graph(rng, 40)
    S = random_labels(rng, 40, 0.25)
    g1, g2 = rng.normal(size=S.size), rng.normal(size=S.size)
    sys1 = assemble_system(RecoveryProblem(G, S, g1))
    sys2 = assemble_system(RecoveryProblem(G, S, g2))
    np.testing.assert_array_equal(sys1.with_observed(g2).b, sys2.b)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 60), lam=st.floats(0, 5))
def test_method_reduction_at_zero_curvature(seed, n, lam):
    rng = np.random.default_rng(seed)
    G = connected_graph(rng, n)
    S = random_labels(rng, n, 0.3)
    g = rng.normal(size=S.size)
    pairs = (("wecure", "wnll"), ("cure", "ldmm"))
    for a, b in pairs:
        sa = assemble_system(RecoveryProblem(G, S, g, a, lam=0.0))
        sb = assemble_system(RecoveryProblem(G, S, g, b, lam=lam))
        assert abs(sa.matrix() - sb.matrix()).max() <= 1e-15
        np.testing.assert_allclose(sa.b, sb.b, rtol=0, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 80), method=st.sampled_from(["ldmm", "wnll"]))
def test_maximum_principle(seed, n, method):
    rng = np.random.default_rng(seed)
    G = connected_graph(rng, n)
    S = random_labels(rng, n, 0.25)
    g = rng.uniform(-3, 3, size=S.size)
    u = recover(RecoveryProblem(G, S, g, method, cg_tol=1e-12))
    tol = 1e-9 * (g.max() - g.min() + 1)
    assert u.min() >= g.min() - tol and u.max() <= g.max() + tol


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(4, 200), method=st.sampled_from(solver.METHODS))
def test_spd_when_connected(seed, n, method):
    rng = np.random.default_rng(seed)
    G = connected_graph(rng, n)
    S = random_labels(rng, n, 0.2)
    sys = assemble_system(RecoveryProblem(G, S, rng.normal(size=S.size), method, lam=1.0))
    A = sys.matrix()
    assert (A != A.T).nnz == 0
    assert np.linalg.eigvalsh(A.toarray()).min() > 0


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("method", solver.METHODS)
def test_recovery_is_energy_minimizer(seed, method):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(10, 60))
    G = connected_graph(rng, n)
    S = random_labels(rng, n, 0.3)
    p = RecoveryProblem(G, S, rng.normal(size=S.size), method, lam=0.8, cg_tol=1e-13)
    u = recover(p)
    e0 = solver.recovery_energy(p, u)
    U = p.unlabeled
    assert U.size <= 50
    for _ in range(100):
        v = u.copy()
        v[U] += 1e-3 * rng.normal(size=U.size)
        assert solver.recovery_energy(p, v) >= e0


def test_energy_gradient_matches_system(rng):
    # finite differences of the energy reproduce A u - b on the unlabeled block
    G = connected_graph(rng, 20)
    S = random_labels(rng, 20, 0.3)
    p = RecoveryProblem(G, S, rng.normal(size=S.size), "wecure", lam=0.6)
    sys = assemble_system(p)
    u = np.zeros(20)
    u[S] = p.observed
    U = p.unlabeled
    u[U] = rng.normal(size=U.size)
    h = 1e-6
    fd = []
    for i in U:
        e = np.zeros(20)
        e[i] = h
        fd.append((solver.recovery_energy(p, u + e) - solver.recovery_energy(p, u - e)) / (2 * h))
    np.testing.assert_allclose(fd, sys @ u[U] - sys.b, rtol=1e-6, atol=1e-6)
