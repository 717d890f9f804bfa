import warnings

import numpy as np
import pytest

from rrlpi.errors import DegenerateSpectrumWarning, IsolatedVertex, NoConvergence, NotSymmetric
from rrlpi.graph import cosine_affinity, graph_from_weights, laplacian
from rrlpi import spectral
from rrlpi.spectral import count_near_zero, eig_generalized, eig_sym, fiedler_le, fix_sign


def two_block(w1=0.9, w2=0.8):
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = w1
    W[2, 3] = W[3, 2] = w2
    return graph_from_weights(W)


@pytest.mark.parametrize("backend", ["ql", "lapack"])
def test_eig_sym_small_examples(backend):
    e = eig_sym(np.diag([3.0, 1.0]), backend)
    np.testing.assert_allclose(e.eigenvalues, [1, 3], atol=1e-14)
    assert abs(e.eigenvectors[1, 0]) == pytest.approx(1)
    e = eig_sym([[2.0, 1.0], [1.0, 2.0]], backend)
    np.testing.assert_allclose(e.eigenvalues, [1, 3], atol=1e-14)
    assert abs(e.eigenvectors[:, 0] @ np.array([1, -1]) / np.sqrt(2)) == pytest.approx(1)
    assert abs(e.eigenvectors[:, 1] @ np.array([1, 1]) / np.sqrt(2)) == pytest.approx(1)


def test_two_block_standard_spectrum():
    lam = eig_sym(laplacian(two_block()).L).eigenvalues
    np.testing.assert_allclose(np.sort(lam), [0, 0, 1.6, 1.8], atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 50, 200])
def test_ql_reconstruction_and_orthogonality(rng, n):
    A = rng.standard_normal((n, n))
    A = A + A.T
    e = eig_sym(A, "ql")
    V, lam = e.eigenvectors, e.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    nA = np.linalg.norm(A)
    assert np.linalg.norm(A - (V * lam) @ V.T) <= 1e-8 * nA
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-10)
    for i in range(n):
        assert np.linalg.norm(A @ V[:, i] - lam[i] * V[:, i]) <= 1e-8 * nA
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(A), atol=1e-10 * max(1, nA))


def test_ql_handles_zero_and_repeated():
    e = eig_sym(np.zeros((5, 5)), "ql")
    np.testing.assert_array_equal(e.eigenvalues, np.zeros(5))
    e = eig_sym(np.eye(4) * 2.5, "ql")
    np.testing.assert_allclose(e.eigenvalues, 2.5)


def test_deterministic(rng):
    A = rng.standard_normal((30, 30))
    A = A + A.T
    a, b = eig_sym(A), eig_sym(A)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_not_symmetric():
    with pytest.raises(NotSymmetric):
        eig_sym([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotSymmetric):
        eig_sym(np.ones((2, 3)))
    eig_sym([[1.0, 2.0], [2.0 + 1e-13, 1.0]])


def test_no_convergence_reported(monkeypatch, rng):
    monkeypatch.setattr(spectral, "QL_MAX_ITER", 0)
    A = rng.standard_normal((6, 6))
    with pytest.raises(NoConvergence):
        eig_sym(A + A.T, "ql")


def test_generalized_examples():
    e = eig_generalized(laplacian(two_block()))
    np.testing.assert_allclose(e.eigenvalues, [0, 0, 2, 2], atol=1e-12)
    e = eig_generalized(laplacian(graph_from_weights([[0, 0.5], [0.5, 0]])))
    np.testing.assert_allclose(e.eigenvalues, [0, 2], atol=1e-14)
    w1, w2, wu = 0.9, 0.8, 0.1
    W = two_block(w1, w2).W.copy()
    W[:2, 2:] = W[2:, :2] = wu
    e = eig_generalized(laplacian(graph_from_weights(W)))
    lam1 = 2 * (w1 * wu + w2 * wu + 4 * wu**2) / ((w1 + 2 * wu) * (w2 + 2 * wu))
    assert e.eigenvalues[1] == pytest.approx(lam1, abs=1e-12)
    assert lam1 == pytest.approx(0.42 / 1.10, abs=1e-12)


def test_generalized_residual_and_d_orthogonality(rng):
    for _ in range(10):
        G = cosine_affinity(rng.random((3, int(rng.integers(5, 40)))))
        Lap = laplacian(G)
        e = eig_generalized(Lap)
        Y, lam = e.eigenvectors, e.eigenvalues
        np.testing.assert_allclose(np.linalg.norm(Y, axis=0), 1, atol=1e-10)
        nL = np.linalg.norm(Lap.L)
        for i in range(G.n):
            assert np.linalg.norm(Lap.L @ Y[:, i] - lam[i] * Lap.d * Y[:, i]) <= 1e-8 * nL
        M = Y.T @ (Lap.d[:, None] * Y)
        assert np.abs(M - np.diag(np.diag(M))).max() <= 1e-8
        assert lam.min() >= -1e-10 and lam.max() <= 2 + 1e-10


def test_isolated_vertex_generalized():
    W = np.ones((4, 4)) - np.eye(4)
    W[3, :] = W[:, 3] = 0
    with pytest.raises(IsolatedVertex) as ei:
        eig_generalized(laplacian(graph_from_weights(W)))
    assert ei.value.index == 3


def test_fiedler_two_block_pattern():
    for mode in ("generalized", "standard"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateSpectrumWarning)
            y = fiedler_le(two_block(), mode).y
        assert y[0] == pytest.approx(y[1]) and y[2] == pytest.approx(y[3])
        assert y[0] * y[2] < 0
        assert np.linalg.norm(y) == pytest.approx(1)


def test_fiedler_path_graph():
    W = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], float)
    emb = fiedler_le(graph_from_weights(W), "standard")
    assert emb.eigenvalue == pytest.approx(1)
    assert abs(emb.y @ np.array([1, 0, -1]) / np.sqrt(2)) == pytest.approx(1)


def test_fiedler_isolated_vertex_standard():
    W = np.ones((5, 5)) - np.eye(5)
    W[4, :] = W[:, 4] = 0
    emb = fiedler_le(graph_from_weights(W), "standard")
    assert emb.eigenvalue == pytest.approx(0, abs=1e-12)


def test_fiedler_sign_and_degenerate_warning():
    W = np.ones((4, 4)) - np.eye(4)
    with pytest.warns(DegenerateSpectrumWarning):
        emb = fiedler_le(graph_from_weights(W))
    assert emb.y[np.argmax(np.abs(emb.y))] > 0


def test_fiedler_lanczos_matches_dense(rng):
    G = cosine_affinity(rng.random((3, 300)))
    for mode in ("generalized", "standard"):
        a = fiedler_le(G, mode, backend="lapack")
        b = fiedler_le(G, mode, backend="lanczos")
        assert abs(a.y @ b.y) == pytest.approx(1, abs=1e-8)
        assert a.eigenvalue == pytest.approx(b.eigenvalue, abs=1e-9)


def test_fix_sign():
    np.testing.assert_array_equal(fix_sign([1, -3, 2]), [-1, 3, -2])
    np.testing.assert_array_equal(fix_sign([1, 3]), [1, 3])


def test_count_near_zero():
    assert count_near_zero([0, 0, 2, 2], 1e-6) == 2
    assert count_near_zero([0.5, 1], 1e-6) == 0
    W = np.zeros((7, 7))
    W[:2, :2] = 1
    W[2:4, 2:4] = 1
    np.fill_diagonal(W, 0)
    lam = eig_sym(laplacian(graph_from_weights(W)).L).eigenvalues
    assert count_near_zero(lam, 1e-8) == 5
