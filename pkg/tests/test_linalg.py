import numpy as np
import pytest
from hypothesis import given, strategies as st

from projkit.config import DEFAULT_TOL, parse_key_values, budget_from_env
from projkit.linalg import (
    EigenError,
    SpectralCutError,
    apply_function,
    as_projection,
    compress,
    hermitian,
    hermitian_eigen,
    is_projection,
    jacobi_eigh,
    min_eig,
    op_norm,
    projection_from_basis,
    psd_geq,
    psd_sqrt,
    range_basis,
    range_projection,
    spectral_projection,
)

from conftest import random_hermitian, random_projection


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12))
def test_jacobi_matches_lapack(seed, n):
    # LAPACK is the independent side of this check
    A = random_hermitian(np.random.default_rng(seed), n)
    w, V = jacobi_eigh(A)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-11 * max(1, np.abs(w).max()))
    np.testing.assert_allclose(V.conj().T @ V, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(A @ V, V * w, atol=1e-10)


def test_jacobi_is_deterministic(rng):
    A = random_hermitian(rng, 9)
    w1, V1 = jacobi_eigh(A)
    w2, V2 = jacobi_eigh(A.copy())
    assert np.array_equal(w1, w2) and np.array_equal(V1, V2)


def test_jacobi_degenerate_and_trivial():
    w, V = jacobi_eigh(np.eye(4))
    assert np.allclose(w, 1) and np.allclose(V, np.eye(4))
    w, _ = jacobi_eigh(np.zeros((3, 3)))
    assert np.all(w == 0)
    w, _ = jacobi_eigh([[2.0]])
    assert w[0] == 2.0


def test_jacobi_reports_non_convergence(rng):
    with pytest.raises(EigenError, match="residual"):
        jacobi_eigh(random_hermitian(rng, 8), tol=1e-300, max_sweeps=1)


def test_hermitian_eigen_methods_agree(rng):
    A = random_hermitian(rng, 6)
    wl, _ = hermitian_eigen(A, "lapack")
    wj, _ = hermitian_eigen(A, "jacobi")
    np.testing.assert_allclose(wl, wj, atol=1e-12)
    with pytest.raises(ValueError):
        hermitian_eigen(A, "qr")


def test_hermitian_rejects_non_square():
    with pytest.raises(ValueError):
        hermitian(np.zeros((2, 3)))


def test_spectral_projection_diag():
    h = np.diag([-1.0, 0.5, 2.0, 3.0])
    P = spectral_projection(h, 1.0)
    assert np.allclose(P, np.diag([0, 0, 1, 1]))
    P = spectral_projection(h, -np.inf, 1.0)
    assert np.allclose(P, np.diag([1, 1, 0, 0]))


def test_spectral_projection_commutes_and_is_projection(rng):
    h = random_hermitian(rng, 7)
    w = np.linalg.eigvalsh(h)
    P = spectral_projection(h, 0.5 * (w[2] + w[3]))
    assert is_projection(P)
    assert np.allclose(P @ h, h @ P, atol=1e-10)
    assert round(np.trace(P).real) == 4


def test_spectral_cut_on_eigenvalue_raises():
    with pytest.raises(SpectralCutError, match="ambiguous"):
        spectral_projection(np.diag([0.0, 1.0]), 1.0)


def test_range_basis_and_projection(rng):
    B = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    M = B @ rng.standard_normal((2, 5))
    R = range_basis(M)
    assert R.shape == (6, 2)
    assert np.allclose(R.conj().T @ R, np.eye(2))
    P = range_projection(M)
    assert np.allclose(P @ M, M)
    assert range_basis(np.zeros((4, 3))).shape == (4, 0)
    assert np.allclose(range_projection(np.zeros((3, 3))), 0)


def test_projection_predicates(rng):
    P = random_projection(rng, 5, 2)
    assert is_projection(P)
    assert np.allclose(as_projection(P), P)
    assert not is_projection(2 * P)
    assert not is_projection(np.array([[1.0, 1.0], [0.0, 0.0]]))
    assert not is_projection(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_projection(0.5 * np.eye(2))
    B = range_basis(P)
    assert np.allclose(projection_from_basis(B), P)


def test_norms_and_order(rng):
    A = random_hermitian(rng, 5)
    assert np.isclose(op_norm(A), np.abs(np.linalg.eigvalsh(A)).max())
    assert op_norm(np.zeros((0, 0))) == 0.0
    assert np.isclose(min_eig(A), np.linalg.eigvalsh(A)[0])
    assert min_eig(np.zeros((0, 0))) == np.inf
    assert psd_geq(A + np.eye(5) * (2 + op_norm(A)), np.eye(5))
    assert not psd_geq(np.zeros((2, 2)), np.eye(2))
    assert psd_geq(np.zeros((2, 2)), 1e-12 * np.eye(2), tol=1e-10)


@given(seed=st.integers(0, 2**32 - 1))
def test_psd_sqrt_squares_back(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A = X @ X.conj().T
    S = psd_sqrt(A)
    assert np.allclose(S @ S, A, atol=1e-9 * max(1, op_norm(A)))
    assert min_eig(S) >= -1e-10


def test_apply_function_and_compress(rng):
    A = random_hermitian(rng, 4)
    assert np.allclose(apply_function(A, lambda w: w**2), A @ A)
    B = range_basis(random_projection(rng, 4, 2))
    assert compress(A, B).shape == (2, 2)


def test_default_tolerances_and_config(monkeypatch):
    assert DEFAULT_TOL.eps_floor == 0.02
    assert DEFAULT_TOL.replace(psd=1e-6).psd == 1e-6
    assert parse_key_values("a = 1\n# c\n\nb=x # tail\n") == {"a": "1", "b": "x"}
    with pytest.raises(ValueError, match="line 1"):
        parse_key_values("nonsense")
    monkeypatch.setenv("PROJKIT_BUDGET", "100")
    assert budget_from_env() == 100
    monkeypatch.setenv("PROJKIT_BUDGET", "-1")
    with pytest.raises(ValueError):
        budget_from_env()
    monkeypatch.delenv("PROJKIT_BUDGET")
    assert budget_from_env(7) == 7
