"""Dense Hermitian spectral calculus.

Everything downstream works with complex ``numpy`` arrays.  A Hermitian
matrix is any square array equal to its conjugate transpose; ``hermitian``
enforces that exactly by averaging with the adjoint.  A projection is a
Hermitian idempotent, checked to ``Tolerances.proj``.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_TOL, Tolerances

__all__ = [
    "EigenError",
    "SpectralCutError",
    "hermitian",
    "jacobi_eigh",
    "hermitian_eigen",
    "spectral_projection",
    "range_basis",
    "projection_basis",
    "range_projection",
    "projection_from_basis",
    "is_projection",
    "as_projection",
    "op_norm",
    "min_eig",
    "psd_geq",
    "psd_sqrt",
    "apply_function",
    "compress",
]


class EigenError(RuntimeError):
    """Raised when the Jacobi iteration fails to converge."""


class SpectralCutError(ValueError):
    """Raised when a spectral cut lands on (or next to) an eigenvalue."""


def hermitian(M) -> np.ndarray:
    """Return ``(M + M^*)/2`` as a complex array; exactly Hermitian."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return 0.5 * (A + A.conj().T)


def jacobi_eigh(M, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi eigensolver for a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a_pq`` with a
    diagonal unitary, then applies the real Jacobi rotation that zeroes it.
    Pivots are visited row by row, so the result depends only on the input.

    Parameters
    ----------
    M : array_like
        Hermitian matrix; it is symmetrized before the iteration.
    tol : float
        Stop once the off-diagonal Frobenius norm falls below
        ``tol * ||M||_F``.
    max_sweeps : int
        Iteration cap.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    V : ndarray
        Unitary matrix whose columns are the matching eigenvectors.

    Raises
    ------
    EigenError
        If the iteration cap is hit; the message carries the residual.
    """
    A = hermitian(M).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if n <= 1 or scale == 0.0:
        return np.real(np.diag(A)).copy(), V

    def off_norm(X):
        return np.linalg.norm(X - np.diag(np.diag(X)))

    for _ in range(max_sweeps):
        if off_norm(A) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                g = abs(b)
                if g <= 1e-300:
                    continue
                phase = b / g
                a, d = A[p, p].real, A[q, q].real
                tau = (d - a) / (2.0 * g)
                sgn = 1.0 if tau >= 0 else -1.0
                t = 1.0 / (tau + sgn * np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                U = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = U.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ U
    else:
        res = off_norm(A)
        if res > tol * scale:
            raise EigenError(f"Jacobi did not converge in {max_sweeps} sweeps; off-diagonal residual {res:.3e}")

    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def hermitian_eigen(M, method: str = "lapack"):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` calls ``numpy.linalg.eigh``; ``method="jacobi"`` runs
    :func:`jacobi_eigh`.  Both return ``(w, V)`` with ``M V = V diag(w)``.
    """
    A = hermitian(M)
    if method == "lapack":
        return np.linalg.eigh(A)
    if method == "jacobi":
        return jacobi_eigh(A)
    raise ValueError(f"unknown eigensolver {method!r}")


def spectral_projection(h, lo: float = -np.inf, hi: float = np.inf, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Spectral projection of ``h`` onto eigenvalues in ``[lo, hi)``.

    Raises
    ------
    SpectralCutError
        If a finite endpoint is within ``tol.spec`` of an eigenvalue
        ("ambiguous spectral cut").
    """
    w, V = hermitian_eigen(h)
    for end in (lo, hi):
        if np.isfinite(end) and np.any(np.abs(w - end) <= tol.spec * max(1.0, abs(end))):
            raise SpectralCutError(f"ambiguous spectral cut at {end!r}")
    keep = (w >= lo) & (w < hi)
    Vk = V[:, keep]
    return Vk @ Vk.conj().T


def range_basis(M, tol: Tolerances = DEFAULT_TOL, atol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the column span of ``M``.

    Singular values at most ``max(tol.rank * s_max, atol)`` count as zero;
    ``atol`` defaults to ``tol.rank``, which suits inputs of unit scale such
    as projections, unit vectors and contractions.
    """
    A = np.asarray(M, dtype=complex)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    floor = tol.rank if atol is None else atol
    if s.size == 0 or s[0] <= floor:
        return np.zeros((A.shape[0], 0), dtype=complex)
    r = int(np.sum(s > max(tol.rank * s[0], floor)))
    return U[:, :r]


def projection_basis(P) -> np.ndarray:
    """Orthonormal basis of the range of a projection: eigenvectors with eigenvalue above 1/2."""
    w, V = np.linalg.eigh(hermitian(P))
    return V[:, w > 0.5]


def projection_from_basis(B) -> np.ndarray:
    B = np.asarray(B, dtype=complex)
    return hermitian(B @ B.conj().T)


def range_projection(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Projection onto the column span of ``M``; zero for the zero matrix."""
    return projection_from_basis(range_basis(M, tol))


def is_projection(P, tol: Tolerances = DEFAULT_TOL) -> bool:
    P = np.asarray(P, dtype=complex)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        return False
    if np.linalg.norm(P - P.conj().T, 2) > tol.proj:
        return False
    return bool(np.linalg.norm(P @ P - P, 2) <= tol.proj)


def as_projection(P, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Validate ``P`` as a projection and return its Hermitian part."""
    if not is_projection(P, tol):
        raise ValueError("matrix is not a projection within tol_proj")
    return hermitian(P)


def op_norm(M) -> float:
    """Operator norm (largest singular value)."""
    A = np.asarray(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def min_eig(M) -> float:
    A = hermitian(M)
    if A.shape[0] == 0:
        return np.inf
    return float(np.linalg.eigvalsh(A)[0])


def psd_geq(a, b, tol: float = 0.0) -> bool:
    """True iff ``lambda_min(a - b) >= -tol``."""
    return min_eig(np.asarray(a) - np.asarray(b)) >= -tol


def apply_function(h, f) -> np.ndarray:
    """``f(h)`` for Hermitian ``h`` via the eigen-decomposition."""
    w, V = hermitian_eigen(h)
    return hermitian((V * f(w)) @ V.conj().T)


def psd_sqrt(h) -> np.ndarray:
    return apply_function(h, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def compress(M, B) -> np.ndarray:
    """``B^* M B``: the compression of ``M`` to the span of the columns of ``B``."""
    B = np.asarray(B)
    return B.conj().T @ np.asarray(M) @ B
