"""Geometry of a pair of projections.

Two subspaces ``M = range(p)`` and ``N = range(q)`` split the ambient space
into the four corners ``M∩N``, ``M∩N⊥``, ``M⊥∩N``, ``M⊥∩N⊥`` and a generic
part on which the pair is a direct sum of 2x2 rotations.  The rotation
angles are the principal angles strictly between 0 and pi/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .linalg import hermitian, projection_basis

__all__ = [
    "NearDegenerateError",
    "PairDecomposition",
    "decompose_pair",
    "pair_norm_distance",
    "d_a",
    "angle",
    "rotated_pair",
]


class NearDegenerateError(ValueError):
    """An eigenvalue of ``pqp`` sits too close to 0 or 1 to classify."""


@dataclass(frozen=True)
class PairDecomposition:
    """Corner dimensions and generic angles of a projection pair.

    Attributes
    ----------
    dim_11, dim_10, dim_01, dim_00 : int
        Dimensions of ``M∩N``, ``M∩N⊥``, ``M⊥∩N`` and ``M⊥∩N⊥``.
    generic_angles : tuple of float
        Angles in ``(0, pi/2)``, ascending, repeated by multiplicity.
    """

    dim_11: int
    dim_10: int
    dim_01: int
    dim_00: int
    generic_angles: tuple = field(default_factory=tuple)

    @property
    def ambient_dim(self) -> int:
        return self.dim_11 + self.dim_10 + self.dim_01 + self.dim_00 + 2 * len(self.generic_angles)

    def distinct_angles(self, tol: Tolerances = DEFAULT_TOL) -> list[tuple[float, int]]:
        """Distinct generic angles with multiplicities, clustered at ``tol.cluster``."""
        out: list[tuple[float, int]] = []
        for th in self.generic_angles:
            if out and th - out[-1][0] <= tol.cluster:
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((th, 1))
        return out


def _compressed_eigs(Bp: np.ndarray, Q: np.ndarray) -> np.ndarray:
    if Bp.shape[1] == 0:
        return np.zeros(0)
    return np.clip(np.linalg.eigvalsh(hermitian(Bp.conj().T @ Q @ Bp)), 0.0, 1.0)


def decompose_pair(p, q, tol: Tolerances = DEFAULT_TOL) -> PairDecomposition:
    """Corner dimensions and generic angles of the pair ``(p, q)``.

    The eigenvalues of ``pqp`` on ``range(p)`` equal to 1 count ``M∩N``,
    those equal to 0 count ``M∩N⊥``, and the rest are ``cos^2`` of the
    generic angles.  The same compression of ``q`` to ``range(1-p)`` gives
    ``M⊥∩N`` and ``M⊥∩N⊥``.

    Raises
    ------
    NearDegenerateError
        If an eigenvalue is within ``100 * tol.angle_sq`` of 0 or 1 without
        being within ``tol.angle_sq``.
    """
    P = hermitian(p)
    Q = hermitian(q)
    if P.shape != Q.shape:
        raise ValueError("projections must have the same dimension")
    n = P.shape[0]
    Bp = projection_basis(P)
    Bc = projection_basis(np.eye(n) - P)
    lam = _compressed_eigs(Bp, Q)
    mu = _compressed_eigs(Bc, Q)

    eps = tol.angle_sq
    for v in np.concatenate([lam, mu]):
        near = min(v, 1.0 - v)
        if eps < near <= 100 * eps:
            raise NearDegenerateError(f"eigenvalue {v!r} of the compressed pair is too close to 0 or 1")

    dim_11 = int(np.sum(lam >= 1.0 - eps))
    dim_10 = int(np.sum(lam <= eps))
    dim_01 = int(np.sum(mu >= 1.0 - eps))
    dim_00 = int(np.sum(mu <= eps))
    generic = lam[(lam > eps) & (lam < 1.0 - eps)]
    angles = np.sort(np.arccos(np.sqrt(generic)))
    return PairDecomposition(dim_11, dim_10, dim_01, dim_00, tuple(float(a) for a in angles))


def pair_norm_distance(p, q, tol: Tolerances = DEFAULT_TOL) -> float:
    """``||p - q||`` read off from the pair decomposition."""
    dec = decompose_pair(p, q, tol)
    if dec.dim_10 > 0 or dec.dim_01 > 0:
        return 1.0
    if not dec.generic_angles:
        return 0.0
    return float(np.sin(dec.generic_angles[-1]))


def d_a(p, q, tol: Tolerances = DEFAULT_TOL) -> float:
    """Arc-length metric ``arcsin ||p - q||``."""
    return float(np.arcsin(min(1.0, pair_norm_distance(p, q, tol))))


def angle(p, q, tol: Tolerances = DEFAULT_TOL) -> float:
    """Smallest generic angle; ``pi/2`` when there is no generic part."""
    dec = decompose_pair(p, q, tol)
    if not dec.generic_angles:
        return float(np.pi / 2)
    return dec.generic_angles[0]


def rotated_pair(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """``p = diag(1, 0)`` and its rotation by ``theta`` in the plane."""
    c, s = np.cos(theta), np.sin(theta)
    p = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    q = np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)
    return p, q
