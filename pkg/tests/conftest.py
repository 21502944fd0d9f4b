import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("projkit", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("projkit")


def random_unitary(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_projection(rng, n, rank=None):
    rank = int(rng.integers(0, n + 1)) if rank is None else rank
    U = random_unitary(rng, n)[:, :rank]
    return U @ U.conj().T


def random_hermitian(rng, n, scale=1.0):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (X + X.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
