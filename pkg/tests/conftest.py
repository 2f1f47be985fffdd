import numpy as np
import pytest

from ibits.channels import channel_from_kraus


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary: QR of a complex Gaussian matrix."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_channel(n: int, n_kraus: int, rng: np.random.Generator):
    """Random trace-preserving channel via a Haar isometry split into blocks."""
    z = rng.normal(size=(n_kraus * n, n)) + 1j * rng.normal(size=(n_kraus * n, n))
    q, _ = np.linalg.qr(z)
    return channel_from_kraus([q[i * n : (i + 1) * n] for i in range(n_kraus)])


def naive_interference_kraus(kraus) -> float:
    """Literal triple-sum operator-sum expression; the independent oracle
    for the row-Gram evaluation used by the library."""
    stack = np.stack(kraus)
    n_ops, n, _ = stack.shape
    first = 0.0
    for i in range(n):
        for k in range(n):
            for m in range(n):
                s = sum(stack[l, i, k] * np.conj(stack[l, i, m]) for l in range(n_ops))
                first += abs(s) ** 2
    second = 0.0
    for i in range(n):
        for k in range(n):
            second += sum(abs(stack[l, i, k]) ** 2 for l in range(n_ops)) ** 2
    return first - second


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
