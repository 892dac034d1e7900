import numpy as np
import pytest

from cqcode.channel import Channel


def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)


def random_psd(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return g @ g.conj().T


def random_density(rng, d):
    rho = random_psd(rng, d)
    return rho / np.trace(rho).real


def random_pure(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_channel(rng, d, k):
    return Channel(states=tuple(random_density(rng, d) for _ in range(k)))


def classical_channel(d=2):
    """W(i) = |i-1><i-1|: orthogonal pure outputs, a noiseless classical map."""
    states = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1.0
        states.append(m)
    return Channel(states=tuple(states))


def identical_channel(k=2):
    plus = np.full((2, 2), 0.5, dtype=complex)
    return Channel(states=(plus,) * k)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
