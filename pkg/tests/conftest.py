"""Shared fixtures and small construction helpers for the test suite."""

import numpy as np
import pytest

from tuckerfactor import generate_loadings, multi_mode_product


def make_orthonormal_loadings(rng, dims, ranks):
    """Scaled-orthonormal loading matrices, one per mode."""
    return [generate_loadings(p, k, rng) for p, k in zip(dims, ranks)]


def make_noiseless_series(rng, t_len, dims, ranks):
    """Noise-free observations plus their generating loadings and cores."""
    loadings = make_orthonormal_loadings(rng, dims, ranks)
    cores = rng.standard_normal((t_len,) + tuple(ranks))
    modes = list(range(1, len(dims) + 1))
    signals = multi_mode_product(cores, loadings, modes=modes)
    return signals, loadings, cores


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def rng():
    return np.random.default_rng(20240813)
