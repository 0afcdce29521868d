"""Evaluation metrics: subspace distance, signal RMSE, rank accuracy, RE."""

from __future__ import annotations

import numpy as np

from .spectral import subspace_distance


def column_space_distance(a_hat: np.ndarray, a_true: np.ndarray) -> float:
    """Spectral norm of the difference of the two column-space projectors.

    Lies in [0, 1]: 0 for identical column spaces, 1 for orthogonal
    subspaces of equal dimension; invariant under right-multiplication of
    either argument by an invertible matrix.  Raises on rank-deficient
    input.
    """
    a_hat = np.asarray(a_hat, dtype=float)
    a_true = np.asarray(a_true, dtype=float)
    if a_hat.ndim != 2 or a_true.ndim != 2:
        raise ValueError("column_space_distance expects matrices")
    if a_hat.shape[0] != a_true.shape[0]:
        raise ValueError("row counts differ")
    for m in (a_hat, a_true):
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[0] == 0 or sv[-1] <= 1e-10 * sv[0]:
            raise ValueError("column_space_distance: rank-deficient input")
    return subspace_distance(a_hat, a_true)


def signal_rmse(s_hat: np.ndarray, s_true: np.ndarray) -> float:
    """Root mean square error over all T*p signal entries."""
    s_hat = np.asarray(s_hat, dtype=float)
    s_true = np.asarray(s_true, dtype=float)
    if s_hat.shape != s_true.shape:
        raise ValueError(f"shape mismatch: {s_hat.shape} vs {s_true.shape}")
    return float(np.sqrt(np.mean((s_hat - s_true) ** 2)))


def rank_accuracy(k_hat, k_true) -> float:
    """Percentage of modes whose estimated rank matches the truth."""
    k_hat = tuple(k_hat)
    k_true = tuple(k_true)
    if len(k_hat) != len(k_true):
        raise ValueError("rank tuples have different lengths")
    hits = sum(1 for a, b in zip(k_hat, k_true) if a == b)
    return 100.0 * hits / len(k_true)


def reconstruction_error(series: np.ndarray, signals: np.ndarray) -> float:
    """Relative Frobenius reconstruction error over the whole sample.

    Computed as ``sqrt(sum_t ||S_t - X_t||_F^2) / sqrt(sum_t ||X_t||_F^2)``
    without materializing the stacked tensor.
    """
    series = np.asarray(series, dtype=float)
    signals = np.asarray(signals, dtype=float)
    if series.shape != signals.shape:
        raise ValueError(f"shape mismatch: {series.shape} vs {signals.shape}")
    denom = np.linalg.norm(series.ravel())
    if denom == 0:
        raise ValueError("reconstruction_error: data has zero norm")
    return float(np.linalg.norm((signals - series).ravel()) / denom)
