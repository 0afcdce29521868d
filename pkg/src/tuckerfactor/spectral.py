"""Deterministic symmetric eigensolver and SVD wrappers.

Every routine here fixes ordering and sign conventions so that repeated
runs on the same platform produce bitwise identical results:

* eigenvalues / singular values are sorted descending;
* each eigenvector or singular vector is scaled so its largest-magnitude
  entry is positive (ties broken by the lowest index).

Symmetric inputs are symmetrized as ``(S + S.T) / 2`` before
decomposition to remove accumulation-order asymmetry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class EigenSystem:
    """Top-k eigenpairs of a symmetric matrix.

    ``values`` is sorted descending and ``vectors[:, j]`` is the unit
    eigenvector belonging to ``values[j]``.
    """

    values: np.ndarray
    vectors: np.ndarray


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def top_k_eigensystem(s: np.ndarray, k: int) -> EigenSystem:
    """Largest ``k`` eigenpairs of a symmetric matrix, descending.

    Parameters
    ----------
    s : ndarray
        Square matrix; symmetrized internally.
    k : int
        Number of eigenpairs, ``1 <= k <= s.shape[0]``.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("top_k_eigensystem expects a square matrix")
    if not np.all(np.isfinite(s)):
        raise ValueError("matrix contains non-finite entries")
    n = s.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for a {n}x{n} matrix")
    w, v = np.linalg.eigh((s + s.T) / 2.0)
    w = w[::-1]
    v = _fix_signs(v[:, ::-1])
    return EigenSystem(values=np.ascontiguousarray(w[:k]),
                       vectors=np.ascontiguousarray(v[:, :k]))


def thin_left_singular(m: np.ndarray, k: int) -> np.ndarray:
    """First ``k`` left singular vectors of ``m`` as orthonormal columns."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError("thin_left_singular expects a matrix")
    if not 1 <= k <= min(m.shape):
        raise ValueError(f"k={k} out of range for shape {m.shape}")
    u, _, _ = np.linalg.svd(m, full_matrices=False)
    return np.ascontiguousarray(_fix_signs(u[:, :k]))


def projection_matrix(a: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column space of ``a``.

    For matrices whose Gram matrix is already a multiple of the identity
    (the scaled-orthonormal loading convention) the closed form
    ``a @ a.T / c`` is used; otherwise the projector comes from a reduced
    QR factorization.  Raises on rank-deficient input.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("projection_matrix expects a matrix")
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= 1e-10 * sv[0]:
        raise ValueError("projection_matrix: input is rank deficient")
    gram = a.T @ a
    k = a.shape[1]
    c = np.trace(gram) / k
    if np.linalg.norm(gram - c * np.eye(k)) <= 1e-12 * c * k:
        return (a @ a.T) / c
    q, _ = np.linalg.qr(a)
    return q @ q.T


def subspace_distance(a: np.ndarray, b: np.ndarray, norm: str = "spectral") -> float:
    """Distance between the column spaces of ``a`` and ``b``.

    Equals the chosen norm of the difference of the two orthogonal
    projectors.  For the spectral norm the value lies in ``[0, 1]``: 0 for
    identical spaces, 1 when the spaces have different dimensions or
    contain orthogonal directions.  Computed from the residuals
    ``(I - P_a) Q_b`` so that tiny angles keep full precision.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[0] != b.shape[0]:
        raise ValueError("subspace_distance: row counts differ")
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    res_b = qb - qa @ (qa.T @ qb)  # singular values are the angle sines
    if norm == "spectral":
        if a.shape[1] != b.shape[1]:
            return 1.0
        sines = np.linalg.svd(res_b, compute_uv=False)
        return float(min(1.0, sines[0])) if sines.size else 0.0
    if norm == "fro":
        res_a = qa - qb @ (qb.T @ qa)
        total = np.sum(res_a**2) + np.sum(res_b**2)
        return float(np.sqrt(total))
    raise ValueError(f"unknown norm {norm!r}")
