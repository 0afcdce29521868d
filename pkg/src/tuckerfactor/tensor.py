"""Dense tensor primitives: matricization, mode products, vectorization.

All routines share one index convention: a D-way tensor of shape
``(p_1, ..., p_D)`` is vectorized with the first index varying fastest
(Fortran order).  The mode-d unfolding places fiber index ``i_d`` on the
rows and enumerates the remaining indices on the columns, lowest mode
fastest, so that

    vec(F x_1 A_1 x_2 ... x_D A_D) = (A_D kron ... kron A_1) vec(F).

Modes are 0-based throughout the API.
"""

from __future__ import annotations

import math

import numpy as np


def _check_mode(x: np.ndarray, mode: int) -> None:
    if not 0 <= mode < x.ndim:
        raise ValueError(f"mode {mode} out of range for a {x.ndim}-way tensor")


def unfold(x: np.ndarray, mode: int) -> np.ndarray:
    """Mode-d matricization of a dense tensor.

    Parameters
    ----------
    x : ndarray
        Tensor of shape ``(p_1, ..., p_D)``.
    mode : int
        Mode to place on the rows (0-based).

    Returns
    -------
    ndarray
        Matrix of shape ``(p_mode, prod of the other dims)`` whose column
        index enumerates the remaining indices, lowest mode fastest.
    """
    x = np.asarray(x)
    _check_mode(x, mode)
    return np.reshape(np.moveaxis(x, mode, 0), (x.shape[mode], -1), order="F")


def fold(m: np.ndarray, mode: int, shape) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild the tensor of ``shape`` from its
    mode-d matricization."""
    m = np.asarray(m)
    shape = tuple(int(s) for s in shape)
    if not 0 <= mode < len(shape):
        raise ValueError(f"mode {mode} out of range for shape {shape}")
    p_other = math.prod(shape) // shape[mode]
    if m.ndim != 2 or m.shape != (shape[mode], p_other):
        raise ValueError(
            f"matrix of shape {m.shape} cannot fold into {shape} at mode {mode}"
        )
    rest = [s for i, s in enumerate(shape) if i != mode]
    return np.moveaxis(m.reshape([shape[mode]] + rest, order="F"), 0, mode)


def mode_product(x: np.ndarray, mat: np.ndarray, mode: int) -> np.ndarray:
    """Tensor-matrix product along one mode.

    Satisfies ``unfold(mode_product(x, a, d), d) == a @ unfold(x, d)``;
    the mode-d dimension ``p_d`` is replaced by ``a.shape[0]``.
    """
    x = np.asarray(x)
    mat = np.asarray(mat)
    _check_mode(x, mode)
    if mat.ndim != 2:
        raise ValueError("mode_product expects a matrix")
    if mat.shape[1] != x.shape[mode]:
        raise ValueError(
            f"matrix with {mat.shape[1]} columns cannot contract mode {mode} "
            f"of size {x.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(mat, x, axes=(1, mode)), 0, mode)


def multi_mode_product(
    x: np.ndarray,
    mats,
    modes=None,
    transpose: bool | list[bool] = False,
    skip: int | None = None,
) -> np.ndarray:
    """Apply a mode product for several modes in one call.

    Parameters
    ----------
    x : ndarray
        Input tensor.
    mats : sequence of ndarray
        One matrix per entry of ``modes``.
    modes : sequence of int, optional
        Modes the matrices act on; defaults to ``0, 1, ...``.  At most one
        matrix per mode.
    transpose : bool or sequence of bool
        Apply the transpose of the corresponding matrix.  A single flag
        applies to every entry.
    skip : int, optional
        Position in ``mats`` to leave out (convenient for leave-one-mode-out
        projections).

    Returns
    -------
    ndarray
        The tensor ``x x_{m0} M0 x_{m1} M1 ...``; mode products on distinct
        modes commute, so the application order does not matter.
    """
    x = np.asarray(x)
    mats = list(mats)
    if modes is None:
        modes = list(range(len(mats)))
    else:
        modes = [int(m) for m in modes]
    if len(modes) != len(mats):
        raise ValueError("mats and modes must have equal length")
    if isinstance(transpose, (bool, np.bool_)):
        transpose = [bool(transpose)] * len(mats)
    if len(transpose) != len(mats):
        raise ValueError("transpose flags must match mats")
    seen = set()
    for i, mode in enumerate(modes):
        if i == skip:
            continue
        if mode in seen:
            raise ValueError(f"duplicate mode {mode} in multi_mode_product")
        seen.add(mode)
    out = x
    for i, (mat, mode) in enumerate(zip(mats, modes)):
        if i == skip:
            continue
        mat = np.asarray(mat)
        out = mode_product(out, mat.T if transpose[i] else mat, mode)
    return out


def vectorize(x: np.ndarray) -> np.ndarray:
    """Flatten a tensor with the first index varying fastest."""
    return np.asarray(x).ravel(order="F")


def kronecker(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the usual block convention.

    Entry ``(i*rows(b) + k, j*cols(b) + l)`` equals ``a[i, j] * b[k, l]``.
    """
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    m, n = a.shape
    q, r = b.shape
    return np.einsum("ij,kl->ikjl", a, b).reshape(m * q, n * r)


def frobenius_norm(x: np.ndarray) -> float:
    """Square root of the sum of squared entries, for any array shape."""
    return float(np.linalg.norm(np.asarray(x).ravel()))
