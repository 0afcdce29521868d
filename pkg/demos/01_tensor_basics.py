"""
Tensor algebra conventions
==========================

A tour of the index conventions everything else in the package relies
on: Fortran-order vectorization, mode-wise unfolding, mode products and
the Kronecker identity that ties them together.
"""
from functools import reduce

import numpy as np

from tuckerfactor import (
    fold,
    frobenius_norm,
    kronecker,
    mode_product,
    multi_mode_product,
    unfold,
    vectorize,
)


def main():
    print("=" * 70)
    print("Tensor basics: unfolding, folding, mode products")
    print("=" * 70)

    # a 2x2x2 tensor whose vectorization is 1..8 (first index fastest)
    x = np.arange(1.0, 9.0).reshape((2, 2, 2), order="F")
    print("\nvec(X)          :", vectorize(x))
    print("unfold(X, 0)    :\n", unfold(x, 0))
    print("unfold(X, 1)    :\n", unfold(x, 1))

    # folding inverts unfolding exactly, for every mode
    for mode in range(3):
        assert np.array_equal(fold(unfold(x, mode), mode, x.shape), x)
    print("\nfold(unfold(X, d), d) == X for every mode: OK")

    # mode product on the unfolding: unfold(X x_d A, d) = A @ unfold(X, d)
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 2))
    lhs = unfold(mode_product(x, a, 1), 1)
    rhs = a @ unfold(x, 1)
    print(f"unfold/mode-product identity error: {np.abs(lhs - rhs).max():.2e}")

    # the Kronecker identity behind all the projection formulas:
    # vec(F x_1 A_1 ... x_D A_D) = (A_D kron ... kron A_1) vec(F)
    core = rng.standard_normal((2, 3, 2))
    mats = [rng.standard_normal((p, k)) for p, k in zip((5, 4, 3), (2, 3, 2))]
    lhs = vectorize(multi_mode_product(core, mats))
    rhs = reduce(np.kron, mats[::-1]) @ vectorize(core)
    print(f"Kronecker-vec identity error      : {np.abs(lhs - rhs).max():.2e}")

    # kronecker() matches the block convention used in that identity
    i6 = kronecker(np.eye(2), np.eye(3))
    print(f"kron(I2, I3) == I6                : {np.array_equal(i6, np.eye(6))}")

    # Frobenius norm is invariant under any unfolding
    norms = [frobenius_norm(unfold(x, d)) for d in range(3)]
    print(f"norm across unfoldings            : {norms}")

    print("\nDone.")


if __name__ == "__main__":
    main()
