"""
Exact recovery on noise-free data
=================================

When observations are exactly low rank, all three estimators recover
the loading spaces and the signal tensors to machine precision.  The
script also shows a varimax rotation of the recovered loadings - the
column space is unchanged, only the basis becomes sparser to read.
"""
import numpy as np

from tuckerfactor import (
    column_space_distance,
    ipmopca_fit,
    mopca_fit,
    noiseless_dataset,
    pmopca_fit,
    signal_rmse,
    varimax,
)


def main(T=10, dims=(10, 10, 10), ranks=(2, 3, 4), seed=42):
    print("=" * 70)
    print(f"Noise-free recovery (T={T}, dims={dims}, ranks={ranks})")
    print("=" * 70)

    series, truth = noiseless_dataset(T=T, dims=dims, ranks=ranks, seed=seed)

    fits = {
        "mopca": mopca_fit(series, ranks, center=False),
        "pmopca": pmopca_fit(series, ranks, center=False),
        "ipmopca": ipmopca_fit(series, ranks, center=False),
    }
    print(f"\n{'method':<10}{'max space distance':>20}{'signal RMSE':>16}"
          f"{'sweeps':>8}")
    for name, fit in fits.items():
        dist = max(
            column_space_distance(a, b)
            for a, b in zip(fit.loadings, truth.loadings)
        )
        rmse = signal_rmse(fit.signals, truth.signals)
        print(f"{name:<10}{dist:>20.2e}{rmse:>16.2e}{fit.iterations:>8}")

    # varimax rotation: same subspace, sparser display
    a = fits["ipmopca"].loadings[0]
    rotated, q = varimax(a)
    print("\nmode-1 loadings after varimax (rounded):")
    print(np.round(rotated, 1))
    print(f"rotation orthogonality error: "
          f"{np.abs(q.T @ q - np.eye(q.shape[0])).max():.2e}")
    print(f"column space moved by       : "
          f"{column_space_distance(rotated, a):.2e}")

    print("\nDone.")
    return fits


if __name__ == "__main__":
    main()
