"""
Rank selection by eigenvalue ratios
===================================

The number of factors per mode is estimated by the index that maximizes
the ratio of consecutive covariance eigenvalues.  On contemporaneous
covariances this works in every scenario; the lag-based baseline needs
serially correlated factors and visibly fails without them.
"""
import numpy as np

from tuckerfactor import (
    SCENARIOS,
    estimate_ranks,
    estimate_ranks_tipup,
    mode_covariance,
    rank_accuracy,
    scenario_config,
    simulate_dataset,
    top_k_eigensystem,
)


def main(T=20, dims=(20, 20, 20), ranks=(2, 3, 4), reps=10, seed=7):
    print("=" * 70)
    print(f"Rank selection across scenarios (T={T}, dims={dims}, "
          f"true ranks={ranks}, {reps} replications)")
    print("=" * 70)

    print(f"\n{'scenario':<10}{'(phi, psi)':<14}{'covariance ratio':>18}"
          f"{'lagged baseline':>18}")
    for name in ("I", "II", "III", "IV"):
        config = scenario_config(name, T=T, dims=dims, ranks=ranks, seed=seed)
        acc_cov, acc_lag = [], []
        for rep in range(reps):
            series, _ = simulate_dataset(config, rep)
            acc_cov.append(rank_accuracy(estimate_ranks(series, k_max=8), ranks))
            acc_lag.append(rank_accuracy(estimate_ranks_tipup(series, k_max=8),
                                         ranks))
        print(f"{name:<10}{str(SCENARIOS[name]):<14}"
              f"{np.mean(acc_cov):>17.1f}%{np.mean(acc_lag):>17.1f}%")

    # one eigenvalue table to show the spectral gap the ratio rule finds
    config = scenario_config("I", T=T, dims=dims, ranks=ranks, seed=seed)
    series, _ = simulate_dataset(config, 0)
    print("\nmode-wise covariance eigenvalues (scenario I, one draw):")
    for d in range(3):
        values = top_k_eigensystem(mode_covariance(series, d), 8).values
        marked = ["%.3f" % v for v in values]
        marked[ranks[d] - 1] += " |"  # the gap sits right of the true rank
        print(f"  mode {d + 1}: " + "  ".join(marked))

    print("\nDone.")


if __name__ == "__main__":
    main()
