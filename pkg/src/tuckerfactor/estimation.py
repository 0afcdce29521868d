"""Mode-wise PCA estimators for the Tucker tensor factor model.

A sample of D-way observations is handled as one array of shape
``(T, p_1, ..., p_D)`` whose leading axis indexes time.  The model writes
each observation as a low-rank signal plus noise,

    X_t = F_t x_1 A_1 x_2 ... x_D A_D + E_t,

with loadings ``A_d`` of shape ``(p_d, k_d)`` normalized so that
``A_d.T @ A_d = p_d * I``.  Three estimators are provided:

* :func:`mopca_fit` - PCA on each mode's raw unfolding covariance;
* :func:`pmopca_fit` - one projection step through frozen initial
  loadings before the per-mode PCA;
* :func:`ipmopca_fit` - alternating projected PCA sweeps with optional
  within-sweep updates, stopped by a projector-distance criterion.

Rank selection by consecutive eigenvalue ratios and a varimax rotation
for loading interpretation round out the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import subspace_distance, top_k_eigensystem
from .tensor import mode_product, multi_mode_product

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 50
RATIO_FLOOR = 1e-12


@dataclass
class FactorFit:
    """Result of a factor-model fit.

    Attributes
    ----------
    loadings : list of ndarray
        Per-mode loading matrices, ``loadings[d]`` of shape ``(p_d, k_d)``
        with ``loadings[d].T @ loadings[d] = p_d * I`` up to rounding.
    factors : ndarray
        Core tensors, shape ``(T, k_1, ..., k_D)``.
    signals : ndarray or None
        Fitted low-rank part, shape ``(T, p_1, ..., p_D)``.  Reported in
        centered coordinates when the fit centered the data.
    eigvals : list of ndarray
        Per-mode descending eigenvalues of the final covariance matrices
        (all ``p_d`` of them, clipped at zero).
    iterations : int
        Completed refinement sweeps (0 for the plain mode-wise fit).
    converged : bool
        Whether the stopping criterion was met within the sweep budget.
    per_sweep_distance : list of float
        History of the stopping statistic, one entry per sweep.
    mean : ndarray or None
        Temporal mean tensor subtracted before fitting, if any.
    """

    loadings: list[np.ndarray]
    factors: np.ndarray
    signals: np.ndarray | None
    eigvals: list[np.ndarray]
    iterations: int
    converged: bool
    per_sweep_distance: list[float] = field(default_factory=list)
    mean: np.ndarray | None = None

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(a.shape[1] for a in self.loadings)


@dataclass
class EstimatorConfig:
    """Bundle of estimator options used by the experiment runner and CLI.

    ``ranks`` may be an explicit tuple or ``"auto"`` to select ranks by
    the eigenvalue-ratio rule with upper bound ``k_max`` (default
    ``min(8, min_d p_d - 1)``).  ``lags`` only matters for the
    auto-covariance baseline.
    """

    method: str = "mopca"
    ranks: tuple[int, ...] | str = "auto"
    k_max: int | None = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    update_within_sweep: bool = True
    center: bool = True
    lags: int = 1

    def __post_init__(self):
        if self.method not in ("mopca", "pmopca", "ipmopca", "itipup"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def _as_series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim < 2:
        raise ValueError("a series must have shape (T, p_1, ..., p_D)")
    if x.shape[0] < 1:
        raise ValueError("series is empty")
    return x


def _center(x: np.ndarray, center: bool):
    if not center:
        return x, None
    mean = x.mean(axis=0)
    return x - mean, mean


def _check_ranks(ranks, dims) -> tuple[int, ...]:
    ranks = tuple(int(k) for k in ranks)
    if len(ranks) != len(dims):
        raise ValueError(f"got {len(ranks)} ranks for {len(dims)} modes")
    for k, p in zip(ranks, dims):
        if not 1 <= k <= p:
            raise ValueError(f"rank {k} out of range for mode of size {p}")
    return ranks


def default_k_max(dims) -> int:
    return min(8, min(dims) - 1) if min(dims) > 1 else 1


def mode_covariance(x: np.ndarray, mode: int) -> np.ndarray:
    """Mode-d sample covariance ``sum_t X_t^(d) X_t^(d)' / (T p)``.

    ``p`` is the full tensor size ``p_1 * ... * p_D``.  The result is
    symmetric positive semidefinite of shape ``(p_d, p_d)``.
    """
    x = _as_series(x)
    d_count = x.ndim - 1
    if not 0 <= mode < d_count:
        raise ValueError(f"mode {mode} out of range for {d_count}-way data")
    t_len = x.shape[0]
    p = math.prod(x.shape[1:])
    axes = tuple(i for i in range(x.ndim) if i != mode + 1)
    m = np.tensordot(x, x, axes=(axes, axes)) / (t_len * p)
    return (m + m.T) / 2.0


def projected_series(x: np.ndarray, loadings, mode: int) -> np.ndarray:
    """Project each observation through every other mode's loadings.

    Returns the stack of ``X_t^(d) (A_D kron ... kron A_{d+1} kron
    A_{d-1} kron ... kron A_1) / p_{-d}`` as an array of shape
    ``(T, p_d, k_{-d})``.  The Kronecker matrix is never materialized;
    the product is evaluated by successive mode products.
    """
    x = _as_series(x)
    d_count = x.ndim - 1
    if not 0 <= mode < d_count:
        raise ValueError(f"mode {mode} out of range for {d_count}-way data")
    loadings = list(loadings)
    if len(loadings) != d_count:
        raise ValueError(f"need {d_count} loading matrices, got {len(loadings)}")
    for d, a in enumerate(loadings):
        if d != mode and a.shape[0] != x.shape[d + 1]:
            raise ValueError(
                f"loading for mode {d} has {a.shape[0]} rows, data has {x.shape[d + 1]}"
            )
    p_other = math.prod(x.shape[1:]) // x.shape[mode + 1]
    y = x
    for d in range(d_count):
        if d == mode:
            continue
        y = mode_product(y, loadings[d].T, d + 1)
    # per-observation mode-d unfolding of the projected stack, batched:
    # reverse the trailing axes so a C-order reshape enumerates them with
    # the lowest original mode fastest (the unfold column convention)
    z = np.moveaxis(y, mode + 1, 1)
    z = z.transpose((0, 1) + tuple(range(z.ndim - 1, 1, -1)))
    return z.reshape(x.shape[0], x.shape[mode + 1], -1) / p_other


def projected_mode_covariance(x: np.ndarray, loadings, mode: int) -> np.ndarray:
    """Covariance ``sum_t Y_t Y_t' / (T p_d)`` of the projected series."""
    y = projected_series(x, loadings, mode)
    t_len, p_d = y.shape[0], y.shape[1]
    m = np.einsum("tij,tkj->ik", y, y) / (t_len * p_d)
    return (m + m.T) / 2.0


def extract_factors(x: np.ndarray, loadings, center: bool = False) -> np.ndarray:
    """Core tensors ``F_t = X_t x_1 A_1' x_2 ... x_D A_D' / p``."""
    x = _as_series(x)
    x, _ = _center(x, center)
    d_count = x.ndim - 1
    p = math.prod(x.shape[1:])
    modes = list(range(1, d_count + 1))
    return multi_mode_product(x, loadings, modes=modes, transpose=True) / p


def reconstruct_signals(factors: np.ndarray, loadings) -> np.ndarray:
    """Signal tensors ``S_t = F_t x_1 A_1 x_2 ... x_D A_D``."""
    factors = _as_series(factors)
    modes = list(range(1, factors.ndim))
    return multi_mode_product(factors, loadings, modes=modes)


def select_rank_from_eigenvalues(values: np.ndarray, k_max: int) -> int:
    """Index maximizing the consecutive eigenvalue ratio.

    ``values`` must be descending and nonnegative.  The denominator is
    floored at ``RATIO_FLOOR`` times the top eigenvalue so (near-)noiseless
    spectra stay well defined; ties resolve to the smallest index.
    Returns a 1-based rank.
    """
    values = np.asarray(values, dtype=float)
    if not 1 <= k_max <= values.size - 1:
        raise ValueError(f"k_max={k_max} out of range for {values.size} eigenvalues")
    if values[0] <= 0:
        raise ValueError("degenerate spectrum: top eigenvalue is zero")
    num = values[:k_max]
    den = np.maximum(values[1 : k_max + 1], RATIO_FLOOR * values[0])
    return int(np.argmax(num / den)) + 1


def estimate_ranks(
    x: np.ndarray,
    k_max: int | None = None,
    loadings=None,
    center: bool = False,
) -> tuple[int, ...]:
    """Eigenvalue-ratio rank selection, one rank per mode.

    Ratios are formed from the mode covariance spectra, or from the
    projected covariance spectra when ``loadings`` is supplied.
    """
    x = _as_series(x)
    x, _ = _center(x, center)
    dims = x.shape[1:]
    if k_max is None:
        k_max = default_k_max(dims)
    if k_max < 1 or any(k_max > p - 1 for p in dims):
        raise ValueError(f"k_max={k_max} out of range for dims {dims}")
    ranks = []
    for d in range(len(dims)):
        if loadings is None:
            m = mode_covariance(x, d)
        else:
            m = projected_mode_covariance(x, loadings, d)
        es = top_k_eigensystem(m, dims[d])
        ranks.append(select_rank_from_eigenvalues(np.maximum(es.values, 0.0), k_max))
    return tuple(ranks)


def _resolve_ranks(x, ranks, k_max):
    if isinstance(ranks, str):
        if ranks != "auto":
            raise ValueError(f"ranks must be a tuple or 'auto', got {ranks!r}")
        return estimate_ranks(x, k_max=k_max)
    return _check_ranks(ranks, x.shape[1:])


def _loadings_from_covariances(x, ranks, cov_fn):
    """Eigendecompose one covariance per mode; returns loadings + spectra."""
    dims = x.shape[1:]
    loadings, eigvals = [], []
    for d, (p_d, k_d) in enumerate(zip(dims, ranks)):
        es = top_k_eigensystem(cov_fn(d), p_d)
        eigvals.append(np.maximum(es.values, 0.0))
        loadings.append(np.sqrt(p_d) * es.vectors[:, :k_d])
    return loadings, eigvals


def mopca_fit(
    x: np.ndarray,
    ranks="auto",
    center: bool = True,
    k_max: int | None = None,
    keep_signals: bool = True,
) -> FactorFit:
    """Mode-wise PCA fit.

    Per mode, the loadings are ``sqrt(p_d)`` times the top ``k_d``
    eigenvectors of the mode covariance; factors and signals follow by
    the projection formulas.

    Parameters
    ----------
    x : ndarray
        Observations, shape ``(T, p_1, ..., p_D)``.
    ranks : tuple of int or "auto"
        Core dimensions per mode.
    center : bool
        Subtract the temporal mean tensor before estimating.
    k_max : int, optional
        Ratio-rule search bound when ``ranks="auto"``.
    keep_signals : bool
        Also materialize the fitted signal tensors.
    """
    x = _as_series(x)
    xc, mean = _center(x, center)
    ranks = _resolve_ranks(xc, ranks, k_max)
    loadings, eigvals = _loadings_from_covariances(
        xc, ranks, lambda d: mode_covariance(xc, d)
    )
    factors = extract_factors(xc, loadings)
    signals = reconstruct_signals(factors, loadings) if keep_signals else None
    return FactorFit(
        loadings=loadings,
        factors=factors,
        signals=signals,
        eigvals=eigvals,
        iterations=0,
        converged=True,
        per_sweep_distance=[],
        mean=mean,
    )


def pmopca_fit(
    x: np.ndarray,
    ranks="auto",
    init=None,
    center: bool = True,
    k_max: int | None = None,
    keep_signals: bool = True,
) -> FactorFit:
    """Projected mode-wise PCA fit.

    Every mode's covariance is built from the series projected through the
    *frozen* initial loadings (mode-wise PCA estimates by default); one
    eigendecomposition per mode then yields the refined loadings.
    """
    x = _as_series(x)
    xc, mean = _center(x, center)
    if init is None:
        init = mopca_fit(xc, ranks, center=False, k_max=k_max,
                         keep_signals=False).loadings
        ranks = tuple(a.shape[1] for a in init)
    else:
        init = [np.asarray(a, dtype=float) for a in init]
        if isinstance(ranks, str):
            ranks = estimate_ranks(xc, k_max=k_max, loadings=init)
        else:
            ranks = _check_ranks(ranks, xc.shape[1:])
    loadings, eigvals = _loadings_from_covariances(
        xc, ranks, lambda d: projected_mode_covariance(xc, init, d)
    )
    dist = max(
        subspace_distance(new, old) for new, old in zip(loadings, init)
    )
    factors = extract_factors(xc, loadings)
    signals = reconstruct_signals(factors, loadings) if keep_signals else None
    return FactorFit(
        loadings=loadings,
        factors=factors,
        signals=signals,
        eigvals=eigvals,
        iterations=1,
        converged=True,
        per_sweep_distance=[dist],
        mean=mean,
    )


def iterate_projected_fit(
    x: np.ndarray,
    ranks,
    init,
    cov_fn,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    update_within_sweep: bool = True,
    stop_norm: str = "spectral",
):
    """Shared sweep loop for the iterative projected estimators.

    ``cov_fn(x, loadings, d)`` must return the mode-d covariance of the
    series projected through ``loadings``.  Sweeps run over modes in
    order; with ``update_within_sweep`` the projection for mode d already
    uses this sweep's refreshed loadings for lower modes.  After each full
    sweep the largest per-mode distance between the old and new projectors
    is compared against ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    dims = x.shape[1:]
    current = [np.array(a, dtype=float) for a in init]
    eigvals = [None] * len(dims)
    history: list[float] = []
    converged = False
    sweeps = 0
    for _ in range(max_iter):
        start = [a.copy() for a in current]
        for d, (p_d, k_d) in enumerate(zip(dims, ranks)):
            projector = current if update_within_sweep else start
            es = top_k_eigensystem(cov_fn(x, projector, d), p_d)
            eigvals[d] = np.maximum(es.values, 0.0)
            current[d] = np.sqrt(p_d) * es.vectors[:, :k_d]
        sweeps += 1
        dist = max(
            subspace_distance(new, old, norm=stop_norm)
            for new, old in zip(current, start)
        )
        history.append(dist)
        if dist <= tol:
            converged = True
            break
    return current, eigvals, sweeps, converged, history


def ipmopca_fit(
    x: np.ndarray,
    ranks="auto",
    init=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    update_within_sweep: bool = True,
    center: bool = True,
    k_max: int | None = None,
    stop_norm: str = "spectral",
    keep_signals: bool = True,
) -> FactorFit:
    """Iterative projected mode-wise PCA fit.

    Starting from the mode-wise PCA loadings (or ``init``), each sweep
    refreshes every mode's loadings from the projected covariance and the
    iteration stops once the largest per-mode projector distance falls
    below ``tol`` or ``max_iter`` sweeps complete.  Non-convergence is not
    an error; inspect ``converged`` and ``per_sweep_distance``.

    With ``max_iter=1`` and ``update_within_sweep=False`` this reproduces
    the one-shot projected fit exactly.
    """
    x = _as_series(x)
    xc, mean = _center(x, center)
    if init is None:
        init = mopca_fit(xc, ranks, center=False, k_max=k_max,
                         keep_signals=False).loadings
        ranks = tuple(a.shape[1] for a in init)
    else:
        init = [np.asarray(a, dtype=float) for a in init]
        if isinstance(ranks, str):
            ranks = tuple(a.shape[1] for a in init)
        else:
            ranks = _check_ranks(ranks, xc.shape[1:])
    loadings, eigvals, sweeps, converged, history = iterate_projected_fit(
        xc,
        ranks,
        init,
        lambda s, lds, d: projected_mode_covariance(s, lds, d),
        tol=tol,
        max_iter=max_iter,
        update_within_sweep=update_within_sweep,
        stop_norm=stop_norm,
    )
    factors = extract_factors(xc, loadings)
    signals = reconstruct_signals(factors, loadings) if keep_signals else None
    return FactorFit(
        loadings=loadings,
        factors=factors,
        signals=signals,
        eigvals=eigvals,
        iterations=sweeps,
        converged=converged,
        per_sweep_distance=history,
        mean=mean,
    )


def _varimax_criterion(b: np.ndarray) -> float:
    p = b.shape[0]
    b2 = b * b
    return float(np.sum(b2 * b2) / p - np.sum((b2.sum(axis=0) / p) ** 2))


def varimax(a: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100):
    """Varimax rotation by pairwise Jacobi sweeps.

    Rotates column pairs with the classical planar angle until the
    varimax criterion (total variance of squared loadings) stops
    improving.  Returns ``(rotated, q)`` with ``rotated = a @ q`` and
    ``q`` orthogonal; the column space is unchanged.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[1] < 1:
        raise ValueError("varimax expects a matrix with at least one column")
    if not np.all(np.isfinite(a)):
        raise ValueError("varimax: input contains non-finite entries")
    p, k = a.shape
    q = np.eye(k)
    b = a.copy()
    if k == 1:
        return b, q
    for _ in range(max_sweeps):
        improved = 0.0
        for i in range(k - 1):
            for j in range(i + 1, k):
                x, y = b[:, i], b[:, j]
                u = x * x - y * y
                v = 2.0 * x * y
                su, sv = u.sum(), v.sum()
                num = 2.0 * (u @ v) - 2.0 * su * sv / p
                den = (u @ u - v @ v) - (su * su - sv * sv) / p
                phi = 0.25 * math.atan2(num, den)
                if phi == 0.0:
                    continue
                best_gain, best_g = 0.0, None
                pair = b[:, (i, j)]
                base = _varimax_criterion(pair)
                for angle in (phi, -phi):
                    c, s = math.cos(angle), math.sin(angle)
                    g = np.array([[c, -s], [s, c]])
                    gain = _varimax_criterion(pair @ g) - base
                    if gain > best_gain:
                        best_gain, best_g = gain, g
                if best_g is None:
                    continue
                b[:, (i, j)] = pair @ best_g
                q[:, (i, j)] = q[:, (i, j)] @ best_g
                improved += best_gain
        value = _varimax_criterion(b)
        if improved <= tol * max(1.0, abs(value)):
            break
    return b, q
