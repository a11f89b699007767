"""System (Johansen) and residual-based two-break (Hatemi-J style) cointegration tests.

The Johansen test concentrates the VECM on its short-run dynamics, solves
the reduced-rank eigenvalue problem through the symmetric pencil of
product-moment matrices, and reports the trace / maximum-eigenvalue
sequences with embedded 5% (and 90/99%) critical values for the
unrestricted-constant case.

The two-break residual test regresses the dependent variable on regime
dummies (level shifts, optionally slope shifts) and the regressors for
every admissible break pair, then applies an ADF-type statistic and the
two Phillips corrections (Z_t, Z_a) to the cointegrating residuals; each
statistic is minimized over the pair grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, TimeSeries
from .errors import (
    AlignmentMismatch,
    DegenerateRegression,
    InsufficientSample,
    NotPositiveDefinite,
    RankDeficient,
    TrimOutOfRange,
)
from .linalg import generalized_eigen, long_run_covariance, newey_west_bandwidth, ols_fit
from .unitroot import _break_candidates, default_max_lag

LEVELS = (0.01, 0.05, 0.10)

# Trace / max-eigenvalue critical values for the unrestricted-constant case,
# indexed by k - r = 1..6; columns are 90%, 95%, 99%.
TRACE_CRITICAL_VALUES = {
    1: (2.7055, 3.8415, 6.6349),
    2: (13.4294, 15.4943, 19.9349),
    3: (27.0669, 29.7961, 35.4628),
    4: (44.4929, 47.8545, 54.6815),
    5: (65.8202, 69.8189, 77.8202),
    6: (91.1090, 95.7542, 104.9637),
}
MAXEIG_CRITICAL_VALUES = {
    1: (2.7055, 3.8415, 6.6349),
    2: (12.2971, 14.2639, 18.5200),
    3: (18.8928, 21.1314, 25.8650),
    4: (25.1236, 27.5858, 32.7172),
    5: (31.2379, 33.8777, 39.3693),
    6: (37.2786, 40.0763, 45.8662),
}

# Two-break residual-test critical values (1%, 5%, 10%).
HATEMI_J_CRITICAL_VALUES = {
    "adf": {0.01: -6.503, 0.05: -6.015, 0.10: -5.653},
    "zt": {0.01: -6.503, 0.05: -6.015, 0.10: -5.653},
    "za": {0.01: -90.794, 0.05: -76.003, 0.10: -52.232},
}


@dataclass(frozen=True)
class JohansenResult:
    eigenvalues: np.ndarray
    trace_stats: np.ndarray
    maxeig_stats: np.ndarray
    critical_values_trace: np.ndarray   # 5% values indexed by r
    critical_values_maxeig: np.ndarray  # 5% values indexed by r
    selected_rank: dict[float, int]
    lag_order: int
    det_case: str
    effective_T: int
    names: tuple[str, ...]


def var_lag_select(d: Dataset, max_lag: int = 3, criterion: str = "bic") -> int:
    """VAR lag order by multivariate information criterion on a common sample."""
    Y = d.matrix()
    T, k = Y.shape
    if T - max_lag <= k * max_lag + 1:
        raise InsufficientSample(f"T={T} too small for VAR lag search up to {max_lag}")
    best_p, best_ic = 1, math.inf
    for p in range(1, max_lag + 1):
        rows = np.arange(max_lag, T)  # common sample across p
        X = np.column_stack(
            [np.ones(rows.size)] + [Y[rows - j] for j in range(1, p + 1)]
        )
        lhs = Y[rows]
        beta, *_ = np.linalg.lstsq(X, lhs, rcond=None)
        E = lhs - X @ beta
        n = rows.size
        sigma = E.T @ E / n
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            continue
        n_params = X.shape[1] * k
        penalty = math.log(n) if criterion == "bic" else 2.0
        ic = n * logdet + penalty * n_params
        if ic < best_ic:
            best_p, best_ic = p, ic
    return best_p


def johansen_test(
    d: Dataset,
    lag_order: int | None = None,
    det_case: str = "unrestricted_constant",
) -> JohansenResult:
    """Reduced-rank trace and max-eigenvalue tests for the cointegration rank."""
    if det_case != "unrestricted_constant":
        raise NotImplementedError("only the unrestricted-constant case is supported")
    Y = d.matrix()
    T, k = Y.shape
    if k < 2:
        raise InsufficientSample("need at least two columns")
    if k > len(TRACE_CRITICAL_VALUES):
        raise InsufficientSample(f"critical values embedded for up to {len(TRACE_CRITICAL_VALUES)} variables")
    if lag_order is None:
        lag_order = var_lag_select(d)
    p = int(lag_order)
    if p < 1:
        raise InsufficientSample("lag_order must be >= 1")
    n = T - p
    if n <= k * p + k + 1:
        raise InsufficientSample(f"effective T={n} too small for k={k}, lag_order={p}")

    dY = np.diff(Y, axis=0)
    rows = np.arange(p - 1, T - 1)  # dY row indices for t = p+1..T
    lhs = dY[rows]
    ylag = Y[rows]  # y_{t-1}
    W = np.column_stack([np.ones(rows.size)] + [dY[rows - j] for j in range(1, p)])

    def _partial_out(M):
        beta, *_ = np.linalg.lstsq(W, M, rcond=None)
        return M - W @ beta

    R0 = _partial_out(lhs)
    R1 = _partial_out(ylag)
    S00 = R0.T @ R0 / n
    S11 = R1.T @ R1 / n
    S01 = R0.T @ R1 / n
    try:
        S00_inv = np.linalg.inv(S00)
        A = S01.T @ S00_inv @ S01
        eig = generalized_eigen(A, S11)
    except (np.linalg.LinAlgError, NotPositiveDefinite) as exc:
        raise RankDeficient(f"product-moment matrices singular: {exc}") from exc
    if eig.min() < -1e-8 or eig.max() >= 1.0:
        raise RankDeficient(f"eigenvalues outside [0, 1): {eig}")
    eig = np.clip(eig, 0.0, None)

    log_terms = np.log1p(-eig)
    trace = -n * np.cumsum(log_terms[::-1])[::-1]
    maxeig = -n * log_terms
    cv_trace = np.array([TRACE_CRITICAL_VALUES[k - r][1] for r in range(k)])
    cv_maxeig = np.array([MAXEIG_CRITICAL_VALUES[k - r][1] for r in range(k)])

    selected = {}
    for level, col in ((0.10, 0), (0.05, 1), (0.01, 2)):
        rank = k
        for r in range(k):
            if trace[r] < TRACE_CRITICAL_VALUES[k - r][col]:
                rank = r
                break
        selected[level] = rank

    return JohansenResult(
        eigenvalues=eig,
        trace_stats=trace,
        maxeig_stats=maxeig,
        critical_values_trace=cv_trace,
        critical_values_maxeig=cv_maxeig,
        selected_rank=selected,
        lag_order=p,
        det_case=det_case,
        effective_T=n,
        names=tuple(d.names),
    )


@dataclass(frozen=True)
class HatemiJResult:
    adf_star: float
    zt_star: float
    za_star: float
    breaks_adf: tuple[int, int]
    breaks_zt: tuple[int, int]
    breaks_za: tuple[int, int]
    critical_values: dict[str, dict[float, float]]
    reject_at: dict[str, dict[float, bool]]
    chosen_lag: int
    shift_spec: str
    pair_profile: tuple[tuple[tuple[int, int], float, float, float], ...]


def residual_adf_stat(u: np.ndarray, k: int) -> float:
    """ADF t-statistic on regression residuals (no deterministic terms)."""
    du = np.diff(u)
    n = u.size
    rows = slice(k, n - 1)
    lhs = du[rows]
    cols = [u[k : n - 1]]
    if k > 0:
        cols.append(np.column_stack([du[k - j : n - 1 - j] for j in range(1, k + 1)]))
    fit = ols_fit(lhs, np.column_stack(cols))
    return float(fit.t_stats[0])


def select_residual_adf_lag(u: np.ndarray, kmax: int) -> int:
    """General-to-specific 10% pruning for the residual ADF regression."""
    n = u.size
    kmax = max(0, min(kmax, (n - 1) // 3 - 1))
    du = np.diff(u)
    for k in range(kmax, 0, -1):
        rows = slice(k, n - 1)
        cols = [u[k : n - 1]]
        cols.append(np.column_stack([du[k - j : n - 1 - j] for j in range(1, k + 1)]))
        try:
            fit = ols_fit(du[rows], np.column_stack(cols))
        except RankDeficient:
            continue
        if abs(fit.t_stats[-1]) >= 1.645:
            return k
    return 0


def phillips_z_stats(u: np.ndarray, bandwidth: int | None = None) -> tuple[float, float]:
    """Phillips Z_t and Z_a corrections applied to cointegrating residuals."""
    ulag = u[:-1]
    ucur = u[1:]
    den = float(ulag @ ulag)
    if den <= 0.0:
        raise DegenerateRegression("residuals identically zero")
    rho = float(ulag @ ucur) / den
    v = ucur - rho * ulag
    n = v.size
    s2 = float(v @ v) / n
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(n)
    omega2 = long_run_covariance(v[:, None], bandwidth=bandwidth).omega[0, 0]
    lam = 0.5 * (omega2 - s2)
    omega = math.sqrt(max(omega2, 1e-300))
    za = n * (rho - 1.0) - lam * n * n / den
    t_rho = (rho - 1.0) / math.sqrt(s2 / den)
    zt = t_rho * math.sqrt(s2) / omega - lam * n / (omega * math.sqrt(den))
    return zt, za


def regime_shift_design(
    x: np.ndarray, tb1: int, tb2: int, shift_spec: str
) -> np.ndarray:
    """Design for the break-pair regression: constant, shift dummies, regressors."""
    T = x.shape[0]
    t = np.arange(1, T + 1)
    d1 = (t > tb1).astype(float)
    d2 = (t > tb2).astype(float)
    cols = [np.ones(T), d1, d2, x]
    if shift_spec == "level_and_slope_shifts":
        cols.extend([x * d1[:, None], x * d2[:, None]])
    elif shift_spec != "level_shifts":
        raise ValueError(f"unknown shift_spec {shift_spec!r}")
    return np.column_stack(cols)


def hatemi_j_test(
    y: TimeSeries,
    X: Dataset,
    trim: float = 0.15,
    shift_spec: str = "level_and_slope_shifts",
    bandwidth: int | None = None,
    adf_lag: int | None = None,
) -> HatemiJResult:
    """Two endogenous regime shifts in the cointegrating regression.

    For every admissible break pair the residual ADF, Z_t and Z_a statistics
    are computed; each is reported at its own minimizing pair. The ADF
    augmentation lag is selected once, at the first admissible pair, and
    held fixed so the grid minimum is well defined.
    """
    if len(y) != X.n_obs or y.start_year != X.start_year:
        raise AlignmentMismatch("dependent series and regressors are not aligned")
    if X.n_obs < 2 or not X.names:
        raise InsufficientSample("need at least one regressor column")
    x = X.matrix()
    T = x.shape[0]
    if not 0.05 <= trim <= 0.25:
        raise TrimOutOfRange(f"trim {trim} outside [0.05, 0.25]")
    cands = _break_candidates(T, trim)
    spacing = trim * T
    pairs = [(a, b) for a in cands for b in cands if b - a >= spacing]
    if not pairs:
        raise InsufficientSample("no admissible break pairs")
    n_params = regime_shift_design(x, *pairs[0], shift_spec).shape[1]
    if T <= n_params + 3:
        raise InsufficientSample(f"T={T} too small for {n_params} regression parameters")

    chosen_lag = adf_lag
    profile = []
    for tb1, tb2 in pairs:
        Z = regime_shift_design(x, tb1, tb2, shift_spec)
        try:
            u = ols_fit(y.values, Z).residuals
        except RankDeficient:
            continue
        if chosen_lag is None:
            chosen_lag = select_residual_adf_lag(u, default_max_lag(T))
        try:
            adf = residual_adf_stat(u, chosen_lag)
            zt, za = phillips_z_stats(u, bandwidth=bandwidth)
        except (RankDeficient, DegenerateRegression):
            continue
        years = (y.year_of_index(tb1), y.year_of_index(tb2))
        profile.append((years, adf, zt, za))
    if not profile:
        raise InsufficientSample("no admissible break pair produced a valid regression")

    best = {}
    for idx, key in ((1, "adf"), (2, "zt"), (3, "za")):
        entry = min(profile, key=lambda e: (e[idx], e[0]))
        best[key] = (entry[0], entry[idx])
    cvs = {k: dict(v) for k, v in HATEMI_J_CRITICAL_VALUES.items()}
    reject = {
        key: {lvl: bool(best[key][1] < cv) for lvl, cv in cvs[key].items()}
        for key in ("adf", "zt", "za")
    }
    return HatemiJResult(
        adf_star=best["adf"][1],
        zt_star=best["zt"][1],
        za_star=best["za"][1],
        breaks_adf=best["adf"][0],
        breaks_zt=best["zt"][0],
        breaks_za=best["za"][0],
        critical_values=cvs,
        reject_at=reject,
        chosen_lag=int(chosen_lag or 0),
        shift_spec=shift_spec,
        pair_profile=tuple(profile),
    )
