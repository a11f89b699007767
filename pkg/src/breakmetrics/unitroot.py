"""Unit-root tests: ADF plus single/two-break endogenous-break variants.

za_test searches every admissible break date, augments the Dickey-Fuller
regression with level/trend break dummies, and reports the most negative
t-statistic on the lagged level. ls_test is the LM (score) variant: the
series is detrended with first-difference estimates of the deterministic
terms, and the test regression explains the differenced series with the
lagged detrended level; one or two breaks are searched jointly.

Break dummies follow the package convention du_t = 1{t > tb}, so a
reported break year is the last year of the pre-break regime. Candidate
grids are scanned in ascending order and ties resolve to the earliest
break, making results independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import TimeSeries, break_dummies
from .errors import (
    DegenerateRegression,
    RankDeficient,
    SeriesTooShort,
    TrimOutOfRange,
)
from .linalg import ols_fit

LEVELS = (0.01, 0.05, 0.10)

# Dickey-Fuller asymptotic critical values (1%, 5%, 10%).
ADF_CRITICAL_VALUES = {
    "none": {0.01: -2.58, 0.05: -1.95, 0.10: -1.62},
    "constant": {0.01: -3.43, 0.05: -2.86, 0.10: -2.57},
    "constant_trend": {0.01: -3.96, 0.05: -3.41, 0.10: -3.12},
}

# Single-break minimum-t critical values by model (1%, 5%, 10%).
ZA_CRITICAL_VALUES = {
    "A": {0.01: -5.34, 0.05: -4.93, 0.10: -4.58},
    "B": {0.01: -4.93, 0.05: -4.42, 0.10: -4.11},
    "C": {0.01: -5.57, 0.05: -5.08, 0.10: -4.82},
}

# Minimum-LM critical values keyed by (model, n_breaks); the two-break
# trend-shift values are for mid-sample break fractions. All rows can be
# re-derived with montecarlo.simulate_critical_values.
LS_CRITICAL_VALUES = {
    ("A", 1): {0.01: -4.239, 0.05: -3.566, 0.10: -3.211},
    ("C", 1): {0.01: -5.11, 0.05: -4.51, 0.10: -4.17},
    ("A", 2): {0.01: -4.545, 0.05: -3.842, 0.10: -3.504},
    ("C", 2): {0.01: -5.823, 0.05: -5.286, 0.10: -4.989},
}


@dataclass(frozen=True)
class AdfSpec:
    """Deterministic terms and lag-selection rule for the ADF regression.

    lag_rule is either an int (fixed lag count), "t_sig_10pct"
    (general-to-specific pruning at the 10% level), or "aic".
    """

    deterministic: str = "constant"
    max_lag: int | None = None
    lag_rule: int | str = "t_sig_10pct"

    def __post_init__(self):
        if self.deterministic not in ("none", "constant", "constant_trend"):
            raise ValueError(f"unknown deterministic spec {self.deterministic!r}")
        if isinstance(self.lag_rule, str) and self.lag_rule not in ("t_sig_10pct", "aic"):
            raise ValueError(f"unknown lag rule {self.lag_rule!r}")


@dataclass(frozen=True)
class BreakTestReport:
    """Outcome of a (break-)unit-root test.

    candidate_profile holds every admissible break combination (as calendar
    years) with its statistic; the headline statistic is its exact minimum.
    """

    test: str
    model: str | None
    statistic: float
    break_indices: tuple[int, ...]
    chosen_lag: int
    candidate_profile: tuple[tuple[tuple[int, ...], float], ...]
    critical_values: dict[float, float]
    reject_at: dict[float, bool] = field(default_factory=dict)
    effective_T: int = 0

    @staticmethod
    def build(test, model, chosen_lag, profile, critical_values, effective_T):
        best_breaks, best_stat = min(profile, key=lambda e: (e[1], e[0]))
        reject = {lvl: bool(best_stat < cv) for lvl, cv in critical_values.items()}
        return BreakTestReport(
            test=test,
            model=model,
            statistic=float(best_stat),
            break_indices=tuple(best_breaks),
            chosen_lag=int(chosen_lag),
            candidate_profile=tuple((tuple(b), float(s)) for b, s in profile),
            critical_values=dict(critical_values),
            reject_at=reject,
            effective_T=int(effective_T),
        )


def _lag_matrix(v: np.ndarray, k: int) -> np.ndarray:
    """Columns [v_{t-1}, ..., v_{t-k}] aligned with v_t, rows t = k..len-1."""
    if k == 0:
        return np.empty((v.size, 0))
    return np.column_stack([v[k - j - 1 : v.size - j - 1] for j in range(k)][::-1])


def _adf_design(y: np.ndarray, k: int, deterministic: str, extra: list[np.ndarray] | None = None):
    """Rows t = k+2..T (1-based): dy_t on deterministics, y_{t-1}, dy lags, extras.

    `extra` columns are given on the level index 1..T and sliced to the rows.
    """
    T = y.size
    dy = np.diff(y)
    rows = slice(k, T - 1)  # dy index k..T-2  <=>  t = k+2..T
    lhs = dy[rows]
    t_idx = np.arange(k + 2, T + 1, dtype=float)
    cols = [np.ones_like(lhs)]
    if deterministic == "constant_trend":
        cols.append(t_idx)
    elif deterministic == "none":
        cols = []
    if extra:
        cols.extend(e[k + 1 : T] for e in extra)
    cols.append(y[k : T - 1])  # y_{t-1}
    ylag_col = len(cols) - 1
    if k > 0:
        dylags = np.column_stack([dy[k - j : T - 1 - j] for j in range(1, k + 1)])
        cols.append(dylags)
    X = np.column_stack(cols) if cols else np.empty((lhs.size, 0))
    return lhs, X, ylag_col


def _adf_tstat(y: np.ndarray, k: int, deterministic: str, extra=None):
    lhs, X, ylag_col = _adf_design(y, k, deterministic, extra)
    try:
        fit = ols_fit(lhs, X)
    except RankDeficient as exc:
        raise DegenerateRegression(str(exc)) from exc
    if fit.sigma2 <= 1e-14 * max(1.0, float(lhs @ lhs)):
        raise DegenerateRegression("zero residual variance in test regression")
    return float(fit.t_stats[ylag_col]), fit


def default_max_lag(T: int) -> int:
    """Schwert rule floor(12 * (T/100)^(1/4)), capped below T/3."""
    k = int(math.floor(12.0 * (T / 100.0) ** 0.25))
    return max(0, min(k, (T - 1) // 3 - 1))


def _select_lag(y: np.ndarray, spec: AdfSpec, deterministic: str) -> int:
    """Pick the augmentation lag per spec.lag_rule on a fixed common sample."""
    if isinstance(spec.lag_rule, int):
        return spec.lag_rule
    T = y.size
    kmax = spec.max_lag if spec.max_lag is not None else default_max_lag(T)
    kmax = max(0, min(kmax, (T - 1) // 3 - 1))
    if kmax == 0:
        return 0
    if spec.lag_rule == "t_sig_10pct":
        for k in range(kmax, 0, -1):
            lhs, X, _ = _adf_design(y, k, deterministic)
            try:
                fit = ols_fit(lhs, X)
            except RankDeficient:
                continue
            if abs(fit.t_stats[-1]) >= 1.645:
                return k
        return 0
    # AIC on the kmax-trimmed common sample
    best_k, best_aic = 0, np.inf
    offset = None
    for k in range(0, kmax + 1):
        lhs, X, _ = _adf_design(y, k, deterministic)
        drop = kmax - k
        lhs, X = lhs[drop:], X[drop:]
        try:
            fit = ols_fit(lhs, X)
        except RankDeficient:
            continue
        n = lhs.size
        aic = n * math.log(max(fit.ssr, 1e-300) / n) + 2.0 * X.shape[1]
        if offset is None:
            offset = aic
        if aic < best_aic:
            best_k, best_aic = k, aic
    return best_k


def adf_test(y: TimeSeries, spec: AdfSpec | None = None) -> BreakTestReport:
    """Augmented Dickey-Fuller t-test on the lagged level coefficient."""
    spec = spec or AdfSpec()
    v = y.values
    k = _select_lag(v, spec, spec.deterministic)
    if v.size - 1 - k < 15:
        raise SeriesTooShort(f"only {v.size - 1 - k} usable observations after {k} lags")
    stat, fit = _adf_tstat(v, k, spec.deterministic)
    return BreakTestReport.build(
        test="ADF",
        model=None,
        chosen_lag=k,
        profile=[((), stat)],
        critical_values=ADF_CRITICAL_VALUES[spec.deterministic],
        effective_T=fit.T,
    )


def _check_trim(trim: float, T: int):
    if not 0.05 <= trim <= 0.25:
        raise TrimOutOfRange(f"trim {trim} outside [0.05, 0.25]")
    if T * trim < 2:
        raise TrimOutOfRange(f"T*trim = {T * trim:.1f} < 2")


def _break_candidates(T: int, trim: float) -> range:
    lo = max(2, int(math.ceil(trim * T)))
    hi = min(T - 2, int(math.floor((1.0 - trim) * T)))
    return range(lo, hi + 1)


def za_test(
    y: TimeSeries,
    model: str = "C",
    trim: float = 0.15,
    spec: AdfSpec | None = None,
) -> BreakTestReport:
    """Single endogenous break unit-root test (minimum Dickey-Fuller t).

    The augmentation lag is selected once on the no-break trend regression
    and held fixed across break candidates.
    """
    if model not in ("A", "B", "C"):
        raise ValueError(f"model must be A, B, or C, got {model!r}")
    spec = spec or AdfSpec(deterministic="constant_trend")
    v = y.values
    T = v.size
    _check_trim(trim, T)
    k = _select_lag(v, spec, "constant_trend")
    if T - 1 - k < 15:
        raise SeriesTooShort(f"only {T - 1 - k} usable observations after {k} lags")

    profile = []
    eff_T = 0
    for tb in _break_candidates(T, trim):
        bd = break_dummies(T, tb, model)
        extra = [d for d in (bd.du, bd.dt) if d is not None]
        try:
            stat, fit = _adf_tstat(v, k, "constant_trend", extra)
        except DegenerateRegression:
            continue
        profile.append(((y.year_of_index(tb),), stat))
        eff_T = fit.T
    if not profile:
        raise DegenerateRegression("no admissible break candidate produced a valid regression")
    return BreakTestReport.build(
        test="ZA",
        model=model,
        chosen_lag=k,
        profile=profile,
        critical_values=ZA_CRITICAL_VALUES[model],
        effective_T=eff_T,
    )


def _ls_deterministics(T: int, tbs: tuple[int, ...], model: str):
    """LM-detrending deterministic block Z_t (excluding the absorbed level).

    Model A: [t, DU_1, DU_2]; model C adds the trend shifts [DT_1, DT_2].
    """
    t = np.arange(1.0, T + 1.0)
    cols = [t]
    for tb in tbs:
        cols.append((np.arange(1, T + 1) > tb).astype(float))
    if model == "C":
        for tb in tbs:
            cols.append(np.maximum(np.arange(1, T + 1) - tb, 0).astype(float))
    return np.column_stack(cols)


def ls_lm_statistic(y: np.ndarray, tbs: tuple[int, ...], model: str, k: int) -> float:
    """t-statistic on the lagged LM-detrended level for fixed break dates."""
    T = y.size
    Z = _ls_deterministics(T, tbs, model)
    dZ = np.diff(Z, axis=0)
    dy = np.diff(y)
    delta = ols_fit(dy, dZ).coefficients
    psi = y[0] - Z[0] @ delta
    S = y - psi - Z @ delta  # S[0] == 0 by construction
    dS = np.diff(S)

    # rows t = k+2..T: dy_t on [dZ_t, S_{t-1}, dS_{t-1..t-k}]
    rows = slice(k, T - 1)
    lhs = dy[rows]
    cols = [dZ[rows], S[k : T - 1][:, None]]
    if k > 0:
        cols.append(np.column_stack([dS[k - j : T - 1 - j] for j in range(1, k + 1)]))
    X = np.column_stack(cols)
    fit = ols_fit(lhs, X)
    if fit.sigma2 <= 1e-14 * max(1.0, float(lhs @ lhs)):
        raise DegenerateRegression("zero residual variance in LM regression")
    return float(fit.t_stats[dZ.shape[1]])


def ls_test(
    y: TimeSeries,
    model: str = "C",
    n_breaks: int = 2,
    trim: float = 0.15,
    spec: AdfSpec | None = None,
) -> BreakTestReport:
    """Minimum-LM unit-root test with one or two endogenous breaks.

    Two-break candidate pairs must be separated by at least trim*T. The
    augmentation lag is selected once (no-break trend ADF rule) and reused
    across the grid.
    """
    if model not in ("A", "C"):
        raise ValueError(f"model must be A or C, got {model!r}")
    if n_breaks not in (1, 2):
        raise ValueError(f"n_breaks must be 1 or 2, got {n_breaks}")
    spec = spec or AdfSpec(deterministic="constant_trend")
    v = y.values
    T = v.size
    _check_trim(trim, T)
    k = _select_lag(v, spec, "constant_trend")
    if T - 1 - k < 15:
        raise SeriesTooShort(f"only {T - 1 - k} usable observations after {k} lags")

    cands = _break_candidates(T, trim)
    if n_breaks == 1:
        combos = [(tb,) for tb in cands]
    else:
        spacing = trim * T
        combos = [
            (tb1, tb2)
            for tb1 in cands
            for tb2 in cands
            if tb2 - tb1 >= spacing
        ]
    profile = []
    for tbs in combos:
        try:
            stat = ls_lm_statistic(v, tbs, model, k)
        except (RankDeficient, DegenerateRegression):
            continue
        years = tuple(y.year_of_index(tb) for tb in tbs)
        profile.append((years, stat))
    if not profile:
        raise DegenerateRegression("no admissible break combination produced a valid regression")
    return BreakTestReport.build(
        test="LS",
        model=model,
        chosen_lag=k,
        profile=profile,
        critical_values=LS_CRITICAL_VALUES[(model, n_breaks)],
        effective_T=T - 1 - k,
    )
