"""Seeded simulation engine: DGPs, critical-value derivation, size/power studies.

Reproducibility contract: every replication r of a run with seed base s
draws from numpy's default generator seeded with the pair [s, r]. Results
are therefore identical for any worker count or chunking, and reruns are
bit-identical.

Critical-value simulation for the break tests uses closed-form normal
equations assembled from prefix/suffix sums, so the full candidate grid is
evaluated per replication without per-candidate regressions. These fast
paths are cross-checked against the production implementations in the test
suite; less common (test, model) combinations fall back to the production
code path, which is slower but identical in definition.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset, TimeSeries
from .errors import InvalidSpec
from .unitroot import _break_candidates

LEVELS = (0.01, 0.05, 0.10)

_DGP_KINDS = (
    "random_walk",
    "ar1",
    "trend_break",
    "cointegrated_pair",
    "cointegrated_system",
    "ecm",
)


@dataclass(frozen=True)
class DgpSpec:
    """Parametric data-generating process with a fixed seed."""

    kind: str
    T: int
    innovation_sd: float = 1.0
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _DGP_KINDS:
            raise InvalidSpec(f"unknown DGP kind {self.kind!r}")
        if self.T < 10:
            raise InvalidSpec(f"T={self.T} must be >= 10")
        if self.innovation_sd < 0:
            raise InvalidSpec("innovation_sd must be nonnegative")


@dataclass(frozen=True)
class SimulationSummary:
    test_id: str
    model: str
    T: int
    reps: int
    quantiles: dict[float, float]
    quantile_stderr: dict[float, float]
    rejection_rate: float | None
    seed_base: int


def _rng(seed: int, rep: int | None = None) -> np.random.Generator:
    return np.random.default_rng([seed] if rep is None else [seed, rep])


def simulate_dgp(spec: DgpSpec, rep: int | None = None) -> Dataset:
    """Generate one dataset from the spec; deterministic given (seed, rep)."""
    rng = _rng(spec.seed, rep)
    T, sd, p = spec.T, spec.innovation_sd, spec.params

    def series(name, values):
        return TimeSeries(name=name, start_year=1, values=values)

    if spec.kind == "random_walk":
        y = np.cumsum(sd * rng.standard_normal(T))
        return Dataset({"y1": series("y1", y)})

    if spec.kind == "ar1":
        rho = float(p.get("rho", 0.5))
        e = sd * rng.standard_normal(T + 100)
        y = np.empty(T + 100)
        y[0] = e[0]
        for t in range(1, T + 100):
            y[t] = rho * y[t - 1] + e[t]
        return Dataset({"y1": series("y1", y[100:])})

    if spec.kind == "trend_break":
        tb = int(p.get("tb", T // 2))
        mag = float(p.get("magnitude", 5.0))
        rho = float(p.get("rho", 0.0))
        e = sd * rng.standard_normal(T)
        u = np.empty(T)
        u[0] = e[0]
        for t in range(1, T):
            u[t] = rho * u[t - 1] + e[t]
        shift = mag * (np.arange(1, T + 1) > tb)
        return Dataset({"y1": series("y1", shift + u)})

    if spec.kind == "cointegrated_pair":
        beta = float(p.get("beta", 2.0))
        alpha = float(p.get("alpha", 0.0))
        rho = float(p.get("noise_rho", 0.0))
        x = np.cumsum(sd * rng.standard_normal(T))
        e = sd * rng.standard_normal(T)
        u = np.empty(T)
        u[0] = e[0]
        for t in range(1, T):
            u[t] = rho * u[t - 1] + e[t]
        return Dataset({"y1": series("y1", x), "y2": series("y2", alpha + beta * x + u)})

    if spec.kind == "cointegrated_system":
        B = np.atleast_2d(np.asarray(p.get("B", [[2.0]]), dtype=float))
        ky, kx = B.shape
        x = np.cumsum(sd * rng.standard_normal((T, kx)), axis=0)
        u = sd * rng.standard_normal((T, ky))
        yv = x @ B.T + u
        cols = {}
        for j in range(kx):
            cols[f"x{j + 1}"] = series(f"x{j + 1}", x[:, j])
        for i in range(ky):
            cols[f"y{i + 1}"] = series(f"y{i + 1}", yv[:, i])
        return Dataset(cols)

    if spec.kind == "ecm":
        m = int(p.get("m", 2))
        rank = int(p.get("rank", 1))
        if not 0 <= rank <= m:
            raise InvalidSpec(f"rank {rank} outside [0, {m}]")
        n_trends = m - rank
        loadings = p.get("loadings")
        if loadings is None:
            lam = np.ones((m, max(n_trends, 1)))
            for i in range(m):
                for j in range(max(n_trends, 1)):
                    lam[i, j] = 1.0 + 0.5 * ((i + j) % 3)
        else:
            lam = np.atleast_2d(np.asarray(loadings, dtype=float))
        trends = np.cumsum(sd * rng.standard_normal((T, n_trends)), axis=0) if n_trends else np.zeros((T, 0))
        noise = sd * rng.standard_normal((T, m))
        yv = (trends @ lam[:, :n_trends].T if n_trends else 0.0) + noise
        return Dataset({f"y{i + 1}": series(f"y{i + 1}", yv[:, i]) for i in range(m)})

    raise InvalidSpec(f"unhandled DGP kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Fast null-distribution engines (driftless random-walk null, no augmentation)
# ---------------------------------------------------------------------------

def _df_constant_stats(T: int, seed: int, lo: int, hi: int) -> np.ndarray:
    """Dickey-Fuller t (constant case) for replications lo..hi-1."""
    out = np.empty(hi - lo)
    chunk = 512
    for start in range(lo, hi, chunk):
        idx = range(start, min(start + chunk, hi))
        E = np.stack([_rng(seed, r).standard_normal(T) for r in idx])
        Y = np.cumsum(E, axis=1)
        x = Y[:, :-1]
        d = np.diff(Y, axis=1)
        n = T - 1
        xc = x - x.mean(axis=1, keepdims=True)
        dc = d - d.mean(axis=1, keepdims=True)
        sxx = np.einsum("ij,ij->i", xc, xc)
        sxd = np.einsum("ij,ij->i", xc, dc)
        sdd = np.einsum("ij,ij->i", dc, dc)
        beta = sxd / sxx
        ssr = sdd - beta * sxd
        sigma2 = ssr / (n - 2)
        out[start - lo : start - lo + len(idx)] = beta / np.sqrt(sigma2 / sxx)
    return out


def _za_model_a_stats(T: int, seed: int, lo: int, hi: int, trim: float = 0.15) -> np.ndarray:
    """Minimum break-dummy Dickey-Fuller t over the model-A grid, per replication.

    Normal equations for [1, DU, t/T, y_{t-1}] are assembled for every
    candidate from suffix sums, then solved as one batched system.
    """
    cands = np.asarray(list(_break_candidates(T, trim)))
    n = T - 1
    tr = np.arange(2.0, T + 1.0) / T  # scaled trend keeps the system well conditioned
    out = np.empty(hi - lo)
    for r_i in range(lo, hi):
        y = np.cumsum(_rng(seed, r_i).standard_normal(T))
        yl = y[:-1]
        d = np.diff(y)
        # suffix sums over rows (row r corresponds to t = r + 2)
        suf1 = np.concatenate([np.arange(n, 0, -1.0), [0.0]])
        suft = np.concatenate([np.cumsum(tr[::-1])[::-1], [0.0]])
        sufy = np.concatenate([np.cumsum(yl[::-1])[::-1], [0.0]])
        sufd = np.concatenate([np.cumsum(d[::-1])[::-1], [0.0]])
        S1, St, Sy = float(n), tr.sum(), yl.sum()
        Stt, Sty, Syy = tr @ tr, tr @ yl, yl @ yl
        Sd, Std, Syd, Sdd = d.sum(), tr @ d, yl @ d, d @ d
        s0 = cands - 1  # first row with t > tb
        nb = cands.size
        G = np.empty((nb, 4, 4))
        G[:, 0, 0] = S1
        G[:, 0, 1] = G[:, 1, 0] = suf1[s0]
        G[:, 0, 2] = G[:, 2, 0] = St
        G[:, 0, 3] = G[:, 3, 0] = Sy
        G[:, 1, 1] = suf1[s0]
        G[:, 1, 2] = G[:, 2, 1] = suft[s0]
        G[:, 1, 3] = G[:, 3, 1] = sufy[s0]
        G[:, 2, 2] = Stt
        G[:, 2, 3] = G[:, 3, 2] = Sty
        G[:, 3, 3] = Syy
        b = np.empty((nb, 4))
        b[:, 0] = Sd
        b[:, 1] = sufd[s0]
        b[:, 2] = Std
        b[:, 3] = Syd
        beta = np.linalg.solve(G, b)
        ssr = Sdd - np.einsum("ij,ij->i", beta, b)
        sigma2 = ssr / (n - 4)
        inv33 = np.linalg.inv(G)[:, 3, 3]
        tstats = beta[:, 3] / np.sqrt(sigma2 * inv33)
        out[r_i - lo] = tstats.min()
    return out


def _ls2_model_a_stats(T: int, seed: int, lo: int, hi: int, trim: float = 0.15) -> np.ndarray:
    """Minimum two-break LM t-statistic (crash model) per replication.

    Impulse dummies in the LM regression absorb their own rows exactly, so
    the statistic reduces to a bivariate regression of the differenced
    series on the lagged LM-detrended level over the remaining rows; every
    sum is expressed through prefix/suffix sums, giving O(1) work per
    break pair.
    """
    cands = np.asarray(list(_break_candidates(T, trim)))
    spacing = trim * T
    i1_l, i2_l = [], []
    for a in cands:
        for b_ in cands:
            if b_ - a >= spacing:
                i1_l.append(a + 1)
                i2_l.append(b_ + 1)
    i1 = np.asarray(i1_l)
    i2 = np.asarray(i2_l)
    n = T - 1
    m = n - 2
    t_rows = np.arange(2, T + 1)  # row label t
    b_t = t_rows - 2.0
    out = np.empty(hi - lo)
    for r_i in range(lo, hi):
        y = np.cumsum(_rng(seed, r_i).standard_normal(T))
        dy = np.diff(y)  # dy[t-2] = y_t - y_{t-1}
        a_t = y[:-1] - y[0]  # a[t-2] = y_{t-1} - y_1

        def suffix(v):
            return np.concatenate([np.cumsum(v[::-1])[::-1], [0.0]])

        sufA, sufB, sufD = suffix(a_t), suffix(b_t), suffix(dy)

        def suf_at(arr, tau):
            # sum over rows with t >= tau; row index = tau - 2 (clipped)
            return arr[np.clip(tau - 2, 0, n)]

        A1, A2 = a_t.sum(), a_t @ a_t
        B1, B2 = b_t.sum(), b_t @ b_t
        AB, AD, BD = a_t @ b_t, a_t @ dy, b_t @ dy
        D1, D2 = dy.sum(), dy @ dy

        dy1, dy2 = dy[i1 - 2], dy[i2 - 2]
        d0 = (D1 - dy1 - dy2) / (n - 2)
        d1 = dy1 - d0
        d2 = dy2 - d0
        cnt1 = (T - i1).astype(float)
        cnt2 = (T - i2).astype(float)
        sA1, sA2 = suf_at(sufA, i1 + 1), suf_at(sufA, i2 + 1)
        sB1, sB2 = suf_at(sufB, i1 + 1), suf_at(sufB, i2 + 1)
        sD1, sD2 = suf_at(sufD, i1 + 1), suf_at(sufD, i2 + 1)

        s_full = A1 - d0 * B1 - d1 * cnt1 - d2 * cnt2
        s2_full = (
            A2
            + d0 * d0 * B2
            + d1 * d1 * cnt1
            + d2 * d2 * cnt2
            - 2.0 * d0 * AB
            - 2.0 * d1 * sA1
            - 2.0 * d2 * sA2
            + 2.0 * d0 * d1 * sB1
            + 2.0 * d0 * d2 * sB2
            + 2.0 * d1 * d2 * cnt2
        )
        sd_full = AD - d0 * BD - d1 * sD1 - d2 * sD2

        a_i1, a_i2 = a_t[i1 - 2], a_t[i2 - 2]
        b_i1, b_i2 = b_t[i1 - 2], b_t[i2 - 2]
        s_at_i1 = a_i1 - d0 * b_i1
        s_at_i2 = a_i2 - d0 * b_i2 - d1

        Ss = s_full - s_at_i1 - s_at_i2
        Sss = s2_full - s_at_i1**2 - s_at_i2**2
        Ssd = sd_full - s_at_i1 * dy1 - s_at_i2 * dy2
        Sd_r = D1 - dy1 - dy2
        Sdd_r = D2 - dy1**2 - dy2**2

        sxx = Sss - Ss * Ss / m
        sxy = Ssd - Ss * Sd_r / m
        syy = Sdd_r - Sd_r * Sd_r / m
        phi = sxy / sxx
        ssr = syy - sxy * sxy / sxx
        sigma2 = ssr / (n - 4)
        tstats = phi / np.sqrt(sigma2 / sxx)
        out[r_i - lo] = tstats.min()
    return out


def _johansen_trace_stats(T: int, k: int, seed: int, lo: int, hi: int) -> np.ndarray:
    """trace(0) under k independent driftless random walks, VAR lag 1."""
    from .linalg import generalized_eigen

    out = np.empty(hi - lo)
    for r_i in range(lo, hi):
        E = _rng(seed, r_i).standard_normal((T, k))
        Y = np.cumsum(E, axis=0)
        dY = np.diff(Y, axis=0)
        R0 = dY - dY.mean(axis=0)
        Ylag = Y[:-1]
        R1 = Ylag - Ylag.mean(axis=0)
        n = T - 1
        S00 = R0.T @ R0 / n
        S11 = R1.T @ R1 / n
        S01 = R0.T @ R1 / n
        A = S01.T @ np.linalg.inv(S00) @ S01
        eig = np.clip(generalized_eigen(A, S11), 0.0, 1.0 - 1e-12)
        out[r_i - lo] = -n * np.log1p(-eig).sum()
    return out


def _slow_unitroot_stats(test_id: str, model: str, T: int, seed: int, lo: int, hi: int) -> np.ndarray:
    """Production-path fallback for combinations without a fast engine."""
    from .unitroot import AdfSpec, ls_test, za_test

    spec = AdfSpec(deterministic="constant_trend", lag_rule=0)
    out = np.empty(hi - lo)
    for r_i in range(lo, hi):
        y = TimeSeries("y1", 1, np.cumsum(_rng(seed, r_i).standard_normal(T)))
        if test_id == "za":
            rep = za_test(y, model=model, spec=spec)
        elif test_id == "ls1":
            rep = ls_test(y, model=model, n_breaks=1, spec=spec)
        elif test_id == "ls2":
            rep = ls_test(y, model=model, n_breaks=2, spec=spec)
        else:
            raise InvalidSpec(f"unknown test_id {test_id!r}")
        out[r_i - lo] = rep.statistic
    return out


def _cv_chunk(args) -> np.ndarray:
    test_id, model, T, seed, lo, hi = args
    if test_id == "df":
        return _df_constant_stats(T, seed, lo, hi)
    if test_id == "za" and model == "A":
        return _za_model_a_stats(T, seed, lo, hi)
    if test_id == "ls2" and model == "A":
        return _ls2_model_a_stats(T, seed, lo, hi)
    if test_id == "johansen_trace":
        return _johansen_trace_stats(T, int(model), seed, lo, hi)
    return _slow_unitroot_stats(test_id, model, T, seed, lo, hi)


def _run_chunks(args_builder, reps: int, workers: int) -> np.ndarray:
    if workers <= 1:
        return _cv_chunk(args_builder(0, reps))
    bounds = np.linspace(0, reps, workers + 1).astype(int)
    tasks = [args_builder(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_cv_chunk, tasks))
    return np.concatenate(parts)


def _batched_quantile_stderr(stats: np.ndarray, q: float, n_batches: int = 10) -> float:
    batches = np.array_split(stats, n_batches)
    qs = [np.quantile(b, q) for b in batches if b.size]
    return float(np.std(qs, ddof=1) / math.sqrt(len(qs)))


def simulate_critical_values(
    test_id: str,
    model: str,
    T: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> SimulationSummary:
    """Empirical critical values of a test statistic under its null DGP.

    Unit-root nulls are driftless random walks; the system-test null is a
    set of independent random walks (pass the variable count as `model`).
    Left-tail tests report lower quantiles; the trace statistic reports
    upper quantiles, so quantiles[l] is always "the critical value at
    significance level l".
    """
    if reps < 1000:
        raise InvalidSpec(f"reps={reps} must be >= 1000 for critical values")
    if T < 20:
        raise InvalidSpec(f"T={T} too small")
    stats = _run_chunks(lambda lo, hi: (test_id, model, T, seed, lo, hi), reps, workers)
    upper_tail = test_id == "johansen_trace"
    quantiles, stderr = {}, {}
    for lvl in LEVELS:
        q = 1.0 - lvl if upper_tail else lvl
        quantiles[lvl] = float(np.quantile(stats, q))
        stderr[lvl] = _batched_quantile_stderr(stats, q)
    return SimulationSummary(
        test_id=test_id,
        model=str(model),
        T=T,
        reps=reps,
        quantiles=quantiles,
        quantile_stderr=stderr,
        rejection_rate=None,
        seed_base=seed,
    )


def _rejects_at_5pct(test_id: str, data: Dataset, params: dict) -> bool:
    from .unitroot import AdfSpec, adf_test, za_test

    if test_id == "adf":
        y = data[data.names[0]]
        rep = adf_test(y, AdfSpec(deterministic=params.get("deterministic", "constant")))
        return rep.reject_at[0.05]
    if test_id == "za":
        y = data[data.names[0]]
        rep = za_test(y, model=params.get("model", "A"))
        return rep.reject_at[0.05]
    if test_id == "johansen_rank":
        from .cointegration import johansen_test

        res = johansen_test(data, lag_order=params.get("lag_order", 1))
        return res.selected_rank[0.05] == params["target_rank"]
    if test_id == "bounds":
        from .ardl import ardl_fit, bounds_test

        names = data.names
        y = data[names[-1]]
        X = data.select(names[:-1])
        fit = ardl_fit(y, X, p=params.get("p", 1), q=tuple(params.get("q", [1] * len(names[:-1]))))
        return bounds_test(fit).verdict == "cointegrated"
    raise InvalidSpec(f"unknown size/power test_id {test_id!r}")


def _size_power_chunk(args) -> np.ndarray:
    test_id, spec, lo, hi = args
    out = np.empty(hi - lo, dtype=bool)
    for r_i in range(lo, hi):
        data = simulate_dgp(spec, rep=r_i)
        out[r_i - lo] = _rejects_at_5pct(test_id, data, dict(spec.params))
    return out


def size_power_experiment(
    test_id: str,
    null_spec: DgpSpec,
    alt_spec: DgpSpec,
    reps: int,
    seed: int,
    workers: int = 1,
) -> tuple[SimulationSummary, SimulationSummary]:
    """5% rejection rates under a null spec and an alternative spec."""
    if reps < 200:
        raise InvalidSpec(f"reps={reps} must be >= 200")

    def run(spec: DgpSpec) -> SimulationSummary:
        spec = replace(spec, seed=seed if spec.seed == 0 else spec.seed)
        if workers <= 1:
            flags = _size_power_chunk((test_id, spec, 0, reps))
        else:
            bounds = np.linspace(0, reps, workers + 1).astype(int)
            tasks = [
                (test_id, spec, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if a < b
            ]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                flags = np.concatenate(list(pool.map(_size_power_chunk, tasks)))
        return SimulationSummary(
            test_id=test_id,
            model=spec.kind,
            T=spec.T,
            reps=reps,
            quantiles={},
            quantile_stderr={},
            rejection_rate=float(np.mean(flags)),
            seed_base=spec.seed,
        )

    return run(null_spec), run(alt_spec)


def summary_csv_rows(summaries: list[SimulationSummary]) -> list[list[str]]:
    """Flat rows: test_id, model, T, reps, level, quantile, mc_stderr."""
    rows = [["test_id", "model", "T", "reps", "level", "quantile", "mc_stderr"]]
    for s in summaries:
        if s.quantiles:
            for lvl in sorted(s.quantiles):
                rows.append(
                    [
                        s.test_id,
                        s.model,
                        str(s.T),
                        str(s.reps),
                        f"{lvl:g}",
                        f"{s.quantiles[lvl]:.12g}",
                        f"{s.quantile_stderr[lvl]:.12g}",
                    ]
                )
        else:
            rows.append(
                [s.test_id, s.model, str(s.T), str(s.reps), "0.05",
                 "" if s.rejection_rate is None else f"{s.rejection_rate:.12g}", ""]
            )
    return rows
