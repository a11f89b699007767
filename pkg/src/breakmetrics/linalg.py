"""Regression and long-run covariance kernel.

Everything downstream (unit-root tests, cointegration tests, the long-run
estimators) is built on four primitives: QR-based OLS, a Bartlett-kernel
long-run covariance, a symmetric-definite generalized eigensolver, and
information criteria. All functions are pure and operate on plain numpy
arrays (row-major, float64).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BandwidthTooLarge,
    DimensionMismatch,
    NotPositiveDefinite,
    RankDeficient,
)

# Reciprocal-condition threshold below which a design is treated as singular.
RCOND_MIN = 1e-12


def as_matrix(x) -> np.ndarray:
    """Coerce to a 2-D float64 design matrix and validate entries."""
    m = np.asarray(x, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"expected a T x k matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix entries must be finite")
    return m


def as_vector(y) -> np.ndarray:
    v = np.asarray(y, dtype=float)
    if v.ndim == 2 and 1 in v.shape:
        v = v.ravel()
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DimensionMismatch("vector entries must be finite")
    return v


@dataclass(frozen=True)
class OlsFit:
    """Least-squares artifact: coefficients plus everything needed downstream.

    sigma2 uses the T - k divisor; coef_covariance = sigma2 * (X'X)^{-1}.
    """

    coefficients: np.ndarray
    residuals: np.ndarray
    coef_covariance: np.ndarray
    ssr: float
    sigma2: float
    fitted: np.ndarray
    T: int
    k: int

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.coef_covariance))

    @property
    def t_stats(self) -> np.ndarray:
        return self.coefficients / self.std_errors


def ols_fit(y, X) -> OlsFit:
    """OLS of y on X through a QR decomposition.

    Raises RankDeficient when the triangular factor signals a reciprocal
    condition below RCOND_MIN, and DimensionMismatch on shape errors.
    """
    X = as_matrix(X)
    y = as_vector(y)
    T, k = X.shape
    if y.shape[0] != T:
        raise DimensionMismatch(f"y has length {y.shape[0]}, X has {T} rows")
    if T <= k:
        raise DimensionMismatch(f"need T > k, got T={T}, k={k}")

    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.min() == 0.0 or diag.min() / diag.max() < RCOND_MIN:
        raise RankDeficient(
            f"design matrix numerically singular (rcond ~ {diag.min() / max(diag.max(), 1e-300):.2e})"
        )
    beta = scipy.linalg.solve_triangular(R, Q.T @ y)
    fitted = X @ beta
    resid = y - fitted
    ssr = float(resid @ resid)
    sigma2 = ssr / (T - k)
    rinv = scipy.linalg.solve_triangular(R, np.eye(k))
    xtx_inv = rinv @ rinv.T
    return OlsFit(
        coefficients=beta,
        residuals=resid,
        coef_covariance=sigma2 * xtx_inv,
        ssr=ssr,
        sigma2=sigma2,
        fitted=fitted,
        T=T,
        k=k,
    )


def newey_west_bandwidth(T: int) -> int:
    """Fixed Newey-West rule floor(4 * (T/100)^(2/9)); package-wide default."""
    return int(math.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))


@dataclass(frozen=True)
class LongRunCovariance:
    """Two-sided (omega) and one-sided (lambda) long-run covariance matrices."""

    omega: np.ndarray
    lambda_one_sided: np.ndarray
    bandwidth: int
    kernel: str = "bartlett"


def long_run_covariance(U, kernel: str = "bartlett", bandwidth: int | None = None) -> LongRunCovariance:
    """Kernel-weighted long-run covariance of a T x m residual matrix.

    Autocovariances Gamma_j = (1/T) sum_t u_t u_{t-j}' use the divisor T so
    the Bartlett-weighted sum stays positive semi-definite.

        omega  = Gamma_0 + sum_{j=1..bw} w_j (Gamma_j + Gamma_j')
        lambda = sum_{j=0..bw} w_j Gamma_j,   w_j = 1 - j/(bw+1)
    """
    if kernel != "bartlett":
        raise NotImplementedError(f"kernel {kernel!r} not supported (bartlett only)")
    U = as_matrix(U)
    T, m = U.shape
    if T < 2:
        raise DimensionMismatch("need at least two rows of residuals")
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(T)
    if bandwidth >= T:
        raise BandwidthTooLarge(f"bandwidth {bandwidth} must be < T={T}")
    gamma0 = U.T @ U / T
    omega = gamma0.copy()
    lam = gamma0.copy()
    for j in range(1, bandwidth + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        gamma_j = U[j:].T @ U[:-j] / T
        omega += w * (gamma_j + gamma_j.T)
        lam += w * gamma_j
    omega = 0.5 * (omega + omega.T)
    return LongRunCovariance(omega=omega, lambda_one_sided=lam, bandwidth=int(bandwidth), kernel=kernel)


def generalized_eigen(A, B) -> np.ndarray:
    """Eigenvalues of det(A - lambda B) = 0, descending, for symmetric A and PD B.

    B is reduced by Cholesky (B = LL') and the standard symmetric problem is
    solved for L^{-1} A L^{-T}, which keeps every eigenvalue real.
    """
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"pencil shapes {A.shape} and {B.shape} must be square and equal")
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("B is not positive definite") from exc
    Linv = scipy.linalg.solve_triangular(L, np.eye(L.shape[0]), lower=True)
    C = Linv @ A @ Linv.T
    vals = np.linalg.eigvalsh(0.5 * (C + C.T))
    return vals[::-1]


@dataclass(frozen=True)
class InformationCriteria:
    aic: float
    bic: float
    hq: float
    degenerate: bool = False


def information_criteria(ssr: float, T: int, k: int) -> InformationCriteria:
    """AIC/BIC/Hannan-Quinn on the log average squared residual scale.

    A zero SSR cannot be log-transformed; it is reported as -inf with the
    degenerate flag set rather than raised, so model searches can still
    rank an exact fit first.
    """
    if T <= k:
        raise DimensionMismatch(f"need T > k, got T={T}, k={k}")
    if ssr < 0:
        raise DimensionMismatch("ssr must be nonnegative")
    if ssr == 0.0:
        return InformationCriteria(-math.inf, -math.inf, -math.inf, degenerate=True)
    base = T * math.log(ssr / T)
    return InformationCriteria(
        aic=base + 2.0 * k,
        bic=base + k * math.log(T),
        hq=base + 2.0 * k * math.log(math.log(T)),
        degenerate=False,
    )
