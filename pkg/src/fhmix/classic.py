"""Classical Fay-Herriot fitting: moment and REML estimators of the
random-effect variance, GLS regression coefficients, and empirical
Bayes predictions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .core import fh_shrinkage
from .errors import EstimationError
from .types import Dataset, FHParams


def ols_fit(data: Dataset) -> np.ndarray:
    """Ordinary least squares coefficients (ignores the variance structure)."""
    beta, *_ = np.linalg.lstsq(data.X, data.y, rcond=None)
    return beta


def prasad_rao_a(data: Dataset) -> float:
    """Method-of-moments estimate of the random-effect variance.

        a_hat = max(0, [sum(e_i^2) - sum(d_i (1 - h_ii))] / (m - r))

    where e are OLS residuals and h_ii the hat-matrix diagonal.  The
    truncation at zero makes the estimator well defined when the
    residual scatter is below the sampling noise.
    """
    X, y, d = data.X, data.y, data.d_var
    m, r = data.m, data.r
    beta = ols_fit(data)
    e = y - X @ beta
    xtx = X.T @ X
    h = np.einsum("ij,ji->i", X, np.linalg.solve(xtx, X.T))
    a_hat = (e @ e - float(np.sum(d * (1.0 - h)))) / (m - r)
    return max(0.0, float(a_hat))


def gls_beta(data: Dataset, a_var: float) -> np.ndarray:
    """Generalized least squares coefficients at random-effect variance a."""
    w = 1.0 / (a_var + data.d_var)
    xw = data.X * w[:, None]
    return np.linalg.solve(xw.T @ data.X, xw.T @ data.y)


def _restricted_loglik(data: Dataset, a_var: float) -> float:
    v = a_var + data.d_var
    w = 1.0 / v
    xw = data.X * w[:, None]
    xtwx = xw.T @ data.X
    beta = np.linalg.solve(xtwx, xw.T @ data.y)
    resid = data.y - data.X @ beta
    sign, logdet = np.linalg.slogdet(xtwx)
    if sign <= 0:
        raise EstimationError("weighted normal equations are singular")
    return -0.5 * (float(np.sum(np.log(v))) + logdet + float(np.sum(w * resid**2)))


def reml_a(data: Dataset) -> tuple[float, np.ndarray]:
    """Restricted maximum likelihood variance estimate with its GLS beta.

    The restricted log likelihood is maximized over a in
    [0, 1e4 * var(y)] by bounded scalar minimization with absolute
    tolerance 1e-10 * var(y); the a = 0 boundary is checked explicitly
    because the interior search cannot land exactly on it.
    """
    vy = float(np.var(data.y))
    hi = 1e4 * vy if vy > 0 else 1.0
    res = minimize_scalar(
        lambda a: -_restricted_loglik(data, a),
        bounds=(0.0, hi),
        method="bounded",
        options={"xatol": 1e-10 * max(vy, 1e-300), "maxiter": 500},
    )
    if not res.success:
        raise EstimationError(f"REML search did not converge: {res.message}")
    a_hat = float(res.x)
    if _restricted_loglik(data, 0.0) >= _restricted_loglik(data, a_hat):
        a_hat = 0.0
    return a_hat, gls_beta(data, a_hat)


def eb_predict(data: Dataset, params: FHParams) -> tuple[np.ndarray, np.ndarray]:
    """Empirical Bayes predictions and their shrinkage factors.

    theta_hat_i = y_i - B_i (y_i - x_i' beta) with B_i = d_i/(d_i + a).
    Returns (theta_hat, B).
    """
    b = fh_shrinkage(data.d_var, params.a_var)
    xb = data.X @ params.beta
    return data.y - b * (data.y - xb), b


@dataclass(frozen=True, eq=False)
class FHFit:
    """A fitted classical model: parameters, the estimator used, and
    per-area predictions with shrinkage factors."""

    params: FHParams
    method: str
    theta: np.ndarray
    shrinkage: np.ndarray


def fit_fh(data: Dataset, method: str = "reml") -> FHFit:
    """Fit the classical model by 'reml' or 'pr' (moment estimator).

    Both report the GLS beta evaluated at the estimated variance.
    """
    if method == "reml":
        a_hat, beta = reml_a(data)
    elif method == "pr":
        a_hat = prasad_rao_a(data)
        beta = gls_beta(data, a_hat)
    else:
        raise EstimationError(f"unknown method {method!r} (expected 'reml' or 'pr')")
    params = FHParams(beta=beta, a_var=a_hat)
    theta, b = eb_predict(data, params)
    return FHFit(params=params, method=method, theta=theta, shrinkage=b)
