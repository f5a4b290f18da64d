"""Model evaluation functions: propriety check, shrinkage factors,
mixture posterior weights and the marginal likelihood.

Everything here is deterministic and vectorized over areas; sampling
lives in `gibbs`.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError
from .types import MixtureParams, PriorCheck, PriorConfig

_LOG_2PI = float(np.log(2.0 * np.pi))


def validate_prior(cfg: PriorConfig, m: int, r: int) -> PriorCheck:
    """Check that the mixture prior yields a proper posterior.

    The posterior is proper if and only if all four hold:

    * alpha1 < 1
    * alpha2 > 1
    * 2 - alpha1 - alpha2 > 0
    * m > r + 2 * (2 - alpha1 - alpha2)

    Returns a `PriorCheck` whose `violations` lists the failed
    conditions verbatim.
    """
    if m <= 0 or r <= 0:
        raise DataError("m and r must be positive")
    violations = []
    if not (cfg.alpha1 < 1.0):
        violations.append("alpha1 < 1")
    if not (cfg.alpha2 > 1.0):
        violations.append("alpha2 > 1")
    if not (2.0 - cfg.alpha1 - cfg.alpha2 > 0.0):
        violations.append("2 - alpha1 - alpha2 > 0")
    if not (m > r + 2.0 * (2.0 - cfg.alpha1 - cfg.alpha2)):
        violations.append("m > r + 2*(2 - alpha1 - alpha2)")
    return PriorCheck(ok=not violations, violations=tuple(violations))


def fh_shrinkage(d_var, a_var):
    """Shrinkage factor B_i = d_i / (d_i + a) toward the regression fit.

    Accepts scalars or arrays.  a == 0 gives B = 1, so the predictor
    y - B (y - x'beta) collapses to the regression fit.
    """
    d = np.asarray(d_var, dtype=np.float64)
    a = np.asarray(a_var, dtype=np.float64)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise DataError("d_var must be finite and > 0")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise DataError("a_var must be finite and >= 0")
    out = d / (d + a)
    return float(out) if out.ndim == 0 else out


def _norm_logpdf(y, mean, var):
    y = np.asarray(y, dtype=np.float64)
    return -0.5 * (_LOG_2PI + np.log(var) + (y - mean) ** 2 / var)


def _check_mix_inputs(d_var, params: MixtureParams):
    d = np.asarray(d_var, dtype=np.float64)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise DataError("d_var must be finite and > 0")
    if params.a1 > params.a2:
        raise DataError("need a1 <= a2")
    return d


def mixture_weight(y, xb, d_var, params: MixtureParams):
    """Posterior probability that an area belongs to the narrow component.

    Given marginal y_i ~ (1-p) N(x_i'beta, a1 + d_i) + p N(x_i'beta, a2 + d_i),
    returns

        w_i = (1-p) n(y_i; xb_i, a1+d_i)
              / [ (1-p) n(y_i; xb_i, a1+d_i) + p n(y_i; xb_i, a2+d_i) ]

    computed in log space so that extreme residuals neither overflow nor
    produce 0/0.  With a1 == a2 the densities cancel and w = 1 - p for
    every area.
    """
    d = _check_mix_inputs(d_var, params)
    y = np.asarray(y, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_narrow = np.log1p(-params.p) + _norm_logpdf(y, xb, params.a1 + d)
        log_wide = np.log(params.p) + _norm_logpdf(y, xb, params.a2 + d)
    out = np.exp(log_narrow - np.logaddexp(log_narrow, log_wide))
    return float(out) if out.ndim == 0 else out


def mixture_conditional_mean(y, xb, d_var, params: MixtureParams):
    """Posterior mean of theta_i under the mixture, beta and variances fixed.

    theta_hat_i = y_i - [w_i d_i/(d_i+a1) + (1-w_i) d_i/(d_i+a2)] (y_i - xb_i),

    an average of the two component shrinkages weighted by
    `mixture_weight`.  Large residuals drive w_i toward 0, so the
    effective shrinkage falls toward d/(d+a2) and outlying areas keep
    more of their direct estimate.
    """
    d = _check_mix_inputs(d_var, params)
    y = np.asarray(y, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    w = mixture_weight(y, xb, d, params)
    b = w * fh_shrinkage(d, params.a1) + (1.0 - w) * fh_shrinkage(d, params.a2)
    out = y - b * (y - xb)
    return float(out) if out.ndim == 0 else out


def marginal_loglik(params: MixtureParams, y, X, d_var) -> float:
    """Log marginal likelihood of the mixture model, theta integrated out.

    sum_i log[(1-p) n(y_i; x_i'beta, a1+d_i) + p n(y_i; x_i'beta, a2+d_i)],
    accumulated with log-sum-exp.  p = 0 or 1 degenerates cleanly to the
    single-component (classical) likelihood.
    """
    d = _check_mix_inputs(d_var, params)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xb = X @ params.beta
    with np.errstate(divide="ignore"):
        log_narrow = np.log1p(-params.p) + _norm_logpdf(y, xb, params.a1 + d)
        log_wide = np.log(params.p) + _norm_logpdf(y, xb, params.a2 + d)
    return float(np.sum(np.logaddexp(log_narrow, log_wide)))
