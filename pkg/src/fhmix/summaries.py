"""Posterior summaries: parameter tables, per-area estimates, outlier
probabilities, shrinkage weights, and convergence diagnostics.

Multi-chain outputs are pooled (chains stacked) for summaries;
diagnostics operate per chain before pooling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import fh_shrinkage, mixture_weight
from .errors import SamplerError
from .gibbs import ChainOutput
from .types import Dataset, MixtureParams


@dataclass(frozen=True)
class ParamSummary:
    name: str
    mean: float
    sd: float
    q2_5: float
    median: float
    q97_5: float


@dataclass(frozen=True, eq=False)
class AreaSummary:
    area_id: str
    theta_mean: float
    theta_sd: float
    outlier_prob: float | None
    shrinkage: float


@dataclass(frozen=True)
class ParamDiagnostic:
    name: str
    ess: float
    rhat: float
    flagged: bool


def _summary(name: str, draws: np.ndarray) -> ParamSummary:
    q = np.quantile(draws, [0.025, 0.5, 0.975])
    return ParamSummary(name=name, mean=float(np.mean(draws)),
                        sd=float(np.std(draws, ddof=1)),
                        q2_5=float(q[0]), median=float(q[1]), q97_5=float(q[2]))


def _scalar_param_draws(out: ChainOutput) -> list[tuple[str, np.ndarray]]:
    """(name, (chains, retained) draws) pairs in reporting order:
    beta components, then the variance parameter(s), then p."""
    pairs = [(f"beta{j + 1}", out.beta[:, :, j]) for j in range(out.r)]
    if out.kind == "mixture":
        pairs += [("a1", out.a1), ("a2", out.a2), ("p", out.p)]
    else:
        pairs += [("a", out.a)]
    return pairs


def summarize_params(out: ChainOutput) -> list[ParamSummary]:
    """Posterior mean, sd (ddof=1) and 2.5/50/97.5% quantiles (linear
    interpolation between order statistics) for each scalar parameter."""
    if out.chains * out.retained < 100:
        raise SamplerError("need at least 100 retained draws to summarize")
    return [_summary(name, draws.reshape(-1)) for name, draws in _scalar_param_draws(out)]


def outlier_probs(out: ChainOutput) -> np.ndarray:
    """Per-area posterior outlier probability: the mean of delta draws."""
    if out.delta is None:
        raise SamplerError("outlier probabilities need a mixture chain (no delta draws)")
    return out.pooled("delta").mean(axis=0)


def shrinkage_summary(out: ChainOutput, data: Dataset) -> np.ndarray:
    """Per-area posterior mean shrinkage weight.

    Mixture chains average, over retained draws,

        w_i b1_i + (1 - w_i) b2_i,   b_k = d_i/(d_i + a_k),

    with w_i the narrow-component weight of `mixture_weight` at that
    draw's parameters; flat-prior chains average d_i/(d_i + a).  The
    posterior mean of the weight (not the weight at posterior means) is
    reported.
    """
    if out.kind == "mixture":
        beta = out.pooled("beta")
        a1 = out.pooled("a1")
        a2 = out.pooled("a2")
        p = out.pooled("p")
        acc = np.zeros(data.m)
        for t in range(beta.shape[0]):
            params = MixtureParams(beta=beta[t], a1=float(a1[t]),
                                   a2=float(a2[t]), p=float(p[t]))
            xb = data.X @ params.beta
            w = mixture_weight(data.y, xb, data.d_var, params)
            acc += w * fh_shrinkage(data.d_var, params.a1) \
                + (1.0 - w) * fh_shrinkage(data.d_var, params.a2)
        return acc / beta.shape[0]
    a = out.pooled("a")
    return fh_shrinkage(data.d_var[None, :], a[:, None]).mean(axis=0)


def summarize_areas(out: ChainOutput, data: Dataset) -> list[AreaSummary]:
    """Per-area posterior mean/sd of theta, outlier probability (mixture
    chains only) and posterior-mean shrinkage weight."""
    th = out.pooled("theta")
    means = th.mean(axis=0)
    sds = th.std(axis=0, ddof=1)
    probs = outlier_probs(out) if out.kind == "mixture" else None
    shr = shrinkage_summary(out, data)
    return [AreaSummary(area_id=out.area_ids[i], theta_mean=float(means[i]),
                        theta_sd=float(sds[i]),
                        outlier_prob=None if probs is None else float(probs[i]),
                        shrinkage=float(shr[i]))
            for i in range(out.m)]


def ess(x: np.ndarray) -> float:
    """Effective sample size by the initial-positive-sequence rule.

    Sums lag-pair autocorrelations Gamma_k = rho_{2k} + rho_{2k+1},
    truncating at the first negative pair, into tau = 2 sum(Gamma) - 1;
    ESS = n / tau.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < 4:
        raise SamplerError("need at least 4 draws for an ESS estimate")
    xc = x - x.mean()
    var0 = float(xc @ xc) / n
    if var0 == 0.0:
        return float(n)
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n].real / n
    rho = acov / acov[0]
    tau = 0.0
    for k in range(0, n - 1, 2):
        gamma = rho[k] + rho[k + 1]
        if gamma < 0.0:
            break
        tau += gamma
    tau = max(2.0 * tau - 1.0, 1e-12)
    return float(n / tau)


def gelman_rubin(draws: np.ndarray) -> float:
    """Potential scale reduction sqrt(((n-1)/n W + B/n) / W) for a
    (chains, n) draw matrix; returns nan for a single chain."""
    c, n = draws.shape
    if c < 2:
        return float("nan")
    means = draws.mean(axis=1)
    w = float(np.mean(draws.var(axis=1, ddof=1)))
    b = n * float(np.var(means, ddof=1))
    if w == 0.0:
        return 1.0
    return float(np.sqrt(((n - 1) / n * w + b / n) / w))


def diagnostics(out: ChainOutput) -> list[ParamDiagnostic]:
    """Per-parameter ESS (summed over chains) and potential scale
    reduction; parameters with scale reduction > 1.1 are flagged."""
    if out.chains * out.retained < 100:
        raise SamplerError("need at least 100 retained draws for diagnostics")
    result = []
    for name, draws in _scalar_param_draws(out):
        total_ess = float(sum(ess(draws[c]) for c in range(out.chains)))
        rhat = gelman_rubin(draws)
        flagged = bool(rhat > 1.1) if np.isfinite(rhat) else False
        result.append(ParamDiagnostic(name=name, ess=total_ess, rhat=rhat, flagged=flagged))
    return result
