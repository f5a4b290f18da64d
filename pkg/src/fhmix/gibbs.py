"""Gibbs samplers: the six mixture full conditionals and a flat-prior
sampler for the baseline hierarchical Bayes fit.

Sweep order is fixed (theta -> beta -> p -> a1 -> a2 -> delta; systematic
scan) and every random number is drawn from one numpy Generator per
chain, seeded as SeedSequence((seed, chain_index)).  Array arithmetic is
delegated to a kernel backend (`backends`); everything stochastic or
scalar lives here, shared by both backends, so a chain's output is a
bit-reproducible function of (data, prior, config) regardless of which
backend executes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import xlogy

from .backends import get_kernels
from .classic import eb_predict, ols_fit, prasad_rao_a
from .core import validate_prior
from .errors import ConfigError, PriorProprietyError, SamplerError
from .truncdist import sample_truncated_invgamma
from .types import Dataset, FHParams, PriorConfig


@dataclass(frozen=True)
class ChainConfig:
    """Chain length bookkeeping; `seed` makes runs reproducible."""

    iterations: int = 6000
    burn_in: int = 1000
    thin: int = 1
    seed: int = 0
    chains: int = 2

    def __post_init__(self):
        if self.burn_in < 0 or self.burn_in >= self.iterations:
            raise ConfigError("need 0 <= burn_in < iterations")
        if self.thin < 1:
            raise ConfigError("thin must be >= 1")
        if self.chains < 1:
            raise ConfigError("chains must be >= 1")
        if self.retained < 100:
            raise ConfigError(
                f"(iterations - burn_in)//thin = {self.retained} retained draws; need >= 100")

    @property
    def retained(self) -> int:
        """Retained draws per chain: every thin-th post-burn-in iterate."""
        return (self.iterations - self.burn_in) // self.thin


# Desk-scale profile for simulation studies: single short chain.
STUDY_PROFILE = dict(iterations=2000, burn_in=500, thin=1, chains=1)


@dataclass
class MixtureState:
    """Mutable Gibbs state.  `xb` caches X @ beta and is kept in sync by
    cond_beta; the flat-prior chain reuses this container with
    a1 == a2 == a and delta all zero."""

    theta: np.ndarray
    beta: np.ndarray
    a1: float
    a2: float
    p: float
    delta: np.ndarray
    xb: np.ndarray

    def copy(self) -> "MixtureState":
        return MixtureState(self.theta.copy(), self.beta.copy(), self.a1,
                            self.a2, self.p, self.delta.copy(), self.xb.copy())


@dataclass(frozen=True, eq=False)
class ChainOutput:
    """Retained draws, shaped (chains, retained, ...).  `a1/a2/p/delta`
    are None for flat-prior chains and `a` is None for mixture chains."""

    kind: str
    theta: np.ndarray
    beta: np.ndarray
    config: ChainConfig
    area_ids: list[str]
    a1: np.ndarray | None = None
    a2: np.ndarray | None = None
    p: np.ndarray | None = None
    delta: np.ndarray | None = None
    a: np.ndarray | None = None
    prior: PriorConfig | None = None

    @property
    def chains(self) -> int:
        return self.theta.shape[0]

    @property
    def retained(self) -> int:
        return self.theta.shape[1]

    @property
    def m(self) -> int:
        return self.theta.shape[2]

    @property
    def r(self) -> int:
        return self.beta.shape[2]

    def pooled(self, name: str) -> np.ndarray:
        """Draws of `name` with the chain axis folded in: (chains*retained, ...)."""
        arr = getattr(self, name)
        if arr is None:
            raise SamplerError(f"chain output of kind {self.kind!r} has no {name!r} draws")
        return arr.reshape(-1, *arr.shape[2:])


def draw_mvn_precision(P: np.ndarray, q: np.ndarray, z: np.ndarray) -> np.ndarray:
    """One draw from N(P^{-1} q, P^{-1}) given standard normals z.

    Shared scalar linear algebra (r x r): both kernel backends call this
    exact code, so it contributes no cross-backend divergence.
    """
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError as exc:
        raise SamplerError("singular precision matrix in coefficient draw") from exc
    mu = solve_triangular(L.T, solve_triangular(L, q, lower=True), lower=False)
    return mu + solve_triangular(L.T, z, lower=False)


def cond_theta(state: MixtureState, data: Dataset, rng, kernels=None) -> np.ndarray:
    """Draw each theta_i from N((d_i xb_i + a_c y_i)/(d_i + a_c),
    d_i a_c/(d_i + a_c)), a_c = a2 where delta_i = 1 else a1."""
    K = kernels or get_kernels()
    z = rng.standard_normal(data.m)
    K.theta_step(data.y, data.d_var, state.xb, state.a1, state.a2,
                 state.delta, z, state.theta)
    return state.theta


def cond_beta(state: MixtureState, data: Dataset, rng, kernels=None) -> np.ndarray:
    """Draw beta from N(P^{-1} q, P^{-1}) with P = sum a_c^{-1} x_i x_i'
    and q = sum a_c^{-1} x_i theta_i; refreshes the xb cache."""
    K = kernels or get_kernels()
    w = np.empty(data.m)
    K.weights_from_delta(state.a1, state.a2, state.delta, w)
    P, q = K.beta_suffstats(data.X, state.theta, w)
    z = rng.standard_normal(data.r)
    state.beta = draw_mvn_precision(P, q, z)
    K.matvec_cols(data.X, state.beta, state.xb)
    return state.beta


def cond_p(state: MixtureState, cfg: PriorConfig, rng) -> float:
    """Draw p ~ Beta(sum(delta) + a, m - sum(delta) + b); conjugate update
    of the outlier proportion."""
    m = state.delta.shape[0]
    n2 = int(np.count_nonzero(state.delta))
    p = float(rng.beta(n2 + cfg.p_beta_a, m - n2 + cfg.p_beta_b))
    # keep the open-interval invariant even if the Beta draw underflows
    if p <= 0.0:
        p = float(np.nextafter(0.0, 1.0))
    elif p >= 1.0:
        p = float(np.nextafter(1.0, 0.0))
    state.p = p
    return p


def cond_a1(state: MixtureState, data: Dataset, cfg: PriorConfig, rng,
            kernels=None, upper: float | None = None) -> float:
    """Draw a1 from the density ∝ a1^{-(alpha1 + n1/2)} exp(-s1/(2 a1))
    on (0, a2); n1/s1 are the count and residual sum of squares of the
    narrow component.  n1 = 0 degenerates to the power law a1^{-alpha1}.

    `upper` overrides the truncation bound (used when a2 is slaved to a1
    in degenerate-equivalence tests, where the order constraint holds by
    construction)."""
    K = kernels or get_kernels()
    s1, s2, n1, n2 = K.resid_masked_sums(state.theta, state.xb, state.delta)
    bound = state.a2 if upper is None else upper
    state.a1 = sample_truncated_invgamma(
        cfg.alpha1 + 0.5 * n1 - 1.0, 0.5 * s1, 0.0, bound, rng)
    return state.a1


def cond_a2(state: MixtureState, data: Dataset, cfg: PriorConfig, rng,
            kernels=None) -> float:
    """Draw a2 from the density ∝ a2^{-(alpha2 + n2/2)} exp(-s2/(2 a2))
    on (a1, inf); n2 = 0 degenerates to the power law a2^{-alpha2},
    integrable because alpha2 > 1."""
    K = kernels or get_kernels()
    s1, s2, n1, n2 = K.resid_masked_sums(state.theta, state.xb, state.delta)
    state.a2 = sample_truncated_invgamma(
        cfg.alpha2 + 0.5 * n2 - 1.0, 0.5 * s2, state.a1, math.inf, rng)
    return state.a2


def _delta_log_odds(p: float, a1: float, a2: float) -> tuple[float, float]:
    """(c, k) with eta_i = c + k r_i^2 the log odds of delta_i = 0 vs 1:
    P(delta_i = 1) = 1/(1 + exp(eta_i))."""
    if p <= 0.0:
        c = math.inf
    elif p >= 1.0:
        c = -math.inf
    else:
        c = math.log1p(-p) - math.log(p) + 0.5 * math.log(a2 / a1)
    k = 0.5 * (1.0 / a2 - 1.0 / a1)
    return c, k


def cond_delta(state: MixtureState, data: Dataset, rng, kernels=None) -> np.ndarray:
    """Draw each delta_i ~ Bernoulli with

        P(delta_i=1) = p n(theta_i; xb_i, a2) / [p n(...; a2) + (1-p) n(...; a1)]

    evaluated in log space: eta_i = log((1-p)/p) + log(a2/a1)/2
    + (1/a2 - 1/a1) r_i^2 / 2, P = 1/(1 + exp(eta_i)).  exp overflow is
    harmless (inf -> probability 0)."""
    K = kernels or get_kernels()
    eta = np.empty(data.m)
    c, k = _delta_log_odds(state.p, state.a1, state.a2)
    K.delta_eta(state.theta, state.xb, c, k, eta)
    with np.errstate(over="ignore"):
        np.exp(eta, out=eta)
    u = rng.random(data.m)
    K.delta_draw(eta, u, state.delta)
    return state.delta


def init_state(data: Dataset) -> MixtureState:
    """Deterministic starting point: beta from OLS; a1 the moment
    variance estimate floored at 1e-8 var(y); a2 = 10 a1 (mirroring the
    roughly tenfold spread seen in fitted mixtures); p = 0.1; delta = 1
    on the 10% largest |OLS residual| areas (ceiling count); theta the
    empirical Bayes prediction at (beta, a1)."""
    beta = ols_fit(data)
    vy = float(np.var(data.y))
    a1 = max(prasad_rao_a(data), 1e-8 * vy, 1e-30)
    a2 = 10.0 * a1
    resid = data.y - data.X @ beta
    n_flag = min(data.m, max(1, math.ceil(0.1 * data.m)))
    order = np.argsort(-np.abs(resid), kind="stable")
    delta = np.zeros(data.m, dtype=np.int8)
    delta[order[:n_flag]] = 1
    theta, _ = eb_predict(data, FHParams(beta=beta, a_var=a1))
    return MixtureState(theta=np.ascontiguousarray(theta), beta=beta, a1=a1,
                        a2=a2, p=0.1, delta=delta,
                        xb=np.ascontiguousarray(data.X @ beta))


def _check_finite(state: MixtureState, chain_idx: int, it: int) -> None:
    ok = (np.isfinite(state.theta).all() and np.isfinite(state.beta).all()
          and math.isfinite(state.a1) and state.a1 > 0
          and math.isfinite(state.a2) and math.isfinite(state.p))
    if not ok:
        raise SamplerError(f"non-finite sampler state (chain {chain_idx}, iteration {it})")


def _chain_rng(seed: int, chain_idx: int):
    return np.random.default_rng(np.random.SeedSequence((seed, chain_idx)))


def run_mixture_chain(data: Dataset, prior: PriorConfig, chain: ChainConfig,
                      backend: str | None = None, freeze: dict | None = None) -> ChainOutput:
    """Run the six-conditional Gibbs sampler.

    `freeze` is a testing hook (not part of the model API): keys
    "delta" (hold labels fixed), "p" (pin the mixing proportion) and
    "a2_factor" (slave a2 = factor * a1 instead of sampling it) let the
    acceptance suite collapse the mixture onto simpler exact laws.
    """
    check = validate_prior(prior, data.m, data.r)
    if not check.ok:
        raise PriorProprietyError(
            "improper posterior; violated: " + "; ".join(check.violations))
    K = get_kernels(backend)
    freeze = freeze or {}
    fz_delta = freeze.get("delta")
    fz_p = freeze.get("p")
    a2_factor = freeze.get("a2_factor")

    C, R, m, r = chain.chains, chain.retained, data.m, data.r
    theta_d = np.empty((C, R, m))
    beta_d = np.empty((C, R, r))
    a1_d = np.empty((C, R))
    a2_d = np.empty((C, R))
    p_d = np.empty((C, R))
    delta_d = np.empty((C, R, m), dtype=np.int8)

    for c in range(C):
        rng = _chain_rng(chain.seed, c)
        state = init_state(data)
        if fz_delta is not None:
            state.delta = np.ascontiguousarray(fz_delta, dtype=np.int8).copy()
        if fz_p is not None:
            state.p = float(fz_p)
        if a2_factor is not None:
            state.a2 = state.a1 * a2_factor
        for it in range(1, chain.iterations + 1):
            cond_theta(state, data, rng, K)
            cond_beta(state, data, rng, K)
            if fz_p is None:
                cond_p(state, prior, rng)
            if a2_factor is None:
                cond_a1(state, data, prior, rng, K)
                cond_a2(state, data, prior, rng, K)
            else:
                cond_a1(state, data, prior, rng, K, upper=math.inf)
                state.a2 = state.a1 * a2_factor
            if fz_delta is None:
                cond_delta(state, data, rng, K)
            _check_finite(state, c, it)
            k = it - chain.burn_in
            if k > 0 and k % chain.thin == 0:
                i = k // chain.thin - 1
                theta_d[c, i] = state.theta
                beta_d[c, i] = state.beta
                a1_d[c, i] = state.a1
                a2_d[c, i] = state.a2
                p_d[c, i] = state.p
                delta_d[c, i] = state.delta

    return ChainOutput(kind="mixture", theta=theta_d, beta=beta_d, config=chain,
                       area_ids=data.area_ids, a1=a1_d, a2=a2_d, p=p_d,
                       delta=delta_d, prior=prior)


def run_fh_chain(data: Dataset, chain: ChainConfig, backend: str | None = None) -> ChainOutput:
    """Flat-prior hierarchical Bayes chain for the classical model.

    Sweep theta -> beta -> a with a | rest ~ inverse-gamma
    ∝ a^{-m/2} exp(-S/(2a)), S = sum (theta_i - x_i'beta)^2.  Requires
    m > r + 2 for a proper posterior.
    """
    if not data.m > data.r + 2:
        raise PriorProprietyError(
            f"flat-prior posterior needs m > r + 2 (m={data.m}, r={data.r})")
    K = get_kernels(backend)
    C, R, m, r = chain.chains, chain.retained, data.m, data.r
    theta_d = np.empty((C, R, m))
    beta_d = np.empty((C, R, r))
    a_d = np.empty((C, R))

    for c in range(C):
        rng = _chain_rng(chain.seed, c)
        st = init_state(data)
        a = st.a1
        state = MixtureState(theta=st.theta, beta=st.beta, a1=a, a2=a, p=0.0,
                             delta=np.zeros(m, dtype=np.int8), xb=st.xb)
        for it in range(1, chain.iterations + 1):
            cond_theta(state, data, rng, K)
            cond_beta(state, data, rng, K)
            s1, _, _, _ = K.resid_masked_sums(state.theta, state.xb, state.delta)
            a = sample_truncated_invgamma(0.5 * m - 1.0, 0.5 * s1, 0.0, math.inf, rng)
            state.a1 = a
            state.a2 = a
            _check_finite(state, c, it)
            k = it - chain.burn_in
            if k > 0 and k % chain.thin == 0:
                i = k // chain.thin - 1
                theta_d[c, i] = state.theta
                beta_d[c, i] = state.beta
                a_d[c, i] = a

    return ChainOutput(kind="fh", theta=theta_d, beta=beta_d, config=chain,
                       area_ids=data.area_ids, a=a_d)


def log_posterior(state: MixtureState, data: Dataset, cfg: PriorConfig) -> float:
    """Unnormalized log posterior density at a full state; -inf outside
    the support.  Used by invariant tests (finite along the chain)."""
    if not (0.0 < state.a1 < state.a2) or not (0.0 <= state.p <= 1.0):
        return -math.inf
    d = data.d_var
    th, xb = state.theta, state.xb
    lik = -0.5 * float(np.sum(np.log(2.0 * np.pi * d) + (data.y - th) ** 2 / d))
    av = np.where(state.delta != 0, state.a2, state.a1)
    eff = -0.5 * float(np.sum(np.log(2.0 * np.pi * av) + (th - xb) ** 2 / av))
    n2 = float(np.count_nonzero(state.delta))
    n1 = float(data.m) - n2
    mix = float(xlogy(n2, state.p) + xlogy(n1, 1.0 - state.p))
    prior = (-cfg.alpha1 * math.log(state.a1) - cfg.alpha2 * math.log(state.a2)
             + float(xlogy(cfg.p_beta_a - 1.0, state.p))
             + float(xlogy(cfg.p_beta_b - 1.0, 1.0 - state.p)))
    return lik + eff + mix + prior
