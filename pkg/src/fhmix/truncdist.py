"""Draws from a truncated inverse-gamma density.

The target on x in (lower, upper) is

    f(x) propto x**(-(shape + 1)) * exp(-rate / x)

which the variance conditionals of the Gibbs sampler produce with
shape = alpha + n/2 - 1 and rate = S/2.  Substituting t = rate / x
turns this into a Gamma(shape, 1) density in t, so interval masses and
quantiles come from the regularized incomplete gamma functions.  When a
mixture component is empty the sum S collapses to zero and the density
degenerates to a pure power law, handled by closed-form inversion.

shape may be nonpositive (small components with alpha < 1); the density
is then only integrable against a finite truncation bound, enforced
here with explicit errors rather than silent garbage.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammainc, gammaincc, gammaincinv, gammainccinv

from .errors import SamplerError

_MAX_TRIES = 10_000


def _powerlaw_mass(c: float, lo: float, hi: float) -> float:
    """Integral of t**c over (lo, hi); hi may be inf when c < -1."""
    if c == -1.0:
        return math.log(hi / lo)
    s = c + 1.0
    return (hi**s - lo**s) / s


def _powerlaw_draw(c: float, lo: float, hi: float, u: float) -> float:
    """Inverse-CDF draw from density propto t**c on (lo, hi)."""
    if c == -1.0:
        return lo * (hi / lo) ** u
    s = c + 1.0
    los = lo**s
    return (los + u * (hi**s - los)) ** (1.0 / s)


def _trunc_exp_draw(a: float, b: float, u: float) -> float:
    """Inverse-CDF draw from exp(-t) restricted to (a, b); b may be inf."""
    ee = -math.expm1(-(b - a)) if math.isfinite(b) else 1.0
    return a - math.log1p(-u * ee)


def _dual_envelope_draw(c: float, t_lo: float, t_hi: float, rng) -> float:
    """Rejection draw from t**c * exp(-t) on (t_lo, t_hi) for c <= -1.

    Envelope: t**c below t = 1 (accept with exp(-t)) and exp(-t) above
    (accept with t**c, which is <= 1 there).  Acceptance stays bounded
    away from zero however small t_lo gets, which matters because the
    narrow-component conditional hits t_lo = S/(2*upper) ~ 0 routinely.
    """
    split = min(1.0, t_hi)
    m1 = _powerlaw_mass(c, t_lo, split) if t_lo < split else 0.0
    lo2 = max(1.0, t_lo)
    m2 = (math.exp(-lo2) - (math.exp(-t_hi) if math.isfinite(t_hi) else 0.0)
          ) if t_hi > lo2 else 0.0
    total = m1 + m2
    if not (total > 0 and math.isfinite(m1)):
        raise SamplerError("degenerate truncation interval")
    for _ in range(_MAX_TRIES):
        pick = rng.random()
        t = (_powerlaw_draw(c, t_lo, split, rng.random()) if pick * total < m1
             else _trunc_exp_draw(lo2, t_hi, rng.random()))
        v = rng.random()
        ok = (v < math.exp(-t)) if t < 1.0 else (math.log(v) < c * math.log(t))
        if ok and t_lo < t < t_hi:
            return t
    raise SamplerError("rejection sampler exceeded its iteration budget")


def _tilted_exp_draw(c: float, t_lo: float, t_hi: float, rng) -> float:
    """Rejection draw from t**c * exp(-t) on (t_lo, t_hi), t_lo beyond
    the mode (t_lo > max(c, 0)).  Exponential proposal tilted so the
    envelope stays above the log-concave right tail."""
    lam = 1.0 - max(c, 0.0) / t_lo
    for _ in range(_MAX_TRIES):
        t = t_lo - math.log1p(-rng.random()) / lam
        if not t < t_hi:
            continue
        accept_log = c * math.log(t / t_lo) + (lam - 1.0) * (t - t_lo)
        if math.log(rng.random()) < accept_log:
            return t
    raise SamplerError("rejection sampler exceeded its iteration budget")


def _power_reject_draw(c: float, t_lo: float, t_hi: float, rng) -> float:
    """Rejection draw from t**c * exp(-t) on (t_lo, t_hi) with small
    t_hi: power-law proposal, accept with exp(-t)."""
    for _ in range(_MAX_TRIES):
        t = _powerlaw_draw(c, t_lo, t_hi, rng.random())
        if math.log(rng.random()) < -t and t_lo < t < t_hi:
            return t
    raise SamplerError("rejection sampler exceeded its iteration budget")


def _fallback_draw(shape: float, t_lo: float, t_hi: float, rng) -> float:
    c = shape - 1.0
    if t_lo >= max(shape, 1.0):
        return _tilted_exp_draw(c, t_lo, t_hi, rng)
    if t_hi <= 2.0:
        return _power_reject_draw(c, t_lo, t_hi, rng)
    raise SamplerError("truncation interval carries no representable mass")


_TINY = 5e-324  # smallest subnormal
_MIN_NORMAL = 2.2250738585072014e-308


def _interval_t(rate: float, lower: float, upper: float) -> tuple[float, float]:
    t_lo = rate / upper if math.isfinite(upper) else 0.0
    if t_lo == 0.0 and rate > 0.0 and math.isfinite(upper):
        # rate/upper underflowed; keep the t interval strictly positive
        # (mass error from this floor is at most ln 2 in log scale)
        t_lo = _TINY
    t_hi = rate / lower if lower > 0 else math.inf
    return t_lo, t_hi


def _clamp_open(x: float, lower: float, upper: float) -> float:
    """Pull boundary-rounded values strictly inside (lower, upper)."""
    if x <= lower:
        x = np.nextafter(lower, math.inf)
    if x >= upper:
        x = np.nextafter(upper, -math.inf)
    return float(x)


def sample_truncated_invgamma(shape: float, rate: float, lower: float,
                              upper: float, rng, size: int | None = None):
    """Draw from x**(-(shape+1)) exp(-rate/x) restricted to (lower, upper).

    Parameters
    ----------
    shape, rate : float
        Inverse-gamma parameters (rate of the reciprocal gamma);
        rate == 0 selects the power-law limit.
        shape <= 0 is allowed whenever the truncation keeps the density
        integrable.
    lower, upper : float
        Open truncation interval, 0 <= lower < upper <= inf.
    rng : numpy.random.Generator
    size : int or None
        None returns a float; an int returns a 1-d array.

    Raises
    ------
    SamplerError
        Empty interval, non-integrable configuration, or a rejection
        loop exhausting its budget.
    """
    if not (math.isfinite(shape) and math.isfinite(rate) and rate >= 0):
        raise SamplerError("shape must be finite and rate finite, >= 0")
    if not (lower >= 0 and upper > 0) or math.isnan(upper):
        raise SamplerError("need 0 <= lower < upper")
    if not lower < upper:
        raise SamplerError(f"empty truncation interval ({lower}, {upper})")

    n = 1 if size is None else int(size)
    if size is not None and n < 0:
        raise SamplerError("size must be nonnegative")

    if rate == 0.0:
        # Pure power law x**(-(shape+1)): integrable at 0 only for
        # shape < 0 and at inf only for shape > 0.
        if lower == 0.0 and shape >= 0:
            raise SamplerError("non-integrable at 0: rate == 0 needs shape < 0")
        if math.isinf(upper) and shape <= 0:
            raise SamplerError("non-integrable at inf: rate == 0 needs shape > 0")
        # Invert x**s directly with s = -shape, which is exact; routing
        # through the exponent - (shape + 1) rounds tiny shapes onto the
        # logarithmic case and breaks at lower = 0.
        s = -shape
        u = rng.random(n)
        los = lower**s if lower > 0.0 else 0.0
        his = upper**s if math.isfinite(upper) else 0.0
        if s != 0.0 and his != los:
            draws = (los + u * (his - los)) ** (1.0 / s)
        elif lower > 0.0:
            # x**s collapsed (or shape is exactly 0): the limit law is 1/x
            draws = lower * (upper / lower) ** u
        else:
            # all representable mass sits at the upper end (huge s > 0)
            draws = np.full(n, upper)
        out = np.array([_clamp_open(x, lower, upper) for x in draws])
        return float(out[0]) if size is None else out

    t_lo, t_hi = _interval_t(rate, lower, upper)

    if t_hi < _MIN_NORMAL:
        # exp(-rate/x) equals 1 to the last ulp everywhere on the
        # interval: sample the pure power law instead (whose
        # integrability guards then decide the rate -> 0 limit).
        return sample_truncated_invgamma(shape, 0.0, lower, upper, rng, size)

    if shape <= 0.0:
        if math.isinf(upper):
            raise SamplerError("non-integrable at inf: shape <= 0 needs finite upper")
        out = np.array([_clamp_open(rate / _dual_envelope_draw(shape - 1.0, t_lo, t_hi, rng),
                                    lower, upper) for _ in range(n)])
        return float(out[0]) if size is None else out

    p_lo = float(gammainc(shape, t_lo)) if t_lo > 0 else 0.0
    p_hi = float(gammainc(shape, t_hi)) if math.isfinite(t_hi) else 1.0
    q_lo = float(gammaincc(shape, t_lo)) if t_lo > 0 else 1.0
    q_hi = float(gammaincc(shape, t_hi)) if math.isfinite(t_hi) else 0.0
    mass = p_hi - p_lo if p_hi <= 0.5 else q_lo - q_hi

    if mass > 0.1:
        # Untruncated proposal is cheap and accepted often enough.
        out = np.empty(n)
        todo = np.arange(n)
        for _ in range(_MAX_TRIES):
            g = rng.standard_gamma(shape, size=todo.size)
            with np.errstate(divide="ignore"):
                x = rate / g
            ok = (lower < x) & (x < upper)
            out[todo[ok]] = x[ok]
            todo = todo[~ok]
            if todo.size == 0:
                break
        else:
            raise SamplerError("rejection sampler exceeded its iteration budget")
        return float(out[0]) if size is None else out

    # Thin slice: invert the gamma CDF on whichever tail is well
    # conditioned, then patch any draw that floating point pushed out of
    # range with a direct tail sampler.
    u = rng.random(n)
    with np.errstate(invalid="ignore", divide="ignore"):
        if p_hi <= 0.5:
            t = gammaincinv(shape, p_lo + u * (p_hi - p_lo))
        elif q_lo <= 0.5:
            t = gammainccinv(shape, q_hi + u * (q_lo - q_hi))
        else:
            t = gammaincinv(shape, p_lo + u * (p_hi - p_lo))
        x = rate / np.asarray(t, dtype=np.float64)
    out = np.empty(n)
    for i in range(n):
        xi = x[i] if np.isfinite(x[i]) else -1.0
        if not (lower * (1.0 - 1e-9) < xi < upper * (1.0 + 1e-9)):
            xi = rate / _fallback_draw(shape, t_lo, t_hi, rng)
        out[i] = _clamp_open(xi, lower, upper)
    return float(out[0]) if size is None else out
