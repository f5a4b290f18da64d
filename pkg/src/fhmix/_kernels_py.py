"""Pure-numpy Gibbs sweep kernels.

Fallback used when the compiled extension is unavailable.  Every
function mirrors its Cython counterpart operation for operation; sums
are accumulated via cumsum (strictly sequential, unlike np.sum's
pairwise reduction) so both backends produce bit-identical results.
All random numbers are drawn by the caller: kernels are deterministic
array arithmetic only.
"""

import numpy as np


def theta_step(y, d, xb, a1, a2, delta, z, out):
    """Draw theta_i ~ N((d_i xb_i + a_c y_i)/(d_i + a_c), d_i a_c/(d_i + a_c))
    with a_c = a2 where delta_i = 1 else a1, from standard normals z."""
    ac = np.where(delta != 0, a2, a1)
    den = d + ac
    mean = (d * xb + ac * y) / den
    var = (d * ac) / den
    out[:] = mean + np.sqrt(var) * z


def weights_from_delta(a1, a2, delta, out):
    """Precision weight 1/a_c per area."""
    out[:] = 1.0 / np.where(delta != 0, a2, a1)


def matvec_cols(X, beta, out):
    """out = X @ beta accumulated column by column."""
    out[:] = X[:, 0] * beta[0]
    for j in range(1, X.shape[1]):
        out += X[:, j] * beta[j]


def beta_suffstats(X, theta, w):
    """Weighted normal-equation blocks P = X'WX and q = X'W theta."""
    r = X.shape[1]
    P = np.empty((r, r))
    q = np.empty(r)
    for j in range(r):
        wxj = w * X[:, j]
        q[j] = np.cumsum(wxj * theta)[-1]
        for k in range(j, r):
            s = np.cumsum(wxj * X[:, k])[-1]
            P[j, k] = s
            P[k, j] = s
    return P, q


def resid_masked_sums(theta, xb, delta):
    """Squared-residual sums split by component label.

    Returns (s1, s2, n1, n2): sums and counts over delta == 0 and
    delta == 1 respectively.
    """
    rr = theta - xb
    r2 = rr * rr
    df = delta.astype(np.float64)
    s2 = np.cumsum(r2 * df)[-1]
    s1 = np.cumsum(r2 * (1.0 - df))[-1]
    n2 = int(np.count_nonzero(delta))
    return float(s1), float(s2), delta.shape[0] - n2, n2


def delta_eta(theta, xb, c, k, out):
    """Log odds against the wide component: eta_i = c + k (theta_i - xb_i)^2.

    k = (1/a2 - 1/a1)/2 <= 0, so large residuals push eta down and the
    wide-component probability 1/(1 + exp(eta)) up.  The caller
    exponentiates (np.exp on the shared buffer keeps backends identical).
    """
    rr = theta - xb
    out[:] = c + k * (rr * rr)


def delta_draw(w, u, out):
    """Set delta_i = 1 where u_i < 1/(1 + w_i), w = exp(eta).  Returns n2."""
    prob = 1.0 / (1.0 + w)
    hits = u < prob
    out[:] = hits
    return int(np.count_nonzero(hits))
