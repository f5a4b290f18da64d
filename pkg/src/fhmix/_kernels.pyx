# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs sweep kernels.

Mirrors `_kernels_py` operation for operation.  The build disables FMA
contraction so that each arithmetic expression rounds exactly like its
numpy counterpart; chain-level tests assert bit equality between the
backends.  No random numbers are generated here: the caller supplies
pre-drawn normals/uniforms so both backends consume one shared stream.
"""

from libc.math cimport sqrt

import numpy as np


def theta_step(const double[::1] y, const double[::1] d, const double[::1] xb,
               double a1, double a2, const signed char[::1] delta,
               const double[::1] z, double[::1] out):
    cdef Py_ssize_t i, m = y.shape[0]
    cdef double ac, den, mean, var
    for i in range(m):
        ac = a2 if delta[i] else a1
        den = d[i] + ac
        mean = (d[i] * xb[i] + ac * y[i]) / den
        var = (d[i] * ac) / den
        out[i] = mean + sqrt(var) * z[i]


def weights_from_delta(double a1, double a2, const signed char[::1] delta,
                       double[::1] out):
    cdef Py_ssize_t i, m = delta.shape[0]
    for i in range(m):
        out[i] = 1.0 / (a2 if delta[i] else a1)


def matvec_cols(const double[:, ::1] X, const double[::1] beta, double[::1] out):
    cdef Py_ssize_t i, j, m = X.shape[0], r = X.shape[1]
    cdef double acc
    for i in range(m):
        acc = X[i, 0] * beta[0]
        for j in range(1, r):
            acc = acc + X[i, j] * beta[j]
        out[i] = acc


def beta_suffstats(const double[:, ::1] X, const double[::1] theta, const double[::1] w):
    cdef Py_ssize_t i, j, k, m = X.shape[0], r = X.shape[1]
    P = np.empty((r, r))
    q = np.empty(r)
    cdef double[:, ::1] Pv = P
    cdef double[::1] qv = q
    cdef double s
    for j in range(r):
        s = (w[0] * X[0, j]) * theta[0]
        for i in range(1, m):
            s = s + (w[i] * X[i, j]) * theta[i]
        qv[j] = s
        for k in range(j, r):
            s = (w[0] * X[0, j]) * X[0, k]
            for i in range(1, m):
                s = s + (w[i] * X[i, j]) * X[i, k]
            Pv[j, k] = s
            Pv[k, j] = s
    return P, q


def resid_masked_sums(const double[::1] theta, const double[::1] xb,
                      const signed char[::1] delta):
    cdef Py_ssize_t i, m = theta.shape[0]
    cdef Py_ssize_t n2 = 0
    cdef double rr, r2, df, s1, s2
    rr = theta[0] - xb[0]
    r2 = rr * rr
    df = <double> delta[0]
    s2 = r2 * df
    s1 = r2 * (1.0 - df)
    if delta[0]:
        n2 += 1
    for i in range(1, m):
        rr = theta[i] - xb[i]
        r2 = rr * rr
        df = <double> delta[i]
        s2 = s2 + r2 * df
        s1 = s1 + r2 * (1.0 - df)
        if delta[i]:
            n2 += 1
    return s1, s2, m - n2, n2


def delta_eta(const double[::1] theta, const double[::1] xb, double c, double k,
              double[::1] out):
    cdef Py_ssize_t i, m = theta.shape[0]
    cdef double rr
    for i in range(m):
        rr = theta[i] - xb[i]
        out[i] = c + k * (rr * rr)


def delta_draw(const double[::1] w, const double[::1] u, signed char[::1] out):
    cdef Py_ssize_t i, m = w.shape[0]
    cdef Py_ssize_t n2 = 0
    cdef double prob
    for i in range(m):
        prob = 1.0 / (1.0 + w[i])
        if u[i] < prob:
            out[i] = 1
            n2 += 1
        else:
            out[i] = 0
    return n2
