# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels; same algorithms and signatures as ``_pykernels``."""

from libc.math cimport exp, log, fabs, sqrt, cos, sin, M_PI, INFINITY

import numpy as np

cdef enum:
    MAXM = 64

cdef double EULER_GAMMA_C = 0.57721566490153286061
cdef double _EPS = 1e-16
cdef double _TINY = 1e-300

EULER_GAMMA = EULER_GAMMA_C


cdef double _e1_tail(double y) nogil:
    cdef double b = y + 3.0
    cdef double c = 1.0 / _TINY
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double a, delta
    cdef int k
    for k in range(2, 10000):
        a = -<double>(k * k)
        b += 2.0
        d = a * d + b
        if fabs(d) < _TINY:
            d = _TINY
        c = b + a / c
        if fabs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        h *= delta
        if fabs(delta - 1.0) < _EPS:
            break
    return h


cdef double _scaled_e1_series(double y) nogil:
    cdef double total = 0.0
    cdef double term = 1.0
    cdef double contrib
    cdef int k = 1
    while True:
        term *= -y / k
        contrib = term / k
        total += contrib
        if fabs(contrib) < _EPS * fabs(total) or k > 200:
            break
        k += 1
    return exp(y) * (-EULER_GAMMA_C - log(y) - total)


cdef double c_scaled_e1(double y) nogil:
    if y < 1.0:
        return _scaled_e1_series(y)
    if y > 1e150:
        return 1.0 / y
    return 1.0 / (y + 1.0 - _e1_tail(y))


cdef double c_f1(double x) nogil:
    if x > 1e300:
        return log(x) - EULER_GAMMA_C
    return c_scaled_e1(1.0 / x)


cdef double c_f2(double x) nogil:
    cdef double y, r
    if x > 1e300:
        return 0.0
    y = 1.0 / x
    if y < 1.0:
        return y * (1.0 - y * _scaled_e1_series(y))
    if y > 1e150:
        return 1.0
    r = _e1_tail(y)
    return y * (1.0 - r) / (y + 1.0 - r)


cdef double c_f1_diff_quotient(double a, double b, double delta) nogil:
    cdef double m = a if a > b else b
    if fabs(a - b) <= delta * m:
        return c_f2(0.5 * (a + b))
    return (c_f1(a) - c_f1(b)) / (a - b)


cdef double _j0_series(double x) nogil:
    cdef double q = -0.25 * x * x
    cdef double term = 1.0
    cdef double total = 1.0
    cdef int k = 1
    while True:
        term *= q / (k * k)
        total += term
        if fabs(term) < 1e-17 * (fabs(total) if fabs(total) > 1e-300 else 1e-300) or k > 100:
            break
        k += 1
    return total


cdef double _j0_miller(double x) nogil:
    cdef int n = 2 * ((<int>x + 60) // 2)
    cdef double j_next = 0.0
    cdef double j_cur = 1e-30
    cdef double j_prev
    cdef double norm = 0.0
    cdef double j0 = 0.0
    cdef int k
    for k in range(n, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next = j_cur
        j_cur = j_prev
        if fabs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if k - 1 == 0:
            j0 = j_cur
    norm += j0
    return j0 / norm


cdef double _j0_asymptotic(double x) nogil:
    cdef double p = 0.0
    cdef double q = 0.0
    cdef double a = 1.0
    cdef double last = INFINITY
    cdef double sign, chi
    cdef int k = 0
    while k < 60:
        if k > 0:
            a *= (2 * k - 1) * (2 * k - 1) / (k * 8.0 * x)
        if fabs(a) > last:
            break
        last = fabs(a)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * a
        else:
            q += sign * a
        if fabs(a) < 1e-17:
            break
        k += 1
    chi = x - 0.25 * M_PI
    return sqrt(2.0 / (M_PI * x)) * (p * cos(chi) + q * sin(chi))


cdef double c_bessel_j0(double x) nogil:
    x = fabs(x)
    if x <= 8.0:
        return _j0_series(x)
    if x <= 25.0:
        return _j0_miller(x)
    return _j0_asymptotic(x)


cdef void _denominators(double[::1] d, int m, double* out) nogil:
    cdef int i, j
    cdef double p
    for j in range(m):
        p = 1.0
        for i in range(m):
            if i != j:
                p *= (d[j] - d[i]) / d[j]
        out[j] = p


def scaled_e1(double y):
    return c_scaled_e1(y)


def f1(double x):
    return c_f1(x)


def f2(double x):
    return c_f2(x)


def f1_diff_quotient(double a, double b, double delta=1e-6):
    return c_f1_diff_quotient(a, b, delta)


def bessel_j0(double x):
    return c_bessel_j0(x)


def expected_log_eigs(d, double rho):
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef int m = dv.shape[0]
    cdef double den[MAXM]
    cdef double total = 0.0
    cdef int j
    if m > MAXM:
        raise ValueError("at most %d eigenvalues supported" % MAXM)
    _denominators(dv, m, den)
    for j in range(m):
        total += c_f1(rho * dv[j]) / den[j]
    return total


def resolvent_weights(d, int n, double rho):
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef int m = dv.shape[0]
    cdef double den[MAXM]
    cdef double f1v[MAXM]
    cdef double s, tail = 0.0
    cdef int j, k
    if m > MAXM:
        raise ValueError("at most %d eigenvalues supported" % MAXM)
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] ov = out
    _denominators(dv, m, den)
    for j in range(m):
        f1v[j] = c_f1(rho * dv[j])
    for k in range(m):
        s = c_f2(rho * dv[k]) / den[k]
        for j in range(m):
            if j != k:
                s += c_f1_diff_quotient(rho * dv[j], rho * dv[k], 1e-6) / den[j]
        ov[k] = s
    for j in range(m):
        tail += f1v[j] / (rho * dv[j] * den[j])
    for k in range(m, n):
        ov[k] = tail
    return out


def f1_array(xs):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = c_f1(xv[i])
    return out


def f2_array(xs):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = c_f2(xv[i])
    return out


def bessel_j0_array(xs):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = c_bessel_j0(xv[i])
    return out
