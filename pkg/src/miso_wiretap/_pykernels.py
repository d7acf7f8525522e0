"""Pure-Python scalar kernels.

Reference implementation of the hot inner loops. ``_ckernels.pyx`` mirrors
every function here line for line; ``kernels.py`` picks one at import.
"""

import math

EULER_GAMMA = 0.57721566490153286061

_EPS = 1e-16
_TINY = 1e-300
_CF_MAXITER = 10000


def _e1_tail(y):
    """Tail ``1/(y+3 - 4/(y+5 - 9/(y+7 - ...)))`` of the E1 continued fraction."""
    # modified Lentz, b_k = y + 2k + 1, a_k = -k^2 for k >= 2
    b = y + 3.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for k in range(2, _CF_MAXITER):
        a = -float(k * k)
        b += 2.0
        d = a * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + a / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def _scaled_e1_series(y):
    # e^y * E1(y) = e^y * (-gamma - log y - sum_{k>=1} (-y)^k / (k k!)), y < 1
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -y / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _EPS * abs(total) or k > 200:
            break
        k += 1
    return math.exp(y) * (-EULER_GAMMA - math.log(y) - total)


def scaled_e1(y):
    """Return ``exp(y) * E1(y)`` for ``y > 0`` without overflow."""
    if y < 1.0:
        return _scaled_e1_series(y)
    if y > 1e150:
        return 1.0 / y
    r = _e1_tail(y)
    return 1.0 / (y + 1.0 - r)


def f1(x):
    """``F1(x) = exp(1/x) E1(1/x)``; assumes ``x > 0``."""
    if x > 1e300:
        return math.log(x) - EULER_GAMMA
    return scaled_e1(1.0 / x)


def f2(x):
    """``F2(x) = 1/x - F1(x)/x^2``; assumes ``x > 0``."""
    if x > 1e300:
        return 0.0
    y = 1.0 / x
    if y < 1.0:
        return y * (1.0 - y * _scaled_e1_series(y))
    if y > 1e150:
        return 1.0
    r = _e1_tail(y)
    # 1 - y e^y E1(y) = (1 - r) / (y + 1 - r), no cancellation for large y
    return y * (1.0 - r) / (y + 1.0 - r)


def f1_diff_quotient(a, b, delta=1e-6):
    """``(F1(a) - F1(b)) / (a - b)`` with the confluent limit ``F2``."""
    if abs(a - b) <= delta * max(a, b):
        return f2(0.5 * (a + b))
    return (f1(a) - f1(b)) / (a - b)


def _j0_series(x):
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    k = 1
    while True:
        term *= q / (k * k)
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) or k > 100:
            break
        k += 1
    return total


def _j0_miller(x):
    # backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised by
    # J_0 + 2 * sum J_{2k} = 1
    n = 2 * ((int(x) + 60) // 2)
    j_next = 0.0
    j_cur = 1e-30
    norm = 0.0
    j0 = 0.0
    for k in range(n, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next = j_cur
        j_cur = j_prev
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if k - 1 == 0:
            j0 = j_cur
    norm += j0
    return j0 / norm


def _j0_asymptotic(x):
    # Hankel expansion with |a_k| = prod_{m<=k} (2m-1)^2 / (k! (8x)^k);
    # for order zero Q(x) = -(|a_1| - |a_3| + ...)
    p = 0.0
    q = 0.0
    a = 1.0
    last = math.inf
    k = 0
    while k < 60:
        if k > 0:
            a *= (2 * k - 1) ** 2 / (k * 8.0 * x)
        if abs(a) > last:
            break
        last = abs(a)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * a
        else:
            q += sign * a
        if abs(a) < 1e-17:
            break
        k += 1
    chi = x - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) + q * math.sin(chi))


def bessel_j0(x):
    """Zero-order Bessel function of the first kind."""
    x = abs(x)
    if x <= 8.0:
        return _j0_series(x)
    if x <= 25.0:
        return _j0_miller(x)
    return _j0_asymptotic(x)


def _denominators(d):
    m = len(d)
    out = []
    for j in range(m):
        p = 1.0
        for i in range(m):
            if i != j:
                p *= (d[j] - d[i]) / d[j]
        out.append(p)
    return out


def expected_log_eigs(d, rho):
    """``sum_j F1(rho d_j) / prod_{i!=j} (1 - d_i/d_j)`` for distinct ``d``."""
    d = [float(v) for v in d]
    den = _denominators(d)
    total = 0.0
    for j in range(len(d)):
        total += f1(rho * d[j]) / den[j]
    return total


def resolvent_weights(d, n, rho):
    """Diagonal weights ``Y_kk``, ``k < n``, for distinct nonzero ``d`` (len M <= n)."""
    d = [float(v) for v in d]
    m = len(d)
    den = _denominators(d)
    f1v = [f1(rho * dj) for dj in d]
    out = [0.0] * n
    for k in range(m):
        s = f2(rho * d[k]) / den[k]
        for j in range(m):
            if j != k:
                s += f1_diff_quotient(rho * d[j], rho * d[k]) / den[j]
        out[k] = s
    tail = 0.0
    for j in range(m):
        tail += f1v[j] / (rho * d[j] * den[j])
    for k in range(m, n):
        out[k] = tail
    return out


def f1_array(xs):
    return [f1(float(x)) for x in xs]


def f2_array(xs):
    return [f2(float(x)) for x in xs]


def bessel_j0_array(xs):
    return [bessel_j0(float(x)) for x in xs]
