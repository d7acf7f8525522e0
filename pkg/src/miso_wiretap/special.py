"""Exponential-integral kernels and the zero-order Bessel function.

``f1(x) = exp(1/x) E1(1/x)`` is the ergodic capacity of a unit-mean
exponential channel at SNR ``x``:

    f1(x) = x * integral_0^inf exp(-t) / (1 + t x) dt

and ``f2(x) = 1/x - f1(x)/x**2 = integral_0^inf exp(-t) / (1 + t x)**2 dt``
is its derivative. Both are evaluated through the scaled exponential
integral ``exp(y) E1(y)`` so that small ``x`` (huge ``1/x``) does not
overflow.

All functions accept scalars or array-likes; arrays are evaluated
element-wise and returned as ``numpy.ndarray``.
"""

import numpy as np

from . import kernels
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

#: relative gap below which the difference quotient switches to ``f2``
CANCEL_DELTA = 1e-6


def _check_positive(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} requires finite positive arguments, got {x!r}")
    return arr


def _apply(scalar_fn, array_fn, x):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return scalar_fn(float(arr))
    return np.asarray(array_fn(arr.ravel()), dtype=float).reshape(arr.shape)


def scaled_e1(y):
    """``exp(y) * E1(y)`` for ``y > 0``.

    Lies strictly between ``1/(y+1)`` and ``1/y`` and decreases in ``y``.
    """
    _check_positive(y, "scaled_e1")
    k = kernels.impl
    return _apply(k.scaled_e1, lambda a: [k.scaled_e1(float(v)) for v in a], y)


def f1(x):
    """``F1(x) = exp(1/x) E1(1/x)`` for ``x > 0``.

    Increasing, ``~x`` as ``x -> 0`` and ``~log(x) - gamma`` as ``x -> inf``.
    """
    _check_positive(x, "f1")
    k = kernels.impl
    return _apply(k.f1, k.f1_array, x)


def f2(x):
    """``F2(x) = 1/x - F1(x)/x**2`` for ``x > 0``; decreasing from 1 towards 0."""
    _check_positive(x, "f2")
    k = kernels.impl
    return _apply(k.f2, k.f2_array, x)


def f1_difference_quotient(a, b):
    """``(F1(a) - F1(b)) / (a - b)``, equal to ``F2(a)`` when ``a == b``.

    When ``|a - b| <= 1e-6 * max(a, b)`` the midpoint value ``F2((a+b)/2)``
    is returned instead of the cancellation-prone quotient.
    """
    _check_positive(a, "f1_difference_quotient")
    _check_positive(b, "f1_difference_quotient")
    k = kernels.impl
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    if a_arr.ndim == 0:
        return k.f1_diff_quotient(float(a_arr), float(b_arr), CANCEL_DELTA)
    out = [k.f1_diff_quotient(float(u), float(v), CANCEL_DELTA)
           for u, v in zip(a_arr.ravel(), b_arr.ravel())]
    return np.asarray(out).reshape(a_arr.shape)


def bessel_j0(x):
    """Zero-order Bessel function of the first kind, absolute error < 1e-12 on |x| <= 50."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("bessel_j0 requires finite arguments")
    k = kernels.impl
    return _apply(k.bessel_j0, k.bessel_j0_array, arr)
