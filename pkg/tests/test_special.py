import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from miso_wiretap import DomainError, bessel_j0, f1, f1_difference_quotient, f2, scaled_e1
from miso_wiretap.special import EULER_GAMMA

mp.mp.dps = 40


def mp_f1(x):
    y = 1 / mp.mpf(x)
    return mp.exp(y) * mp.e1(y)


def mp_f2(x):
    x = mp.mpf(x)
    return 1 / x - mp_f1(x) / x ** 2


XS = [1e-8, 1e-4, 0.003, 0.1, 0.5, 1.0, 1.7, 3.0, 10.0, 97.0, 1e3, 1e5, 1e8]


@pytest.mark.parametrize("x", XS)
def test_f1_matches_mpmath(backend, x):
    assert f1(x) == pytest.approx(float(mp_f1(x)), rel=1e-13)


@pytest.mark.parametrize("x", XS)
def test_f2_matches_mpmath(backend, x):
    assert f2(x) == pytest.approx(float(mp_f2(x)), rel=1e-12)


def test_frozen_values():
    # mpmath, 40 digits
    assert f1(1.0) == pytest.approx(0.5963473623231940743, rel=1e-15)
    assert f2(1.0) == pytest.approx(0.4036526376768059257, rel=1e-14)


@pytest.mark.parametrize("y", [1e-300, 1e-10, 0.5, 1.0, 2.0, 50.0, 1e300])
def test_scaled_e1_bounds(y):
    v = scaled_e1(y)
    assert 1 / (y + 1) < v <= 1 / y or math.isclose(v, 1 / y, rel_tol=1e-15)


def test_small_and_large_argument_asymptotics():
    assert f1(1e-12) == pytest.approx(1e-12, rel=1e-10)
    x = 1e12
    assert f1(x) == pytest.approx(math.log(x) - EULER_GAMMA, rel=1e-10)
    assert f2(1e-12) == pytest.approx(1.0, rel=1e-10)


def test_f2_is_derivative_of_f1():
    for x in [0.05, 0.7, 4.0, 60.0]:
        h = 1e-5 * x
        fd = (f1(x + h) - f1(x - h)) / (2 * h)
        assert fd == pytest.approx(f2(x), rel=1e-8)


def test_difference_quotient_regimes(backend):
    assert f1_difference_quotient(2.0, 3.0) == pytest.approx(float((mp_f1(2) - mp_f1(3)) / -1), rel=1e-13)
    # inside the cancellation band the midpoint derivative is used
    a, b = 2.0, 2.0 * (1 + 5e-7)
    assert f1_difference_quotient(a, b) == pytest.approx(f2((a + b) / 2), rel=1e-14)
    assert f1_difference_quotient(a, a) == pytest.approx(f2(a), rel=1e-15)
    # just outside the band: quotient and derivative agree to the expected accuracy
    b = 2.0 * (1 + 2e-6)
    assert f1_difference_quotient(a, b) == pytest.approx(f2((a + b) / 2), rel=1e-8)


def test_vectorised_shapes():
    x = np.array([[0.5, 1.0], [2.0, 4.0]])
    np.testing.assert_allclose(f1(x), [[f1(v) for v in r] for r in x], rtol=0, atol=0)
    assert f2(x).shape == (2, 2)
    assert f1_difference_quotient(x, 1.0).shape == (2, 2)
    assert bessel_j0([0.0, 1.0]).shape == (2,)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        f1(bad)
    with pytest.raises(DomainError):
        f2(bad)
    with pytest.raises(DomainError):
        f1_difference_quotient(bad, 1.0)
    with pytest.raises(DomainError):
        f1([1.0, bad])


def test_bessel_j0_against_mpmath(backend):
    xs = np.concatenate([np.linspace(0, 50, 2001), [7.999, 8.0, 8.001, 24.999, 25.0, 25.001]])
    err = max(abs(bessel_j0(x) - float(mp.besselj(0, x))) for x in xs)
    assert err < 1e-12
    assert bessel_j0(-3.2) == bessel_j0(3.2)
    assert bessel_j0(0.0) == 1.0


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_j0(float("nan"))


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(1.0001, 10.0))
def test_f1_increasing_f2_decreasing(x, k):
    assert f1(x * k) > f1(x)
    assert f2(x * k) < f2(x)
    assert 0 < f2(x) < 1


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-4, 1e4), st.floats(1e-4, 1e4))
def test_difference_quotient_between_derivatives(a, b):
    # F1 is concave, so the secant slope lies between the end-point derivatives
    q = f1_difference_quotient(a, b)
    lo, hi = sorted([f2(a), f2(b)])
    assert lo * (1 - 1e-9) <= q <= hi * (1 + 1e-9)
