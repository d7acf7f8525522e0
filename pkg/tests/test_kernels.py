import os
import subprocess
import sys

import numpy as np
import pytest

from miso_wiretap import _pykernels, kernels

needs_ext = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernels not built")


@needs_ext
def test_backends_agree_on_scalar_kernels():
    c = kernels.BACKENDS["cython"]
    rng = np.random.default_rng(11)
    xs = np.concatenate([10 ** rng.uniform(-9, 9, 500), [1.0, 1e-300, 1e300]])
    for name in ("scaled_e1", "f1", "f2"):
        a = np.array([getattr(_pykernels, name)(x) for x in xs])
        b = np.array([getattr(c, name)(x) for x in xs])
        np.testing.assert_allclose(b, a, rtol=1e-15, atol=0)
    js = rng.uniform(-60, 60, 1000)
    np.testing.assert_allclose([c.bessel_j0(x) for x in js], [_pykernels.bessel_j0(x) for x in js],
                               rtol=0, atol=1e-15)


@needs_ext
def test_backends_agree_on_spectral_kernels():
    c = kernels.BACKENDS["cython"]
    rng = np.random.default_rng(12)
    for m in range(1, 7):
        d = np.sort(rng.uniform(0.01, 3, m))[::-1]
        rho = 10 ** rng.uniform(-1, 2)
        assert c.expected_log_eigs(d, rho) == pytest.approx(_pykernels.expected_log_eigs(d, rho), rel=1e-14)
        np.testing.assert_allclose(c.resolvent_weights(d, 7, rho), _pykernels.resolvent_weights(d, 7, rho),
                                   rtol=1e-13)
        np.testing.assert_allclose(c.f1_array(d), _pykernels.f1_array(d), rtol=1e-15)


def test_use_backend_switches_and_rejects_unknown():
    prev = kernels.BACKEND
    try:
        assert kernels.use_backend("python") is _pykernels
        assert kernels.impl is _pykernels
    finally:
        kernels.use_backend(prev)
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_environment_forces_pure_python():
    env = dict(os.environ, MISO_WIRETAP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from miso_wiretap import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
