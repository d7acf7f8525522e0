import warnings

import numpy as np
import pytest

from miso_wiretap import (HermitianMatrix, InputCovariance, InvalidInputError, Mode, NotPSDError, Scenario,
                          eigendecompose, jakes_covariance, matrix_sqrt, sample_standard_complex_gaussian,
                          snr_db_to_rho)
from miso_wiretap.hermitian import as_generator

from _scenarios import random_hermitian, random_pd


def test_rejects_bad_shapes_and_values():
    for bad in ([1, 2, 3], np.zeros((2, 3)), [[1, np.nan], [np.nan, 1]], [[1, 1j], [1j, 1]]):
        with pytest.raises(InvalidInputError):
            HermitianMatrix(bad)


def test_stored_matrix_is_hermitian_and_readonly():
    a = np.array([[1.0, 2 + 1e-14j], [2, 3]])
    m = HermitianMatrix(a)
    np.testing.assert_array_equal(m.array, m.array.conj().T)
    with pytest.raises(ValueError):
        m.array[0, 0] = 5


def test_eigh_order_phase_and_reconstruction():
    rng = np.random.default_rng(1)
    a = random_hermitian(5, rng)
    w, v = eigendecompose(a)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(5), atol=1e-12)
    for j in range(5):
        k = np.argmax(np.abs(v[:, j]) > 1e-12 * np.abs(v[:, j]).max())
        assert abs(v[k, j].imag) < 1e-14 and v[k, j].real > 0
    # deterministic: same input gives the same vectors
    np.testing.assert_array_equal(eigendecompose(a)[1], v)


def test_matrix_sqrt():
    rng = np.random.default_rng(2)
    a = random_pd(4, rng)
    s = matrix_sqrt(a).array
    np.testing.assert_allclose(s @ s, a, atol=1e-12)
    assert matrix_sqrt(np.diag([4.0, 0.0])).array[0, 0] == pytest.approx(2.0)
    matrix_sqrt(np.diag([1.0, -1e-11]))  # tolerated rounding
    with pytest.raises(NotPSDError):
        matrix_sqrt(np.diag([1.0, -1e-6]))


def test_arithmetic():
    m = HermitianMatrix(np.eye(2))
    assert (2 * m).trace() == 4
    assert (m + np.eye(2)).lambda_max() == 2
    assert (m - np.eye(2)).lambda_min() == 0


def test_input_covariance_feasibility():
    InputCovariance(np.diag([0.3, 0.7]))
    with pytest.raises(InvalidInputError):
        InputCovariance(np.diag([0.3, 0.8]))
    with pytest.raises(NotPSDError):
        InputCovariance(np.diag([1.5, -0.5]))
    q = InputCovariance.normalized(np.diag([2.0, -1e-3, 2.0]))
    np.testing.assert_allclose(q.eigenvalues, [0.5, 0.5, 0.0], atol=1e-15)
    b = InputCovariance.beamformer([1, 1j])
    assert b.trace() == pytest.approx(1) and b.eigenvalues[1] == pytest.approx(0, abs=1e-15)
    with pytest.raises(InvalidInputError):
        InputCovariance.beamformer([0, 0])


def test_random_covariance_is_feasible_and_seeded():
    q1 = InputCovariance.random(4, 5)
    q2 = InputCovariance.random(4, 5)
    np.testing.assert_array_equal(q1.array, q2.array)
    assert q1.trace() == pytest.approx(1, abs=1e-12) and q1.lambda_min() > 0


def test_scenario_validation():
    s = Scenario.statistical(np.eye(2), 0.5 * np.eye(2), 10.0)
    assert s.mode is Mode.STATISTICAL and s.n_t == 2
    np.testing.assert_allclose(s.sigma_e_sqrt @ s.sigma_e_sqrt, s.sigma_e.array, atol=1e-14)
    f = Scenario.full_csi([1, 1j], np.eye(2), 3.0)
    assert f.mode is Mode.FULL_CSI and f.sigma_r.trace() == 2
    assert f.with_rho(7.0).rho == 7.0
    with pytest.raises(InvalidInputError):
        Scenario.statistical(np.eye(2), np.eye(3), 1.0)
    with pytest.raises(InvalidInputError):
        Scenario.statistical(np.eye(2), np.diag([1.0, 0.0]), 1.0)
    with pytest.raises(InvalidInputError):
        Scenario.statistical(np.eye(2), np.eye(2), 0.0)
    with pytest.raises(InvalidInputError):
        Scenario(rho=1.0, mode="full_csi", sigma_r=np.eye(2), sigma_e=np.eye(2))
    with pytest.raises(InvalidInputError):
        Scenario(rho=1.0, mode="statistical", sigma_r=np.eye(2), sigma_e=np.eye(2), h_r=[1, 0])
    with pytest.raises(InvalidInputError):
        Scenario.full_csi([1, 0, 0], np.eye(2), 1.0)


def test_snr_conversion():
    assert snr_db_to_rho(10) == pytest.approx(10.0)
    assert snr_db_to_rho(0) == 1.0
    assert snr_db_to_rho(-10) == pytest.approx(0.1)


def test_jakes_structure():
    m = jakes_covariance(5, 0.4, scale=0.7).array
    np.testing.assert_allclose(np.diag(m), 0.7)
    np.testing.assert_allclose(m, m.T)
    for k in range(5):
        np.testing.assert_allclose(np.diag(m, k), np.diag(m, k)[0])
    np.testing.assert_allclose(jakes_covariance(3, 0.0).array, np.ones((3, 3)))
    with pytest.raises(InvalidInputError):
        jakes_covariance(0, 0.3)
    with pytest.raises(InvalidInputError):
        jakes_covariance(3, -0.1)


def test_jakes_is_psd_without_warnings():
    # J0 is a positive-definite function, so no parameter choice should trigger the guard
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for n in (1, 2, 4, 8):
            for phi in (0.0, 0.1, 0.3, 0.5, 0.9, 2.3, 7.0):
                assert jakes_covariance(n, phi).lambda_min() > -1e-12


def test_complex_gaussian_sampler_moments():
    z = sample_standard_complex_gaussian(3, 42, size=200000)
    assert z.shape == (200000, 3)
    cov = z.T @ z.conj() / z.shape[0]
    np.testing.assert_allclose(cov, np.eye(3), atol=0.01)
    np.testing.assert_allclose(np.mean(z.real ** 2), 0.5, atol=0.005)
    pseudo = z.T @ z / z.shape[0]
    np.testing.assert_allclose(pseudo, 0, atol=0.01)
    np.testing.assert_array_equal(sample_standard_complex_gaussian(3, 42), sample_standard_complex_gaussian(3, 42))
    rng = as_generator(1)
    assert as_generator(rng) is rng
