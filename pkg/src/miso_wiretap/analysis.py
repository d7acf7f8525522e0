"""Feasibility tests, SNR sensitivity, high-SNR limits and the ``Sigma_E = alpha I`` case.

Positivity tests
    A positive secrecy rate is achievable from statistics alone iff
    ``Sigma_R - Sigma_E`` has a positive eigenvalue; with ``h_R`` known, a
    positive eigenvalue of ``h_R h_R^H - Sigma_E`` is sufficient. In both
    cases the corresponding top eigenvector is a beamformer that attains a
    positive rate.

High SNR
    The optimum becomes a beamformer. With ``h_R`` known the rate tends to
    ``log(h_R^H Sigma_E^{-1} h_R) + gamma``; with statistics only it is
    bounded by ``log lambda_max(Sigma_R^{1/2} Sigma_E^{-1} Sigma_R^{1/2})``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .errors import DomainError, InvalidInputError, UnsupportedSpectrumError
from .hermitian import HermitianMatrix, InputCovariance, Mode, Scenario, as_complex_vector
from .kkt import compute_theta
from .rate import secrecy_rate
from .special import EULER_GAMMA

#: lambda_max must exceed this times the covariance scale to count as positive
POSITIVITY_RTOL = 1e-12
#: relative eigenvalue gap below which sigma_R is treated as degenerate
SIMPLE_SPECTRUM_RTOL = 1e-8

ARMIJO_STEP = 0.1
ARMIJO_SHRINK = 0.5
ARMIJO_SLOPE = 1e-4
DIAG_RATE_TOL = 1e-9
DIAG_MAX_ITERS = 10000


class Feasibility(NamedTuple):
    """Outcome of a positivity test; ``witness`` is ``None`` when infeasible."""

    feasible: bool
    witness: object
    lambda_max: float


def _positive_top(diff, scale):
    w, v = HermitianMatrix(diff).eigh()
    lam = float(w[0])
    if lam > POSITIVITY_RTOL * scale:
        return Feasibility(True, v[:, 0].copy(), lam)
    return Feasibility(False, None, lam)


def _scale(*ms):
    return max(1.0, *(float(np.abs(np.asarray(m)).max()) for m in ms))


def positivity_statistical(sigma_r, sigma_e):
    """Test whether some ``Q`` gives a positive rate from channel statistics.

    Returns
    -------
    Feasibility
        ``feasible`` iff ``lambda_max(Sigma_R - Sigma_E) > 0``; the witness is
        the corresponding unit eigenvector.
    """
    sr, se = HermitianMatrix(sigma_r), HermitianMatrix(sigma_e)
    if sr.n != se.n:
        raise InvalidInputError("dimension mismatch")
    return _positive_top(sr.array - se.array, _scale(sr.array, se.array))


def positivity_full_csi(h_r, sigma_e):
    """Sufficient test for a positive rate when ``h_R`` is known.

    ``feasible`` iff ``lambda_max(h_R h_R^H - Sigma_E) > 0``. A negative
    answer does not prove that no ``Q`` achieves a positive rate.
    """
    h = as_complex_vector(h_r, "h_R")
    se = HermitianMatrix(sigma_e)
    if se.n != h.size:
        raise InvalidInputError("dimension mismatch")
    hh = np.outer(h, h.conj())
    return _positive_top(hh - se.array, _scale(hh, se.array))


def rate_snr_derivative(s, q):
    """``dC_s/drho = Tr(Theta Q) / rho`` at fixed ``Q``."""
    return compute_theta(s, q).trace_q_theta / s.rho


@dataclass(frozen=True)
class HighSnrResult:
    beamformer: np.ndarray
    asymptote: float
    mode: Mode

    @property
    def q(self):
        return InputCovariance.beamformer(self.beamformer)


def high_snr_full_csi(h_r, sigma_e):
    """High-SNR optimal beamformer ``Sigma_E^{-1} h_R`` (unit norm) and rate limit."""
    h = as_complex_vector(h_r, "h_R")
    if not np.any(h):
        raise InvalidInputError("h_R must be nonzero")
    se = HermitianMatrix(sigma_e).array
    x = linalg.solve(se, h, assume_a="her")
    u = x / np.linalg.norm(x)
    return HighSnrResult(u, math.log(float(np.vdot(h, x).real)) + EULER_GAMMA, Mode.FULL_CSI)


def high_snr_statistical(sigma_r, sigma_e):
    """Top generalised eigenvector of ``(Sigma_R, Sigma_E)`` and the rate bound.

    The bound ``log lambda_max`` uses the largest generalised eigenvalue,
    which equals ``lambda_max(Sigma_R^{1/2} Sigma_E^{-1} Sigma_R^{1/2})``.
    """
    sr, se = HermitianMatrix(sigma_r).array, HermitianMatrix(sigma_e).array
    w, v = linalg.eigh(sr, se)
    lam = float(w[-1])
    if lam <= 0:
        raise DomainError("sigma_R must be positive definite")
    u = v[:, -1] / np.linalg.norm(v[:, -1])
    k = int(np.argmax(np.abs(u)))
    u = u * (abs(u[k]) / u[k])
    return HighSnrResult(u, math.log(lam), Mode.STATISTICAL)


@dataclass(frozen=True)
class DiagonalSolution:
    """Power allocation ``zeta`` over the eigenvectors of ``Sigma_R``."""

    zeta: np.ndarray
    rate: float
    q: InputCovariance
    iterations: int = 0


def project_simplex(x):
    """Euclidean projection onto ``{z >= 0, sum z = 1}`` (sort-based)."""
    x = np.asarray(x, dtype=float)
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, x.size + 1)
    r = int(np.nonzero(u - css / k > 0)[0][-1])
    return np.maximum(x - css[r] / (r + 1), 0.0)


def solve_diagonal_trivial_eaves(sigma_r, alpha, rho, zeta0=None):
    """Maximise the rate over diagonal ``Q`` in the eigenbasis of ``Sigma_R`` when ``Sigma_E = alpha I``.

    Projected gradient ascent over the simplex with Armijo backtracking;
    stops when an accepted step changes the rate by less than ``1e-9``.

    Raises
    ------
    UnsupportedSpectrumError
        If two eigenvalues of ``Sigma_R`` agree within ``1e-8`` relative.
    """
    sr = HermitianMatrix(sigma_r)
    if not alpha > 0 or not rho > 0:
        raise DomainError("alpha and rho must be positive")
    eta, v = sr.eigh()
    if sr.n > 1 and float(np.min(-np.diff(eta))) <= SIMPLE_SPECTRUM_RTOL * float(eta[0]):
        raise UnsupportedSpectrumError("sigma_R must have a simple spectrum")
    s = Scenario.statistical(sr, alpha * np.eye(sr.n), rho)

    def lift(zeta):
        q = (v * zeta) @ v.conj().T
        return InputCovariance(q / np.trace(q).real)

    zeta = np.full(sr.n, 1.0 / sr.n) if zeta0 is None else project_simplex(zeta0)
    q = lift(zeta)
    f = secrecy_rate(s, q)
    it = 0
    while it < DIAG_MAX_ITERS and sr.n > 1:
        it += 1
        theta = compute_theta(s, q).matrix.array
        g = np.einsum("ij,ik,kj->j", v.conj(), theta, v).real
        t = ARMIJO_STEP
        while True:
            cand = project_simplex(zeta + t * g)
            qc = lift(cand)
            fc = secrecy_rate(s, qc)
            if fc >= f + ARMIJO_SLOPE * float(g @ (cand - zeta)) or t < 1e-12:
                break
            t *= ARMIJO_SHRINK
        done = abs(fc - f) < DIAG_RATE_TOL
        if fc >= f:
            zeta, q, f = cand, qc, fc
        if done:
            break
    return DiagonalSolution(zeta, f, q, it)
