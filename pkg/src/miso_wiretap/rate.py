"""Ergodic secrecy rate evaluation.

For ``z ~ CN(0, R)`` the expectation ``E log(1 + rho z^H Q z)`` depends only
on the nonzero eigenvalues ``d_1 > ... > d_M`` of ``R^{1/2} Q R^{1/2}``:

    E log(1 + rho z^H Q z) = sum_j F1(rho d_j) / prod_{i != j} (1 - d_i / d_j)

The partial-fraction sum is exact for distinct ``d``. When two eigenvalues
are closer than ``1e-6 * d_1`` the same quantity is integrated numerically
from

    integral_0^inf exp(-t) (1 - 1 / prod_i (1 + t rho d_i)) / t dt

All rates are in nats.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import kernels
from .errors import DomainError, InvalidInputError
from .hermitian import (HermitianMatrix, InputCovariance, Mode, as_generator, matrix_sqrt,
                        sample_standard_complex_gaussian)

#: eigenvalue d_i counts as nonzero iff d_i > RANK_TOL * d_1
RANK_TOL = 1e-12
#: partial fractions are abandoned when min gap / d_1 falls below this
CLUSTER_TOL = 1e-6
#: quadrature upper limit, exp(-T) < 1e-16
QUAD_T = 37.0
QUAD_EPSABS = 1e-12
#: beyond this many nonzero eigenvalues the closed form is not attempted
MAX_CLOSED_FORM_RANK = 64


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class RateBreakdown:
    """Secrecy rate split into its legitimate and eavesdropper terms (nats)."""

    legit_term: float
    eaves_term: float
    secrecy_rate: float
    method: Method

    @classmethod
    def from_terms(cls, legit, eaves, method):
        return cls(float(legit), float(eaves), float(legit) - float(eaves), Method(method))

    @property
    def secrecy_rate_bits(self):
        return self.secrecy_rate / math.log(2.0)


class QuadraticSpectrum(NamedTuple):
    """Spectrum of ``R^{1/2} Q R^{1/2}``.

    ``d`` holds the ``M`` nonzero eigenvalues (decreasing), ``u`` all ``n``
    eigenvectors in the same order, ``clustered`` whether any two nonzero
    eigenvalues are closer than ``CLUSTER_TOL * d_1`` (or ``M`` exceeds
    ``MAX_CLOSED_FORM_RANK``), i.e. whether quadrature must be used.
    """

    d: np.ndarray
    u: np.ndarray
    n: int
    clustered: bool


def quadratic_spectrum(r_sqrt, q):
    """Eigen-structure of ``r_sqrt @ q @ r_sqrt`` (both given as arrays)."""
    b = HermitianMatrix(r_sqrt @ q @ r_sqrt)
    w, u = b.eigh()
    n = w.size
    if w[0] <= 0:
        return QuadraticSpectrum(np.empty(0), u, n, False)
    m = int(np.count_nonzero(w > RANK_TOL * w[0]))
    d = np.array(w[:m])
    clustered = m > MAX_CLOSED_FORM_RANK or (m > 1 and float(np.min(-np.diff(d))) < CLUSTER_TOL * d[0])
    return QuadraticSpectrum(d, u, n, clustered)


def _log_integrand(t, a):
    if t == 0.0:
        return float(a.sum())
    return -math.expm1(-float(np.log1p(t * a).sum())) / t * math.exp(-t)


def _breakpoints(a):
    pts = sorted({float(1.0 / v) for v in a if 0 < 1.0 / v < QUAD_T})
    return pts or None


def expected_log_quadrature(d, rho):
    """Numerical ``E log(1 + rho z^H Q z)`` from the eigenvalues ``d``."""
    a = rho * np.asarray(d, dtype=float)
    if a.size == 0:
        return 0.0
    val, _ = integrate.quad(_log_integrand, 0.0, QUAD_T, args=(a,), points=_breakpoints(a),
                            epsabs=QUAD_EPSABS, epsrel=1e-12, limit=500)
    return val


def expected_log_from_spectrum(spec, rho):
    """Return ``(value, method)`` for a :class:`QuadraticSpectrum`."""
    if spec.d.size == 0:
        return 0.0, Method.CLOSED_FORM
    if spec.clustered:
        return max(0.0, expected_log_quadrature(spec.d, rho)), Method.QUADRATURE
    return max(0.0, kernels.impl.expected_log_eigs(spec.d, rho)), Method.CLOSED_FORM


def _check_rho(rho):
    if not np.isfinite(rho) or rho <= 0:
        raise DomainError(f"rho must be positive, got {rho!r}")


def expected_log_quadratic(r, q, rho):
    """``E log(1 + rho z^H Q z)`` for ``z ~ CN(0, R)``, in nats.

    Parameters
    ----------
    r : HermitianMatrix or array_like
        PSD channel covariance (rank deficiency allowed).
    q : InputCovariance or array_like
    rho : float
        Positive SNR.
    """
    _check_rho(rho)
    q = InputCovariance(q)
    spec = quadratic_spectrum(matrix_sqrt(r).array, q.array)
    return expected_log_from_spectrum(spec, rho)[0]


def _legit_quadratic(h, q):
    return float(np.vdot(h, q @ h).real)


def ergodic_secrecy_rate(s, q):
    """Ergodic secrecy rate of scenario ``s`` at input covariance ``q``.

    Statistical mode averages both terms; full-CSI mode uses the known
    ``h_r`` for the legitimate term.
    """
    q = InputCovariance(q)
    qa = q.array
    eaves, m_e = expected_log_from_spectrum(quadratic_spectrum(s.sigma_e_sqrt, qa), s.rho)
    if s.mode is Mode.STATISTICAL:
        legit, m_r = expected_log_from_spectrum(quadratic_spectrum(s.sigma_r_sqrt, qa), s.rho)
    else:
        legit, m_r = math.log1p(s.rho * _legit_quadratic(s.h_r, qa)), Method.CLOSED_FORM
    method = Method.QUADRATURE if Method.QUADRATURE in (m_e, m_r) else Method.CLOSED_FORM
    return RateBreakdown.from_terms(legit, eaves, method)


def secrecy_rate(s, q):
    """Shorthand for ``ergodic_secrecy_rate(s, q).secrecy_rate``."""
    return ergodic_secrecy_rate(s, q).secrecy_rate


class MonteCarloEstimate(NamedTuple):
    estimate: float
    std_error: float


def monte_carlo_rate(s, q, n_samples, seed=None, chunk=1 << 16):
    """Sample-mean estimate of the secrecy rate with its standard error.

    Channels are drawn as ``h = Sigma^{1/2} h_w`` with ``h_w ~ CN(0, I)``;
    in statistical mode the legitimate and eavesdropper channels share the
    same ``h_w`` draw (the rate only involves their marginals), which keeps
    the per-sample difference low-variance. The standard error is the
    sample standard deviation over ``sqrt(n_samples)``.
    """
    n_samples = int(n_samples)
    if n_samples < 1000:
        raise InvalidInputError("monte_carlo_rate needs n_samples >= 1000")
    q = InputCovariance(q).array
    rng = as_generator(seed)
    n = s.n_t
    se_t = s.sigma_e_sqrt.T
    sr_t = s.sigma_r_sqrt.T
    legit_const = None
    if s.mode is Mode.FULL_CSI:
        legit_const = math.log1p(s.rho * _legit_quadratic(s.h_r, q))
    q_t = q.T
    count = 0
    mean = 0.0
    m2 = 0.0
    while count < n_samples:
        b = min(chunk, n_samples - count)
        hw = sample_standard_complex_gaussian(n, rng, size=b)
        he = hw @ se_t
        vals = -np.log1p(s.rho * np.einsum("ij,ij->i", he.conj(), he @ q_t).real)
        if legit_const is None:
            hr = hw @ sr_t
            vals += np.log1p(s.rho * np.einsum("ij,ij->i", hr.conj(), hr @ q_t).real)
        else:
            vals += legit_const
        # Chan et al. pairwise merge of running mean / sum of squares
        bm = float(vals.mean())
        bm2 = float(((vals - bm) ** 2).sum())
        tot = count + b
        delta = bm - mean
        mean += delta * b / tot
        m2 += bm2 + delta * delta * count * b / tot
        count = tot
    std = math.sqrt(m2 / (count - 1))
    return MonteCarloEstimate(mean, std / math.sqrt(count))
