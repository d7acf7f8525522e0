"""Hermitian linear algebra, channel statistics and problem instances.

Every matrix in the model (channel covariances, the input covariance, the
gradient) is complex Hermitian. :class:`HermitianMatrix` stores one
immutably together with a lazily computed, deterministic spectral
decomposition: eigenvalues in decreasing order and eigenvectors whose first
non-negligible component is real and positive.
"""

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NotPSDError
from .special import bessel_j0

#: eigenvalues in [-PSD_TOL, 0) are treated as zero
PSD_TOL = 1e-10
HERMITIAN_RTOL = 1e-12
TRACE_TOL = 1e-10


def as_complex_vector(v, name="vector"):
    """Validate and return ``v`` as a 1-D complex array (copy)."""
    arr = np.array(v, dtype=complex)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidInputError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def _fix_phases(vecs):
    # make the first component with |v| above 1e-12 * max|v| real positive
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        idx = int(np.argmax(mags > 1e-12 * mags.max()))
        ph = col[idx] / mags[idx]
        out[:, j] = col * np.conj(ph)
    return out


class HermitianMatrix:
    """Immutable square complex Hermitian matrix.

    Parameters
    ----------
    data : array_like, shape (n, n)
        Entries; must be conjugate-symmetric to ``1e-12`` relative. The
        stored matrix is the exact Hermitian part ``(A + A^H) / 2``.
    """

    __slots__ = ("_a", "_spec")

    def __init__(self, data):
        if isinstance(data, HermitianMatrix):
            self._a = data._a
            self._spec = data._spec
            return
        a = np.array(data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("matrix has non-finite entries")
        scale = max(1.0, float(np.abs(a).max()))
        if np.abs(a - a.conj().T).max() > HERMITIAN_RTOL * scale:
            raise InvalidInputError("matrix is not Hermitian")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        self._a = a
        self._spec = None

    @property
    def array(self):
        """Read-only ``numpy`` view of the entries."""
        return self._a

    @property
    def n(self):
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._a, dtype=dtype) if dtype else self._a

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self._a, precision=4)})"

    def eigh(self):
        """Return ``(eigenvalues, eigenvectors)``, eigenvalues decreasing."""
        if self._spec is None:
            w, v = np.linalg.eigh(self._a)
            order = np.argsort(-w, kind="stable")
            w = np.ascontiguousarray(w[order])
            v = _fix_phases(v[:, order])
            w.setflags(write=False)
            v.setflags(write=False)
            self._spec = (w, v)
        return self._spec

    @property
    def eigenvalues(self):
        return self.eigh()[0]

    def lambda_max(self):
        return float(self.eigenvalues[0])

    def lambda_min(self):
        return float(self.eigenvalues[-1])

    def trace(self):
        return float(np.trace(self._a).real)

    def sqrt(self):
        return matrix_sqrt(self)

    def __add__(self, other):
        return HermitianMatrix(self._a + np.asarray(other))

    def __sub__(self, other):
        return HermitianMatrix(self._a - np.asarray(other))

    def __mul__(self, c):
        if not np.isrealobj(c):
            return NotImplemented
        return HermitianMatrix(float(c) * self._a)

    __rmul__ = __mul__


def eigendecompose(m):
    """Spectral decomposition ``m = V diag(w) V^H`` with ``w`` decreasing.

    Returns
    -------
    w : ndarray of float, shape (n,)
    v : ndarray of complex, shape (n, n), unitary
    """
    return HermitianMatrix(m).eigh()


def matrix_sqrt(m):
    """Principal square root of a PSD Hermitian matrix.

    Raises
    ------
    NotPSDError
        If an eigenvalue is below ``-1e-10``.
    """
    m = HermitianMatrix(m)
    w, v = m.eigh()
    if w[-1] < -PSD_TOL:
        raise NotPSDError(f"matrix has eigenvalue {w[-1]:.3e} < 0")
    s = np.sqrt(np.clip(w, 0.0, None))
    return HermitianMatrix((v * s) @ v.conj().T)


class InputCovariance(HermitianMatrix):
    """Transmit covariance ``Q``: PSD with unit trace."""

    __slots__ = ()

    def __init__(self, data):
        super().__init__(data)
        if abs(self.trace() - 1.0) > TRACE_TOL:
            raise InvalidInputError(f"input covariance must have unit trace, got {self.trace():.12g}")
        if self.lambda_min() < -PSD_TOL:
            raise NotPSDError(f"input covariance has eigenvalue {self.lambda_min():.3e}")

    @classmethod
    def normalized(cls, data):
        """Project a PSD-ish matrix onto the feasible set by clipping and rescaling."""
        m = HermitianMatrix(data)
        w, v = m.eigh()
        w = np.clip(w, 0.0, None)
        if w.sum() <= 0:
            raise InvalidInputError("matrix has no positive part to normalise")
        return cls((v * (w / w.sum())) @ v.conj().T)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n) / n)

    @classmethod
    def beamformer(cls, u):
        """Rank-one ``u u^H / ||u||^2``."""
        u = as_complex_vector(u, "beamformer")
        nrm2 = float(np.vdot(u, u).real)
        if nrm2 == 0:
            raise InvalidInputError("beamformer must be nonzero")
        return cls(np.outer(u, u.conj()) / nrm2)

    @classmethod
    def random(cls, n, seed=None):
        """``G G^H / Tr(G G^H)`` with ``G`` i.i.d. standard complex Gaussian."""
        rng = as_generator(seed)
        g = sample_standard_complex_gaussian(n, rng, size=n).T
        gg = g @ g.conj().T
        return cls(gg / np.trace(gg).real)


class Mode(str, enum.Enum):
    """What the transmitter knows about the legitimate channel."""

    STATISTICAL = "statistical"
    FULL_CSI = "full_csi"


@dataclass(frozen=True, eq=False)
class Scenario:
    """A complete problem instance.

    Attributes
    ----------
    rho : float
        Linear SNR ``E_s / sigma_v^2``.
    mode : Mode
    sigma_r, sigma_e : HermitianMatrix
        Positive definite covariances of the legitimate and eavesdropper
        channels. ``sigma_r`` is only used for sampling in full-CSI mode.
    h_r : ndarray or None
        Legitimate channel realisation; present iff ``mode`` is full CSI.
    """

    rho: float
    mode: Mode
    sigma_r: HermitianMatrix
    sigma_e: HermitianMatrix
    h_r: np.ndarray = field(default=None)
    sigma_r_sqrt: np.ndarray = field(init=False, repr=False)
    sigma_e_sqrt: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rho = float(self.rho)
        if not np.isfinite(rho) or rho <= 0:
            raise InvalidInputError(f"rho must be positive, got {self.rho!r}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "mode", Mode(self.mode))
        sr = HermitianMatrix(self.sigma_r)
        se = HermitianMatrix(self.sigma_e)
        if sr.n != se.n:
            raise InvalidInputError("sigma_r and sigma_e dimensions differ")
        for name, m in (("sigma_r", sr), ("sigma_e", se)):
            if m.lambda_min() <= 1e-12:
                raise InvalidInputError(f"{name} must be positive definite (lambda_min={m.lambda_min():.3e})")
        object.__setattr__(self, "sigma_r", sr)
        object.__setattr__(self, "sigma_e", se)
        object.__setattr__(self, "sigma_r_sqrt", matrix_sqrt(sr).array)
        object.__setattr__(self, "sigma_e_sqrt", matrix_sqrt(se).array)
        if self.mode is Mode.FULL_CSI:
            if self.h_r is None:
                raise InvalidInputError("full-CSI scenario needs h_r")
            h = as_complex_vector(self.h_r, "h_r")
            if h.size != sr.n:
                raise InvalidInputError("h_r dimension does not match covariances")
            object.__setattr__(self, "h_r", h)
        elif self.h_r is not None:
            raise InvalidInputError("statistical scenario must not carry h_r")

    @property
    def n_t(self):
        return self.sigma_r.n

    @classmethod
    def statistical(cls, sigma_r, sigma_e, rho):
        return cls(rho=rho, mode=Mode.STATISTICAL, sigma_r=sigma_r, sigma_e=sigma_e)

    @classmethod
    def full_csi(cls, h_r, sigma_e, rho, sigma_r=None):
        h = as_complex_vector(h_r, "h_r")
        if sigma_r is None:
            sigma_r = np.eye(h.size)
        return cls(rho=rho, mode=Mode.FULL_CSI, sigma_r=sigma_r, sigma_e=sigma_e, h_r=h)

    def with_rho(self, rho):
        return Scenario(rho=rho, mode=self.mode, sigma_r=self.sigma_r,
                        sigma_e=self.sigma_e, h_r=self.h_r)


def snr_db_to_rho(snr_db):
    return 10.0 ** (float(snr_db) / 10.0)


def jakes_covariance(n_t, phi, d_over_lambda=0.5, scale=1.0):
    """Jakes correlation matrix ``scale * J0(phi |p-q| 2 pi d/lambda)``.

    The result is real symmetric Toeplitz with ``scale`` on the diagonal.
    A :class:`RuntimeWarning` is issued when the model parameters give a
    matrix with an eigenvalue below ``-1e-10 * scale``; the matrix is
    returned regardless.
    """
    if int(n_t) != n_t or n_t < 1:
        raise InvalidInputError(f"n_t must be a positive integer, got {n_t!r}")
    if phi < 0 or scale <= 0 or not np.isfinite([phi, d_over_lambda, scale]).all():
        raise InvalidInputError("need phi >= 0, scale > 0 and finite parameters")
    n_t = int(n_t)
    lags = np.arange(n_t)
    col = scale * np.asarray(bessel_j0(phi * lags * 2.0 * np.pi * d_over_lambda), dtype=float)
    toeplitz = col[np.abs(lags[:, None] - lags[None, :])]
    m = HermitianMatrix(toeplitz)
    if m.lambda_min() < -PSD_TOL * scale:
        warnings.warn(f"Jakes covariance has lambda_min={m.lambda_min():.3e}", RuntimeWarning,
                      stacklevel=2)
    return m


def as_generator(seed=None):
    """Return a ``numpy`` PCG64 generator for ``seed`` (int, None or Generator)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def sample_standard_complex_gaussian(n, seed=None, size=None):
    """Draw from ``CN(0, I_n)``.

    Real and imaginary parts are independent ``N(0, 1/2)``. With ``size``
    given, returns an array of shape ``(size, n)``.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    rng = as_generator(seed)
    shape = (n,) if size is None else (int(size), n)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)
