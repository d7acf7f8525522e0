"""Rank-one reduction when the legitimate channel is known.

With ``h_R`` known the optimal covariance is a beamformer ``u u^H``. Writing
``z = |u^H h_R|^2 / ||h_R||^2`` for its alignment with ``h_R``, the rate is

    C_s(z) = log(1 + rho ||h_R||^2 z) - F1(rho phi(z)),

where ``phi(z)`` is the smallest ``u^H Sigma_E u`` over unit ``u`` with that
alignment. ``phi`` is computed exactly: with ``e1 = h_R / ||h_R||`` and
``B`` an orthonormal basis of its complement, ``u = sqrt(z) e1 +
sqrt(1 - z) B w`` turns it into a quadratic minimisation over the unit
sphere, solved through its secular equation.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from .errors import DomainError, InvalidInputError
from .hermitian import HermitianMatrix, InputCovariance, Mode, as_complex_vector
from .special import f1

#: bisection stops when the bracket is this small relative to its scale
SECULAR_RTOL = 1e-12
#: eigenvalues within this (relative to ||C||) of lambda_min form the bottom eigenspace
HARD_CASE_TOL = 1e-10
DEFAULT_GRID_STEP = 0.01
REFINE_XTOL = 1e-4


def _secular_norm2(ct2, lam, mu):
    return float(np.sum(ct2 / (lam - mu) ** 2))


def min_quadratic_on_sphere(c_mat, c):
    """Minimise ``w^H C w + 2 Re(c^H w)`` subject to ``||w|| = 1``.

    Parameters
    ----------
    c_mat : HermitianMatrix or array_like, shape (m, m)
    c : array_like, shape (m,)

    Returns
    -------
    w : ndarray of complex
        A minimiser.
    value : float
        The minimum.
    mu : float
        Lagrange multiplier, ``(C - mu I) w = -c`` with ``mu <= lambda_min(C)``.
    """
    cm = HermitianMatrix(c_mat)
    c = np.asarray(c, dtype=complex)
    if c.shape != (cm.n,):
        raise InvalidInputError("dimension of c does not match C")
    lam, v = cm.eigh()
    lam_min = float(lam[-1])
    ct = v.conj().T @ c
    ct2 = np.abs(ct) ** 2
    cnorm = math.sqrt(float(ct2.sum()))
    scale = max(1.0, float(np.abs(lam).max()), cnorm)
    bottom = lam - lam_min <= HARD_CASE_TOL * scale

    if cnorm == 0.0:
        w = v[:, -1].copy()
        return w, lam_min, lam_min

    hard = float(ct2[bottom].sum()) <= (HARD_CASE_TOL * scale) ** 2
    if hard:
        rest = ~bottom
        wt = np.zeros_like(ct)
        wt[rest] = -ct[rest] / (lam[rest] - lam_min)
        r2 = float(np.sum(np.abs(wt) ** 2))
        if r2 <= 1.0:
            # multiplier sits at lambda_min; fill up with a bottom eigenvector
            idx = int(np.flatnonzero(bottom)[-1])
            wt[idx] = math.sqrt(1.0 - r2)
            w = v @ wt
            value = float(np.vdot(w, cm.array @ w).real + 2.0 * np.vdot(c, w).real)
            return w, value, lam_min
        # otherwise the root is strictly below lambda_min after all
        ct2 = np.where(bottom, 0.0, ct2)

    lo, hi = lam_min - cnorm, lam_min
    # norm(lo) <= 1 < norm(mu) as mu -> lambda_min
    while hi - lo > SECULAR_RTOL * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _secular_norm2(ct2, lam, mid) > 1.0:
            hi = mid
        else:
            lo = mid
    mu = lo
    wt = -ct / (lam - mu)
    if hard:
        wt = np.where(bottom, 0.0, wt)
    w = v @ wt
    w /= np.linalg.norm(w)
    value = float(np.vdot(w, cm.array @ w).real + 2.0 * np.vdot(c, w).real)
    return w, value, mu


def complement_basis(h):
    """Orthonormal basis (columns) of the orthogonal complement of ``h``."""
    h = as_complex_vector(h, "h")
    return linalg.null_space(h.conj()[None, :])


@dataclass(frozen=True)
class PhiSolution:
    """Minimiser of ``u^H Sigma_E u`` at alignment ``z``."""

    z: float
    value: float
    u: np.ndarray


def _check_h(h_r):
    h = as_complex_vector(h_r, "h_R")
    nh = float(np.linalg.norm(h))
    if nh == 0.0:
        raise InvalidInputError("h_R must be nonzero")
    return h, nh


class _PhiSolver:
    # reuses the basis and compressed matrices across many z values

    def __init__(self, h_r, sigma_e):
        self.h, nh = _check_h(h_r)
        self.sigma = HermitianMatrix(sigma_e).array
        if self.sigma.shape[0] != self.h.size:
            raise InvalidInputError("h_R and sigma_E dimensions differ")
        self.e1 = self.h / nh
        self.b = complement_basis(self.h)
        self.a = float(np.vdot(self.e1, self.sigma @ self.e1).real)
        self.c_mat = self.b.conj().T @ self.sigma @ self.b
        self.g = self.b.conj().T @ (self.sigma @ self.e1)

    def __call__(self, z):
        z = float(z)
        if not 0.0 <= z <= 1.0:
            raise DomainError(f"z must lie in [0, 1], got {z!r}")
        if z == 1.0 or self.b.shape[1] == 0:
            if z != 1.0:
                raise DomainError("with a single antenna only z = 1 is feasible")
            return PhiSolution(1.0, self.a, self.e1.copy())
        c = math.sqrt(z / (1.0 - z)) * self.g
        w, _, _ = min_quadratic_on_sphere(self.c_mat, c)
        u = math.sqrt(z) * self.e1 + math.sqrt(1.0 - z) * (self.b @ w)
        u /= np.linalg.norm(u)
        value = float(np.vdot(u, self.sigma @ u).real)
        return PhiSolution(z, value, u)


def phi(z, h_r, sigma_e):
    """Smallest ``u^H Sigma_E u`` over unit ``u`` with ``|u^H h_R|^2 = z ||h_R||^2``.

    The returned ``u`` has a real non-negative component along ``h_R``.
    """
    return _PhiSolver(h_r, sigma_e)(z)


@dataclass(frozen=True)
class ScanResult:
    """Rate along the alignment grid and its maximiser.

    ``grid`` holds ``(z, C_s(z))`` pairs and ``phi_values`` the matching
    ``phi(z)``. ``best_*`` describe the maximiser, refined off-grid when
    ``refined`` is set.
    """

    grid: tuple
    phi_values: tuple
    best_z: float
    best_rate: float
    best_u: np.ndarray
    refined: bool = False

    @property
    def best_q(self):
        return InputCovariance.beamformer(self.best_u)


def default_grid(step=DEFAULT_GRID_STEP):
    """``0, step, 2 step, ..., 1`` (``step`` must divide 1 up to rounding)."""
    if not 0 < step <= 1:
        raise DomainError(f"grid step must lie in (0, 1], got {step!r}")
    return np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)


def scan_cs_z(s, grid=None, refine=True):
    """Evaluate ``C_s(z)`` on ``grid`` and locate the best beamformer.

    Parameters
    ----------
    s : Scenario
        Must be in full-CSI mode.
    grid : sequence of float, optional
        Alignment values in ``[0, 1]``; defaults to ``0:0.01:1``.
    refine : bool
        Golden-section search between the neighbours of an interior grid
        maximiser, to ``1e-4`` in ``z``.

    Returns
    -------
    ScanResult
    """
    if s.mode is not Mode.FULL_CSI:
        raise InvalidInputError("scan_cs_z needs a full-CSI scenario")
    zs = default_grid() if grid is None else np.asarray(grid, dtype=float).ravel()
    if zs.size == 0:
        raise DomainError("empty z grid")
    solver = _PhiSolver(s.h_r, s.sigma_e)
    gain = s.rho * float(np.vdot(s.h_r, s.h_r).real)

    def evaluate(z):
        sol = solver(z)
        return math.log1p(gain * sol.z) - float(f1(s.rho * sol.value)), sol

    rates, sols = [], []
    for z in zs:
        r, sol = evaluate(z)
        rates.append(r)
        sols.append(sol)
    k = int(np.argmax(rates))
    best_z, best_rate, best_u = float(zs[k]), rates[k], sols[k].u
    refined = False
    if refine and 0 < k < zs.size - 1 and rates[k] > max(rates[k - 1], rates[k + 1]):
        res = optimize.minimize_scalar(lambda z: -evaluate(z)[0], method="golden",
                                       bracket=(zs[k - 1], zs[k], zs[k + 1]),
                                       options={"xtol": REFINE_XTOL})
        if zs[k - 1] <= res.x <= zs[k + 1] and -res.fun > best_rate:
            best_rate, sol = evaluate(res.x)
            best_z, best_u, refined = float(res.x), sol.u, True
    return ScanResult(tuple(zip(map(float, zs), rates)), tuple(x.value for x in sols),
                      best_z, float(best_rate), best_u, refined)


def trivial_sigma_e_optimum(h_r, alpha, rho):
    """Optimum for ``Sigma_E = alpha I``: beamform along ``h_R``.

    Returns
    -------
    q : InputCovariance
        ``h_R h_R^H / ||h_R||^2``.
    rate : float
        ``log(1 + rho ||h_R||^2) - F1(rho alpha)``; may be negative.
    """
    h, nh = _check_h(h_r)
    if not alpha > 0 or not rho > 0:
        raise DomainError("alpha and rho must be positive")
    return InputCovariance.beamformer(h), math.log1p(rho * nh * nh) - float(f1(rho * alpha))
