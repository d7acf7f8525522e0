"""Gradient of the secrecy rate, stationarity conditions and the fixed-point solver.

The gradient of ``C_s`` with respect to ``Q`` is the Hermitian matrix

    Theta = E{rho h_R h_R^H / (1 + rho h_R^H Q h_R)} - E{rho h_E h_E^H / (1 + rho h_E^H Q h_E)}

(the first expectation is dropped when ``h_R`` is known). A feasible ``Q``
is a KKT point iff ``Q Theta = Theta Q = Tr(Q Theta) Q`` and
``lambda_max(Theta) = Tr(Q Theta)``. The solver iterates

    Q <- K^{1/2} Q K^{1/2} / Tr(K^{1/2} Q K^{1/2}),   K = Theta + gamma I,

with ``gamma = (1 + beta) max(0, -lambda_min(Theta))`` so that ``K`` is
positive definite and every iterate stays feasible.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import kernels
from .errors import DomainError, InvalidInputError
from .hermitian import HermitianMatrix, InputCovariance, Mode, as_generator, matrix_sqrt
from .rate import QUAD_EPSABS, QUAD_T, _breakpoints, quadratic_spectrum, secrecy_rate

DEFAULT_BETA = 1.0
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITERS = 300
#: KKT residual acceptance, relative to ||Theta||_F
TOL_KKT = 1e-5
#: ||Theta||_F below this means the rate is locally flat (e.g. Sigma_R == Sigma_E)
DEGENERATE_TOL = 1e-12
#: the partial-fraction weights lose ~eps/gap^2, so Theta switches to
#: quadrature at a wider relative gap than the rate does
RESOLVENT_CLUSTER_TOL = 1e-3


def _weights_quadrature(a_all, idx):
    # E{|x_k|^2 / (1 + sum a_i |x_i|^2)} = int e^{-s} / ((1 + s a_k) prod_i (1 + s a_i)) ds
    a = a_all[a_all > 0]
    a_k = a_all[idx] if idx is not None else 0.0

    def integrand(s):
        return math.exp(-s - float(np.log1p(s * a).sum())) / (1.0 + s * a_k)

    val, _ = integrate.quad(integrand, 0.0, QUAD_T, points=_breakpoints(a),
                            epsabs=QUAD_EPSABS, epsrel=1e-12, limit=500)
    return val


def _resolvent_from_sqrt(r_sqrt, q, rho):
    spec = quadratic_spectrum(r_sqrt, q)
    n = spec.n
    m = spec.d.size
    if m == 0:
        # Q annihilates R: the expectation is rho * R itself
        return rho * (r_sqrt @ r_sqrt)
    close = m > 1 and float(np.min(-np.diff(spec.d))) < RESOLVENT_CLUSTER_TOL * spec.d[0]
    if spec.clustered or close:
        a = np.zeros(n)
        a[:m] = rho * spec.d
        y = np.empty(n)
        for k in range(m):
            y[k] = _weights_quadrature(a, k)
        if m < n:
            y[m:] = _weights_quadrature(a, None)
    else:
        y = np.asarray(kernels.impl.resolvent_weights(spec.d, n, rho), dtype=float)
    ru = r_sqrt @ spec.u
    out = rho * (ru * y) @ ru.conj().T
    return 0.5 * (out + out.conj().T)


def expected_resolvent(r, q, rho):
    """``E{rho z z^H / (1 + rho z^H Q z)}`` for ``z ~ CN(0, R)``.

    Parameters
    ----------
    r : HermitianMatrix or array_like
        PSD covariance of ``z``.
    q : InputCovariance or array_like
    rho : float

    Returns
    -------
    HermitianMatrix
        PSD; equals ``rho R`` to first order as ``rho -> 0``.
    """
    if not np.isfinite(rho) or rho <= 0:
        raise DomainError(f"rho must be positive, got {rho!r}")
    q = InputCovariance(q)
    return HermitianMatrix(_resolvent_from_sqrt(matrix_sqrt(r).array, q.array, float(rho)))


@dataclass(frozen=True)
class ThetaMatrix:
    """Gradient ``Theta`` evaluated at a given ``Q``."""

    matrix: HermitianMatrix
    trace_q_theta: float

    @property
    def spectrum(self):
        return self.matrix.eigenvalues

    @property
    def frobenius(self):
        return float(np.linalg.norm(self.matrix.array))


def _theta_array(s, qa):
    eaves = _resolvent_from_sqrt(s.sigma_e_sqrt, qa, s.rho)
    if s.mode is Mode.STATISTICAL:
        legit = _resolvent_from_sqrt(s.sigma_r_sqrt, qa, s.rho)
    else:
        h = s.h_r
        legit = s.rho * np.outer(h, h.conj()) / (1.0 + s.rho * float(np.vdot(h, qa @ h).real))
    return legit - eaves


def compute_theta(s, q):
    """Gradient of the secrecy rate of scenario ``s`` at ``q``."""
    q = InputCovariance(q)
    t = HermitianMatrix(_theta_array(s, q.array))
    return ThetaMatrix(t, float(np.trace(q.array @ t.array).real))


def kkt_residuals(q, theta):
    """Residuals of the stationarity system.

    Returns
    -------
    tuple of float
        ``(||Q T - T Q||_F, ||Q T - Tr(Q T) Q||_F, lambda_max(T) - Tr(Q T))``.
    """
    qa = np.asarray(q.array if isinstance(q, HermitianMatrix) else q, dtype=complex)
    tm = theta.matrix if isinstance(theta, ThetaMatrix) else HermitianMatrix(theta)
    ta = tm.array
    qt = qa @ ta
    tr = float(np.trace(qt).real)
    comm = float(np.linalg.norm(qt - ta @ qa))
    eig = float(np.linalg.norm(qt - tr * qa))
    return comm, eig, tm.lambda_max() - tr


@dataclass(frozen=True)
class KktReport:
    """Outcome of a fixed-point (or multi-start) solve."""

    q_opt: InputCovariance
    rate: float
    theta_spectrum: tuple
    trace_q_theta: float
    commutator_residual: float
    eigen_eq_residual: float
    lambda_max_gap: float
    iterations: int
    converged: bool
    rate_trace: tuple
    reason: str = ""
    all_rates: tuple = field(default=())

    @property
    def q_eigenvalues(self):
        return tuple(float(v) for v in self.q_opt.eigenvalues)

    @property
    def rate_bits(self):
        return self.rate / math.log(2.0)


def fixed_point_map(theta, qa, beta):
    """One application of the covariance update; returns the new ``Q`` array."""
    w, v = theta.matrix.eigh()
    gamma = (1.0 + beta) * max(0.0, -float(w[-1]))
    ks = (v * np.sqrt(w + gamma)) @ v.conj().T
    nq = ks @ qa @ ks
    nq = 0.5 * (nq + nq.conj().T)
    return nq / np.trace(nq).real


def _report(q, theta, rate, iters, trace, tol_kkt, reason=None):
    comm, eig, gap = kkt_residuals(q, theta)
    scale = theta.frobenius
    ok = comm <= tol_kkt * scale and eig <= tol_kkt * scale and abs(gap) <= tol_kkt * scale
    if reason is None:
        reason = "kkt satisfied" if ok else "kkt residuals above tolerance"
    return KktReport(q_opt=q, rate=rate, theta_spectrum=tuple(float(x) for x in theta.spectrum),
                     trace_q_theta=theta.trace_q_theta, commutator_residual=comm,
                     eigen_eq_residual=eig, lambda_max_gap=gap, iterations=iters,
                     converged=ok, rate_trace=tuple(trace), reason=reason, all_rates=(rate,))


def fixed_point_solve(s, q0=None, beta=DEFAULT_BETA, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL,
                      tol_kkt=TOL_KKT):
    """Run the fixed-point iteration from ``q0`` (default ``I / n_T``).

    Iteration stops once the relative change of the rate and the step
    ``||f(Q) - Q||_F`` are both below ``tol``, or after ``max_iters``
    updates. ``tol = 0`` forces exactly ``max_iters`` updates. The report is
    flagged converged iff all KKT residuals are within
    ``tol_kkt * ||Theta||_F``.

    Parameters
    ----------
    s : Scenario
    q0 : InputCovariance, optional
    beta : float
        Shift margin, ``> 0``.
    max_iters : int
    tol : float
    tol_kkt : float

    Returns
    -------
    KktReport
    """
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    if max_iters < 0 or tol < 0:
        raise DomainError("max_iters and tol must be non-negative")
    try:
        q = InputCovariance.identity(s.n_t) if q0 is None else InputCovariance(q0)
    except InvalidInputError as exc:
        raise DomainError(f"initial point not feasible: {exc}") from exc
    if q.n != s.n_t:
        raise DomainError("initial point has wrong dimension")
    rate = secrecy_rate(s, q)
    trace = [rate]
    theta = compute_theta(s, q)
    if theta.frobenius < DEGENERATE_TOL:
        return _report(q, theta, rate, 0, trace, tol_kkt, reason="degenerate: gradient vanishes")
    iters = 0
    while iters < max_iters:
        qa = q.array
        nq = InputCovariance.normalized(fixed_point_map(theta, qa, beta))
        step = float(np.linalg.norm(nq.array - qa))
        new_rate = secrecy_rate(s, nq)
        iters += 1
        trace.append(new_rate)
        q, prev, rate = nq, rate, new_rate
        theta = compute_theta(s, q)
        if abs(rate - prev) <= tol * max(abs(rate), 1e-300) and step <= tol:
            break
    return _report(q, theta, rate, iters, trace, tol_kkt)


def random_start(n, rng):
    """Random feasible point ``G G^H / Tr(G G^H)``."""
    return InputCovariance.random(n, rng)


def multi_start_solve(s, n_starts=1, seed=None, beta=DEFAULT_BETA, max_iters=DEFAULT_MAX_ITERS,
                      tol=DEFAULT_TOL, tol_kkt=TOL_KKT, threads=1):
    """Best KKT point over ``I / n_T`` plus ``n_starts - 1`` random starts.

    Runs that fail the KKT check are only chosen when no run passes. The
    returned report's ``all_rates`` lists every run's final rate in start
    order.
    """
    n_starts = int(n_starts)
    if n_starts < 1:
        raise InvalidInputError("n_starts must be >= 1")
    rng = as_generator(seed)
    starts = [InputCovariance.identity(s.n_t)]
    starts += [random_start(s.n_t, rng) for _ in range(n_starts - 1)]

    def run(q0):
        return fixed_point_solve(s, q0, beta=beta, max_iters=max_iters, tol=tol, tol_kkt=tol_kkt)

    if threads > 1 and n_starts > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(run, starts))
    else:
        reports = [run(q0) for q0 in starts]
    valid = [r for r in reports if r.converged] or reports
    best = max(valid, key=lambda r: r.rate)
    rates = tuple(r.rate for r in reports)
    return KktReport(**{**best.__dict__, "all_rates": rates})
