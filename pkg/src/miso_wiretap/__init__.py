"""Ergodic secrecy rates and optimal input covariances for Gaussian MISO wiretap channels.

The transmitter has ``n_T`` antennas; the legitimate receiver and the
eavesdropper have one each. Channels are zero-mean complex Gaussian with
covariances ``Sigma_R`` and ``Sigma_E``. Either only these statistics are
known (``Mode.STATISTICAL``) or the legitimate channel realisation is known
too (``Mode.FULL_CSI``).
"""

from . import kernels
from .analysis import (DiagonalSolution, Feasibility, HighSnrResult, high_snr_full_csi,
                       high_snr_statistical, positivity_full_csi, positivity_statistical,
                       rate_snr_derivative, solve_diagonal_trivial_eaves)
from .config import ScenarioConfig
from .errors import (ConfigError, DomainError, InvalidInputError, MisoWiretapError, NotPSDError,
                     UnsupportedSpectrumError)
from .fullcsi import (PhiSolution, ScanResult, min_quadratic_on_sphere, phi, scan_cs_z,
                      trivial_sigma_e_optimum)
from .hermitian import (HermitianMatrix, InputCovariance, Mode, Scenario, eigendecompose,
                        jakes_covariance, matrix_sqrt, sample_standard_complex_gaussian,
                        snr_db_to_rho)
from .kkt import (KktReport, ThetaMatrix, compute_theta, expected_resolvent, fixed_point_solve,
                  kkt_residuals, multi_start_solve)
from .rate import (MonteCarloEstimate, RateBreakdown, ergodic_secrecy_rate, expected_log_quadratic,
                   monte_carlo_rate, secrecy_rate)
from .special import bessel_j0, f1, f1_difference_quotient, f2, scaled_e1

__version__ = "0.1.0"
