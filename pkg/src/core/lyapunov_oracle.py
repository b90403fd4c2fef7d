"""
src/core/lyapunov_oracle.py

THE ORACLE
----------
Independent evaluation of the full linearized three-mode model.

Quadratures are ordered (x_a, p_a, x_b, p_b, x_m, p_m) with
x = (k + k^dagger)/sqrt(2), p = i (k^dagger - k)/sqrt(2), so the vacuum
variance is 1/2. The stationary covariance V solves A V + V A^T + D = 0.
The magnon quadrature spectrum is rebuilt by frequency-domain inversion of
the mode equations, with X = m + m^dagger (unnormalized).
"""

from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
from loguru import logger

from src.core.errors import InstabilityError, SingularSpectrumError, UnphysicalCovarianceError
from src.core.params import SqueezingParams, SystemParams
from src.core.spectrum import CoolingReport, steady_phonon_number

STABILITY_MARGIN = 1e-12
CONDITION_WARNING = 1e12
PHYSICALITY_TOLERANCE = 1e-8

# one mode: (k, k^dagger) -> (x, p)
_U_MODE = np.array([[1.0, 1.0], [-1j, 1j]]) / np.sqrt(2.0)
_U = scipy.linalg.block_diag(_U_MODE, _U_MODE, _U_MODE)
_U_INV = np.linalg.inv(_U)
_OMEGA = scipy.linalg.block_diag(*([np.array([[0.0, 1.0], [-1.0, 0.0]])] * 3))

# slots in the complex basis (a, a^dagger, b, b^dagger, m, m^dagger)
A, AD, B, BD, M, MD = range(6)


@dataclass
class GaussianModel:
    drift: np.ndarray
    diffusion: np.ndarray
    stable: bool
    abscissa: float

    @classmethod
    def from_params(cls, p: SystemParams, g_eff: complex, zeta: complex) -> "GaussianModel":
        drift = build_drift(p, g_eff, zeta)
        stable, abscissa = check_stability(drift)
        return cls(drift=drift, diffusion=build_diffusion(p), stable=stable, abscissa=abscissa)


@dataclass
class CovarianceMatrix:
    matrix: np.ndarray
    residual: float
    condition: float
    warning: Optional[str] = None

    def is_physical(self, tol: float = PHYSICALITY_TOLERANCE) -> bool:
        # V + (i/2) Omega must be positive semidefinite
        eigenvalues = np.linalg.eigvalsh(self.matrix + 0.5j * _OMEGA)
        return bool(eigenvalues.min() >= -tol)


def mode_drift(p: SystemParams, g_eff: complex, zeta: complex) -> np.ndarray:
    """Complex drift of the linearized Langevin equations in the (k, k^dagger) basis."""
    g_eff = complex(g_eff)
    zeta = complex(zeta)
    m = np.zeros((6, 6), dtype=complex)

    m[A, A] = -(p.gamma_a + 1j * p.delta_a)
    m[A, M] = -1j * p.g
    m[AD, AD] = -(p.gamma_a - 1j * p.delta_a)
    m[AD, MD] = 1j * p.g

    m[B, B] = -(p.gamma_b + 1j * p.omega_b)
    m[B, M] = -1j * np.conj(g_eff)
    m[B, MD] = -1j * g_eff
    m[BD, BD] = -(p.gamma_b - 1j * p.omega_b)
    m[BD, MD] = 1j * g_eff
    m[BD, M] = 1j * np.conj(g_eff)

    m[M, M] = -(p.gamma_m + 1j * p.delta_m)
    m[M, A] = -1j * p.g
    m[M, B] = -1j * g_eff
    m[M, BD] = -1j * g_eff
    m[M, MD] = zeta
    m[MD, MD] = -(p.gamma_m - 1j * p.delta_m)
    m[MD, AD] = 1j * p.g
    m[MD, B] = 1j * np.conj(g_eff)
    m[MD, BD] = 1j * np.conj(g_eff)
    m[MD, M] = np.conj(zeta)
    return m


def _noise_gains(p: SystemParams) -> np.ndarray:
    rates = np.repeat([p.gamma_a, p.gamma_b, p.gamma_m], 2)
    return np.diag(np.sqrt(2.0 * rates))


def build_drift(p: SystemParams, g_eff: complex, zeta: complex) -> np.ndarray:
    """Real 6x6 quadrature drift A = U M U^{-1}."""
    drift = _U @ mode_drift(p, g_eff, zeta) @ _U_INV
    if np.abs(drift.imag).max() > 1e-12 * max(1.0, np.abs(drift).max()):
        raise ValueError("quadrature drift is not real; mode drift lost its conjugate structure")
    return drift.real


def build_diffusion(p: SystemParams) -> np.ndarray:
    """
    Real 6x6 quadrature diffusion from the symmetrized input correlators
    1/2 <{k_in, k_in^dagger}> = n_k + 1/2, mapped through the noise gains sqrt(2 gamma_k).
    """
    symmetrized = np.zeros((6, 6))
    for slot, n in zip((A, B, M), (p.n_a, p.n_b, p.n_m)):
        symmetrized[slot, slot + 1] = symmetrized[slot + 1, slot] = n + 0.5
    gains = _noise_gains(p)
    diffusion = _U @ gains @ symmetrized @ gains @ _U.T
    return 0.5 * (diffusion.real + diffusion.real.T)


def check_stability(drift: np.ndarray) -> Tuple[bool, float]:
    """Returns (stable, spectral abscissa)."""
    abscissa = float(np.max(scipy.linalg.eigvals(drift).real))
    return abscissa < -STABILITY_MARGIN, abscissa


def solve_lyapunov(drift: np.ndarray, diffusion: np.ndarray) -> CovarianceMatrix:
    """Stationary covariance from the Kronecker form (I (x) A + A (x) I) vec V = -vec D."""
    stable, abscissa = check_stability(drift)
    if not stable:
        raise InstabilityError(abscissa)

    n = drift.shape[0]
    identity = np.eye(n)
    kron = np.kron(identity, drift) + np.kron(drift, identity)
    condition = float(np.linalg.cond(kron))
    vec_v = scipy.linalg.solve(kron, -diffusion.flatten(order="F"))
    v = vec_v.reshape((n, n), order="F")
    v = 0.5 * (v + v.T)

    residual = float(
        np.linalg.norm(drift @ v + v @ drift.T + diffusion) / max(np.linalg.norm(diffusion), np.finfo(float).tiny)
    )
    warning = None
    if condition > CONDITION_WARNING:
        warning = f"Lyapunov system ill-conditioned (cond={condition:.3e}, residual={residual:.3e})"
        logger.warning(warning)
    return CovarianceMatrix(matrix=v, residual=residual, condition=condition, warning=warning)


def phonon_number(v: CovarianceMatrix) -> float:
    """<b^dagger b> = (V[x_b, x_b] + V[p_b, p_b] - 1) / 2."""
    if not v.is_physical():
        raise UnphysicalCovarianceError("covariance violates the uncertainty relation V + (i/2) Omega >= 0")
    return float((v.matrix[2, 2] + v.matrix[3, 3] - 1.0) / 2.0)


def numeric_spectrum(
    omega: Union[float, np.ndarray],
    p: SystemParams,
    g_eff: complex = 0.0,
    zeta: complex = 0.0,
) -> Union[float, np.ndarray]:
    """
    S(omega) = w^T T(omega) K N K T(-omega)^T w with T(omega) = (-i omega I - M)^{-1},
    w selecting m + m^dagger and N the input correlators
    <k_in(omega) k_in^dagger(omega')> = (n + 1) delta, <k_in^dagger k_in> = n delta.

    g_eff = 0 gives the bare magnon spectrum that the closed form describes;
    a non-zero g_eff includes the mechanical back-action.
    """
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=float))
    drift = mode_drift(p, g_eff, zeta)
    stable, abscissa = check_stability(drift)
    if not stable:
        raise InstabilityError(abscissa)

    correlators = np.zeros((6, 6))
    for slot, n in zip((A, B, M), (p.n_a, p.n_b, p.n_m)):
        correlators[slot, slot + 1] = n + 1.0
        correlators[slot + 1, slot] = n
    gains = _noise_gains(p)
    source = gains @ correlators @ gains
    selector = np.zeros(6)
    selector[M] = selector[MD] = 1.0

    identity = np.eye(6)
    forward = -1j * omega_arr[:, None, None] * identity - drift
    backward = 1j * omega_arr[:, None, None] * identity - drift
    conditions = np.linalg.cond(forward)
    if np.any(conditions > 1e14):
        raise SingularSpectrumError(omega_arr[np.argmax(conditions > 1e14)])
    t_forward = np.linalg.inv(forward)
    t_backward = np.linalg.inv(backward)

    left = selector @ t_forward                      # (n, 6)
    right = np.einsum("nji,j->ni", t_backward, selector)  # T(-omega)^T w
    values = np.einsum("ni,ij,nj->n", left, source, right)
    spectrum = values.real
    if np.ndim(omega) == 0:
        return float(spectrum[0])
    return spectrum


def full_phonon_number(p: SystemParams, sq: SqueezingParams, g_eff: Optional[complex] = None,
                       zeta: Optional[complex] = None) -> float:
    """
    N_full for a core-model parameter set. Without explicit complex values the
    coupling is taken real (G = G_mag) and zeta carries the relative phase.
    """
    g_eff = p.G_mag if g_eff is None else g_eff
    zeta = sq.complex if zeta is None else zeta
    model = GaussianModel.from_params(p, g_eff, zeta)
    if not model.stable:
        raise InstabilityError(model.abscissa)
    return phonon_number(solve_lyapunov(model.drift, model.diffusion))


def cooling_report(p: SystemParams, sq: SqueezingParams, g_eff: Optional[complex] = None,
                   zeta: Optional[complex] = None, rate: str = "number") -> CoolingReport:
    """steady_phonon_number with the stability flag and N_full filled in. Unstable input raises."""
    g_eff = p.G_mag if g_eff is None else g_eff
    zeta = sq.complex if zeta is None else zeta
    model = GaussianModel.from_params(p, g_eff, zeta)
    if not model.stable:
        raise InstabilityError(model.abscissa)
    report = steady_phonon_number(p, sq, rate=rate)
    n_full = phonon_number(solve_lyapunov(model.drift, model.diffusion))
    return replace(report, n_full=n_full, stable=True)
