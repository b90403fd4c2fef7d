"""
src/core/spectrum.py

THE SPECTRUM ENGINE
-------------------
Closed-form noise spectrum of the magnon quadrature X = m + m^dagger, the
Stokes / anti-Stokes scattering rates it produces on the phonon, the
perturbative steady-state phonon number and the squeezing that nulls the
Stokes sideband.

Fourier convention: O(omega) = integral dt e^{+i omega t} O(t).
Every function here is pure and accepts scalar or array probe frequencies.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import constants

from src.core.errors import HeatingError, ParameterError, SingularSpectrumError
from src.core.params import SqueezingParams, SystemParams

FrequencyLike = Union[float, np.ndarray]

# intrinsic phonon relaxation: 2 gamma_b (number decay) or gamma_b
RATE_CONVENTIONS = ("number", "amplitude")


@dataclass
class CoolingReport:
    s_minus: float          # S(-omega_b)
    s_plus: float           # S(+omega_b)
    a_plus: float           # Stokes rate (heats)
    a_minus: float          # anti-Stokes rate (cools)
    gamma_net: float
    n_st: float
    weak_coupling_ok: bool
    rate_convention: str = "number"
    n_full: Optional[float] = None
    stable: Optional[bool] = None


def natural_susceptibility(gamma: float, detuning: float, omega: FrequencyLike) -> Union[complex, np.ndarray]:
    """chi(omega) = 1 / (gamma + i (Delta - omega))."""
    if not gamma > 0:
        raise ParameterError(f"damping rate must be strictly positive, got {gamma}")
    return 1.0 / (gamma + 1j * (detuning - np.asarray(omega, dtype=float)))


def coupled_response(omega: FrequencyLike, p: SystemParams) -> Union[complex, np.ndarray]:
    """
    Magnon inverse susceptibility dressed by the cavity:
    A(omega) = chi_m^{-1}(omega) + g^2 chi_a(omega).
    """
    omega = np.asarray(omega, dtype=float)
    inverse_chi_m = p.gamma_m + 1j * (p.delta_m - omega)
    if p.g == 0:
        return inverse_chi_m
    return inverse_chi_m + p.g ** 2 * natural_susceptibility(p.gamma_a, p.delta_a, omega)


def magnon_spectrum(omega: FrequencyLike, p: SystemParams, sq: SqueezingParams) -> Union[float, np.ndarray]:
    """
    S(omega) = 2 (gamma_m + g^2 gamma_a |chi_a(omega)|^2) |zeta + A(-omega)|^2
               / |A(omega) A*(-omega) - |zeta|^2|^2

    Parameters
    ----------
    omega : float or np.ndarray
        probe frequency in units of omega_b
    p : SystemParams
    sq : SqueezingParams

    Returns
    -------
    float or np.ndarray
        spectrum value(s), same shape as omega

    Raises
    ------
    SingularSpectrumError
        if the denominator vanishes at any probe frequency
    """
    omega_arr = np.asarray(omega, dtype=float)
    zeta = sq.complex
    response = coupled_response(omega_arr, p)
    mirrored = coupled_response(-omega_arr, p)

    denominator = np.abs(response * np.conj(mirrored) - sq.zeta_abs ** 2) ** 2
    scale = np.abs(response * np.conj(mirrored)) ** 2 + sq.zeta_abs ** 4
    singular = denominator <= 1e-28 * np.maximum(scale, 1.0)
    if np.any(singular):
        bad = np.atleast_1d(omega_arr)[np.atleast_1d(singular)][0]
        raise SingularSpectrumError(bad)

    noise = p.gamma_m
    if p.g > 0:
        noise = noise + p.g ** 2 * p.gamma_a * np.abs(natural_susceptibility(p.gamma_a, p.delta_a, omega_arr)) ** 2
    value = 2.0 * noise * np.abs(zeta + mirrored) ** 2 / denominator
    if value.ndim == 0:
        return float(value)
    return value


def scattering_rates(p: SystemParams, sq: SqueezingParams) -> Tuple[float, float]:
    """Returns (A_plus, A_minus) = |G|^2 (S(-omega_b), S(+omega_b))."""
    s_minus, s_plus = magnon_spectrum(np.array([-p.omega_b, p.omega_b]), p, sq)
    coupling = p.G_mag ** 2
    return float(coupling * s_minus), float(coupling * s_plus)


def steady_phonon_number(p: SystemParams, sq: SqueezingParams, rate: str = "number") -> CoolingReport:
    """
    N_st = (k n_b + A_plus) / (k + Gamma_b), Gamma_b = A_minus - A_plus.

    k is the intrinsic phonon relaxation rate. With rate="number" it is
    2 gamma_b, the decay rate of <b^dagger b> for the amplitude damping
    gamma_b of the Langevin equations; rate="amplitude" uses gamma_b itself.
    """
    if rate not in RATE_CONVENTIONS:
        raise ParameterError(f"unknown rate convention {rate!r}, expected one of {RATE_CONVENTIONS}")
    s_minus, s_plus = magnon_spectrum(np.array([-p.omega_b, p.omega_b]), p, sq)
    coupling = p.G_mag ** 2
    a_plus = float(coupling * s_minus)
    a_minus = float(coupling * s_plus)
    gamma_net = a_minus - a_plus

    intrinsic = 2.0 * p.gamma_b if rate == "number" else p.gamma_b
    total = intrinsic + gamma_net
    if not total > 0:
        raise HeatingError(
            f"intrinsic rate + Gamma_b = {total:.6g} <= 0: Stokes scattering outweighs cooling, no steady phonon number"
        )
    n_st = (intrinsic * p.n_b + a_plus) / total

    return CoolingReport(
        s_minus=float(s_minus),
        s_plus=float(s_plus),
        a_plus=a_plus,
        a_minus=a_minus,
        gamma_net=gamma_net,
        n_st=n_st,
        weak_coupling_ok=p.weak_coupling_ok,
        rate_convention=rate,
    )


def optimal_squeezing(p: SystemParams) -> SqueezingParams:
    """
    Squeezing that cancels the Stokes sideband, zeta = -A(omega_b).

    With Delta_a = omega_b this is |zeta| = sqrt(gamma'_m^2 + (Delta_m - omega_b)^2)
    and zeta = -(gamma'_m + i (Delta_m - omega_b)); for g = 0, Delta_m = omega_b
    it reduces to (gamma_m, pi).
    """
    target = -complex(coupled_response(p.omega_b, p))
    return SqueezingParams.from_complex(target)


def thermal_occupancy(omega: float, temperature: float) -> float:
    """
    Bose-Einstein occupancy n = 1 / (exp(hbar omega / k_B T) - 1).

    omega is an angular frequency in rad/s, temperature in kelvin.
    """
    if not omega > 0:
        raise ParameterError(f"angular frequency must be strictly positive, got {omega}")
    if temperature < 0:
        raise ParameterError(f"temperature must be non-negative, got {temperature}")
    if temperature == 0:
        return 0.0
    x = constants.hbar * omega / (constants.k * temperature)
    return float(np.exp(-x) / -np.expm1(-x))
