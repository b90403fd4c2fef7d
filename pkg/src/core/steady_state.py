"""
src/core/steady_state.py

THE MEAN-FIELD SOLVER
---------------------
Classical steady state of the driven cavity / phonon / magnon system:

    a_s = -i g m_s / (gamma_a + i Delta_a)
    b_s = -i G0 |m_s|^2 / (gamma_b + i omega_b)
    m_s = (E - i g a_s) / (gamma_m + i Delta~_m)
    Delta~_m = Delta_m + 2 G0 Re b_s + 2 xi |m_s|^2

and the linearized parameters it feeds downstream: G = G0 m_s and the
Kerr squeezing zeta = -2 i xi m_s^2.
"""

import math
from dataclasses import dataclass, field
from typing import List, Literal

import numpy as np
from loguru import logger

from src.core.errors import ConvergenceError, ParameterError
from src.core.params import SqueezingParams, SystemParams, wrap_phase
from src.core.spectrum import optimal_squeezing

SolveMode = Literal["approximate", "self_consistent"]


@dataclass(frozen=True)
class DriveConfig:
    system: SystemParams
    e_abs: float
    g0: float
    xi: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("e_abs", "g0", "xi"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ParameterError(f"{name} must be finite and non-negative, got {value}")
        if not math.isfinite(self.theta):
            raise ParameterError(f"theta must be finite, got {self.theta}")

    @property
    def e_complex(self) -> complex:
        return self.e_abs * complex(np.exp(1j * self.theta))

    @property
    def kerr_shift_slope(self) -> float:
        """
        d(Delta~_m)/d|m_s|^2: the Kerr shift 2 xi plus the magnetostrictive
        shift 2 G0 Re b_s / |m_s|^2 = -2 G0^2 omega_b / (gamma_b^2 + omega_b^2).
        """
        p = self.system
        return 2.0 * self.xi - 2.0 * self.g0 ** 2 * p.omega_b / (p.gamma_b ** 2 + p.omega_b ** 2)


@dataclass
class SteadyState:
    a_s: complex
    b_s: complex
    m_s: complex
    delta_m_eff: float
    iterations_used: int
    converged: bool
    residual: float = 0.0
    multistable: bool = False
    candidate_populations: List[float] = field(default_factory=list)

    def shift(self, p: SystemParams) -> float:
        return abs(self.delta_m_eff - p.delta_m)


@dataclass(frozen=True)
class EffectiveParams:
    g_eff: complex
    zeta: complex

    @property
    def g_abs(self) -> float:
        return abs(self.g_eff)

    @property
    def zeta_abs(self) -> float:
        return abs(self.zeta)

    @property
    def phi(self) -> float:
        return wrap_phase(float(np.angle(self.zeta)))

    @property
    def phi_relative(self) -> float:
        """Squeezing phase seen in the frame where G is real and positive."""
        if self.g_eff == 0:
            return self.phi
        return wrap_phase(float(np.angle(self.zeta)) - 2.0 * float(np.angle(self.g_eff)))

    def squeezing(self) -> SqueezingParams:
        return SqueezingParams(zeta_abs=self.zeta_abs, phi=self.phi_relative)

    def apply(self, p: SystemParams) -> SystemParams:
        return p.with_values(G_mag=self.g_abs)


@dataclass(frozen=True)
class FeasibilityReport:
    zeta_abs: float
    zeta_target: float
    meets_optimum: bool


class SteadyStateSolver:
    RELAXATION = 0.5
    TOLERANCE = 1e-10
    MAX_ITERATIONS = 10_000

    @staticmethod
    def _magnon_amplitude(d: DriveConfig, delta_eff: float) -> complex:
        p = d.system
        cavity = p.gamma_a + 1j * p.delta_a
        return d.e_complex * cavity / (p.g ** 2 + (p.gamma_m + 1j * delta_eff) * cavity)

    @staticmethod
    def _side_fields(d: DriveConfig, m_s: complex):
        p = d.system
        a_s = -1j * p.g * m_s / (p.gamma_a + 1j * p.delta_a)
        b_s = -1j * d.g0 * abs(m_s) ** 2 / (p.gamma_b + 1j * p.omega_b)
        return a_s, b_s

    @staticmethod
    def _effective_detuning(d: DriveConfig, m_s: complex, b_s: complex) -> float:
        return d.system.delta_m + 2.0 * d.g0 * b_s.real + 2.0 * d.xi * abs(m_s) ** 2

    @staticmethod
    def population_roots(d: DriveConfig) -> List[float]:
        """
        Non-negative real roots n = |m_s|^2 of the Kerr cubic
        kappa^2 |z|^2 n^3 + 2 kappa Re(i z w0*) n^2 + |w0|^2 n - |E|^2 |z|^2 = 0
        with z = gamma_a + i Delta_a, w0 = g^2 + (gamma_m + i Delta_m) z.
        """
        p = d.system
        if d.e_abs == 0:
            return [0.0]
        kappa = d.kerr_shift_slope
        z = p.gamma_a + 1j * p.delta_a
        w0 = p.g ** 2 + (p.gamma_m + 1j * p.delta_m) * z
        coefficients = [
            kappa ** 2 * abs(z) ** 2,
            2.0 * kappa * (1j * z * np.conj(w0)).real,
            abs(w0) ** 2,
            -(d.e_abs ** 2) * abs(z) ** 2,
        ]
        roots = np.roots(coefficients)
        real_roots = [
            float(r.real) for r in roots
            if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real >= 0
        ]
        return sorted(real_roots)

    @classmethod
    def residual(cls, d: DriveConfig, ss: SteadyState) -> float:
        """Largest absolute residual of the three mean-field relations at ss."""
        p = d.system
        r_a = abs(ss.a_s * (p.gamma_a + 1j * p.delta_a) + 1j * p.g * ss.m_s)
        r_b = abs(ss.b_s * (p.gamma_b + 1j * p.omega_b) + 1j * d.g0 * abs(ss.m_s) ** 2)
        r_m = abs(ss.m_s * (p.gamma_m + 1j * ss.delta_m_eff) - (d.e_complex - 1j * p.g * ss.a_s))
        return max(r_a, r_b, r_m)

    @classmethod
    def solve(cls, d: DriveConfig, mode: SolveMode = "approximate") -> SteadyState:
        if mode not in ("approximate", "self_consistent"):
            raise ParameterError(f"unknown steady-state mode {mode!r}")

        p = d.system
        populations = cls.population_roots(d)
        multistable = len(populations) > 1
        if multistable:
            logger.warning(f"Kerr cubic admits {len(populations)} real populations {populations}; reporting one branch")

        delta_eff = p.delta_m
        m_s = cls._magnon_amplitude(d, delta_eff)
        a_s, b_s = cls._side_fields(d, m_s)
        iterations = 0

        if mode == "self_consistent":
            converged = False
            residual = math.inf
            while iterations < cls.MAX_ITERATIONS:
                target = cls._effective_detuning(d, m_s, b_s)
                residual = abs(target - delta_eff) * max(1.0, abs(m_s))
                if not math.isfinite(residual):
                    break
                if residual < cls.TOLERANCE:
                    converged = True
                    break
                delta_eff += cls.RELAXATION * (target - delta_eff)
                m_s = cls._magnon_amplitude(d, delta_eff)
                a_s, b_s = cls._side_fields(d, m_s)
                iterations += 1
            if not converged:
                logger.error(f"Mean-field iteration stalled at residual {residual:.3e}")
                raise ConvergenceError(residual, iterations)

        state = SteadyState(
            a_s=complex(a_s),
            b_s=complex(b_s),
            m_s=complex(m_s),
            delta_m_eff=cls._effective_detuning(d, m_s, b_s),
            iterations_used=iterations,
            converged=True,
            multistable=multistable,
            candidate_populations=populations,
        )
        state.residual = cls.residual(d, state)
        logger.debug(f"Steady state ({mode}): |m_s|^2={abs(m_s) ** 2:.6g}, shift={state.shift(p):.3e}, iters={iterations}")
        return state


def solve_steady_state(d: DriveConfig, mode: SolveMode = "approximate") -> SteadyState:
    return SteadyStateSolver.solve(d, mode)


def effective_params(d: DriveConfig, ss: SteadyState) -> EffectiveParams:
    """G = G0 m_s and zeta = -2 i xi m_s^2."""
    if not ss.converged:
        raise ParameterError("effective parameters need a converged steady state")
    return EffectiveParams(g_eff=d.g0 * ss.m_s, zeta=-2j * d.xi * ss.m_s ** 2)


def feasibility_report(xi: float, pump_magnon_number: float, omega_b: float, gamma_m: float) -> FeasibilityReport:
    """
    Squeezing reachable with a given Kerr coefficient and pump population,
    compared against the optimum |zeta| = gamma_m of a bare magnon at
    Delta_m = omega_b. All rates in the same units.
    """
    for name, value in (("xi", xi), ("pump_magnon_number", pump_magnon_number)):
        if not math.isfinite(value) or value < 0:
            raise ParameterError(f"{name} must be finite and non-negative, got {value}")
    zeta_abs = 2.0 * xi * pump_magnon_number
    target = SystemParams(
        delta_a=omega_b, delta_m=omega_b, gamma_a=1.0, gamma_b=1.0, gamma_m=gamma_m,
        g=0.0, G_mag=0.0, n_a=0.0, n_b=0.0, n_m=0.0, omega_b=omega_b,
    )
    zeta_target = optimal_squeezing(target).zeta_abs
    return FeasibilityReport(
        zeta_abs=zeta_abs,
        zeta_target=zeta_target,
        meets_optimum=zeta_abs > 0 and zeta_abs >= zeta_target,
    )
