"""
src/core/optimizer.py

THE SEARCH
----------
Deterministic 2-D search over the squeezing (|zeta|, phi): a coarse polar
grid followed by bounded coordinate refinement around the best cell.
Used to confirm the closed-form Stokes-null optimum independently.
"""

import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np
from loguru import logger
from scipy.optimize import minimize_scalar

from src.core.errors import MagnonCoolingError, NoFeasiblePointError, ParameterError
from src.core.lyapunov_oracle import build_drift, check_stability
from src.core.params import SqueezingParams, SystemParams, wrap_phase
from src.core.spectrum import scattering_rates, steady_phonon_number

Objective = Literal["stokes", "n_st"]

PENALTY = 1e12
DEGENERACY_SPREAD = 1e-12


@dataclass
class NumericOptimum:
    zeta_abs: float
    phi: float
    objective: str
    objective_min: float
    n_st_min: Optional[float]
    degenerate: bool
    evaluations: int

    @property
    def squeezing(self) -> SqueezingParams:
        return SqueezingParams(self.zeta_abs, self.phi)


def default_zeta_max(p: SystemParams) -> float:
    """4 sqrt(gamma'_m^2 + (Delta_m - omega_b)^2)."""
    return 4.0 * math.hypot(p.gamma_m_eff, p.delta_m - p.omega_b)


def phase_grid(points: int) -> np.ndarray:
    """points phases evenly covering (-pi, pi], the last one at pi."""
    return -math.pi + 2.0 * math.pi * np.arange(1, points + 1) / points


class SqueezingSearch:
    def __init__(self, p: SystemParams, objective: Objective = "stokes", rate: str = "number"):
        if objective not in ("stokes", "n_st"):
            raise ParameterError(f"unknown objective {objective!r}, expected 'stokes' or 'n_st'")
        self.p = p
        self.objective = objective
        self.rate = rate
        self.evaluations = 0

    def _raw(self, sq: SqueezingParams) -> float:
        if self.objective == "stokes":
            return scattering_rates(self.p, sq)[0]
        return steady_phonon_number(self.p, sq, rate=self.rate).n_st

    def __call__(self, zeta_abs: float, phi: float) -> float:
        """Objective value, PENALTY for unstable or undefined points."""
        self.evaluations += 1
        sq = SqueezingParams(max(zeta_abs, 0.0), phi)
        stable, _ = check_stability(build_drift(self.p, self.p.G_mag, sq.complex))
        if not stable:
            return PENALTY
        try:
            value = self._raw(sq)
        except MagnonCoolingError:
            return PENALTY
        return value if math.isfinite(value) else PENALTY

    def _refine(self, fn: Callable[[float], float], lower: float, upper: float, tol: float) -> float:
        result = minimize_scalar(fn, bounds=(lower, upper), method="bounded", options={"xatol": tol})
        return float(result.x)

    def run(self, zeta_points: int = 101, phi_points: int = 64, zeta_max: Optional[float] = None,
            tol: float = 1e-6, max_sweeps: int = 50) -> NumericOptimum:
        zeta_max = default_zeta_max(self.p) if zeta_max is None else zeta_max
        zetas = np.linspace(0.0, zeta_max, zeta_points)
        phis = phase_grid(phi_points)

        grid = np.array([[self(z, f) for f in phis] for z in zetas])
        feasible = grid < PENALTY
        if not feasible.any():
            raise NoFeasiblePointError(
                f"every point of the |zeta| <= {zeta_max:.6g} search box is unstable or undefined"
            )

        i, j = np.unravel_index(np.argmin(np.where(feasible, grid, np.inf)), grid.shape)
        spread = float(grid[feasible].max() - grid[feasible].min())
        degenerate = spread <= DEGENERACY_SPREAD * max(1.0, abs(float(grid[i, j])))
        zeta_best, phi_best = float(zetas[i]), float(phis[j])

        if degenerate:
            logger.info("Objective is flat over the search box, returning the grid minimum")
        else:
            dz = zetas[1] - zetas[0] if zeta_points > 1 else zeta_max
            dphi = 2.0 * math.pi / phi_points
            for sweep in range(max_sweeps):
                previous = (zeta_best, phi_best)
                zeta_best = self._refine(
                    lambda z: self(z, phi_best), max(0.0, zeta_best - dz), zeta_best + dz, tol * 1e-4
                )
                phi_best = self._refine(
                    lambda f: self(zeta_best, f), phi_best - dphi, phi_best + dphi, tol * 1e-4
                )
                if abs(zeta_best - previous[0]) < tol and abs(wrap_phase(phi_best - previous[1])) < tol:
                    logger.debug(f"Refinement converged after {sweep + 1} sweeps")
                    break

        best = SqueezingParams(zeta_best, phi_best)
        try:
            n_st = steady_phonon_number(self.p, best, rate=self.rate).n_st
        except MagnonCoolingError:
            n_st = None

        return NumericOptimum(
            zeta_abs=best.zeta_abs,
            phi=best.phi,
            objective=self.objective,
            objective_min=self(best.zeta_abs, best.phi),
            n_st_min=n_st,
            degenerate=degenerate,
            evaluations=self.evaluations,
        )


def optimize_squeezing_numeric(p: SystemParams, objective: Objective = "stokes", **options) -> NumericOptimum:
    """
    Numeric argmin over (|zeta|, phi) of the Stokes rate (objective="stokes")
    or of the steady-state phonon number (objective="n_st").
    """
    result = SqueezingSearch(p, objective=objective, rate=options.pop("rate", "number")).run(**options)
    logger.debug(
        f"Numeric optimum ({objective}): |zeta|={result.zeta_abs:.8g}, phi={result.phi:.8g}, "
        f"evaluations={result.evaluations}"
    )
    return result
