"""
src/core/referee.py

THE REFEREE (Acceptance Engine)
-------------------------------
Re-derives the headline numbers of the cooling model from scratch and
judges each one pass/fail. This keeps regressions in the spectrum, the
optimizer or the covariance oracle from slipping into figure datasets.
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from src.core.errors import MagnonCoolingError
from src.core.lyapunov_oracle import (
    build_diffusion,
    build_drift,
    check_stability,
    full_phonon_number,
    numeric_spectrum,
    solve_lyapunov,
)
from src.core.optimizer import optimize_squeezing_numeric
from src.core.params import SqueezingParams, SystemParams, wrap_phase
from src.core.spectrum import magnon_spectrum, optimal_squeezing, steady_phonon_number, thermal_occupancy
from src.core.steady_state import feasibility_report

PANEL_GAMMA_M = (0.1, 1.0, 5.0)
RANDOM_SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0


def random_optimizer_draws(count: int, seed: int = RANDOM_SEED) -> List[SystemParams]:
    """Parameter sets with Delta_a = omega_b whose closed-form optimum is stable."""
    rng = np.random.default_rng(seed)
    draws: List[SystemParams] = []
    attempts = 0
    while len(draws) < count and attempts < 50 * count:
        attempts += 1
        p = SystemParams.red_sideband(
            gamma_m=rng.uniform(0.1, 2.0),
            delta_m=rng.uniform(0.8, 1.2),
            g=rng.uniform(0.0, 0.5),
            gamma_a=rng.uniform(0.5, 2.0),
        )
        stable, _ = check_stability(build_drift(p, p.G_mag, optimal_squeezing(p).complex))
        if stable:
            draws.append(p)
    return draws


def random_spectrum_sets(count: int, seed: int = RANDOM_SEED) -> List[Tuple[SystemParams, SqueezingParams]]:
    """Stable bare-magnon parameter sets (G = 0, vacuum cavity and magnon baths)."""
    rng = np.random.default_rng(seed + 1)
    sets: List[Tuple[SystemParams, SqueezingParams]] = []
    attempts = 0
    while len(sets) < count and attempts < 50 * count:
        attempts += 1
        p = SystemParams(
            delta_a=rng.uniform(-2.0, 2.0),
            delta_m=rng.uniform(-2.0, 2.0),
            gamma_a=rng.uniform(0.2, 3.0),
            gamma_b=1e-3,
            gamma_m=rng.uniform(0.1, 3.0),
            g=rng.uniform(0.0, 1.0),
            G_mag=0.0,
            n_a=0.0,
            n_b=rng.uniform(0.0, 10.0),
            n_m=0.0,
        )
        limit = 0.9 * math.hypot(p.gamma_m, p.delta_m)
        sq = SqueezingParams(rng.uniform(0.0, limit), rng.uniform(-math.pi, math.pi))
        stable, _ = check_stability(build_drift(p, 0.0, sq.complex))
        if stable:
            sets.append((p, sq))
    return sets


class Referee:
    def __init__(self, quick: bool = False, perturb_phase: Optional[float] = None):
        self.quick = quick
        self.perturb_phase = perturb_phase

    def _timed(self, name: str, check: Callable[[], Tuple[bool, str]]) -> CheckResult:
        start = time.perf_counter()
        try:
            passed, detail = check()
        except MagnonCoolingError as e:
            passed, detail = False, f"raised {type(e).__name__}: {e}"
        result = CheckResult(name=name, passed=passed, detail=detail, elapsed=time.perf_counter() - start)
        log = logger.info if passed else logger.error
        log(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        return result

    # --- criteria -------------------------------------------------------
    def stokes_null(self) -> Tuple[bool, str]:
        ratios = []
        for gamma_m in PANEL_GAMMA_M:
            p = SystemParams.red_sideband(gamma_m=gamma_m)
            sq = optimal_squeezing(p)
            if self.perturb_phase is not None:
                sq = SqueezingParams(sq.zeta_abs, sq.phi + self.perturb_phase)
            s_minus, s_plus = magnon_spectrum(np.array([-p.omega_b, p.omega_b]), p, sq)
            ratios.append(s_minus / s_plus)
        worst = max(ratios)
        return worst < 1e-10, f"max S(-w_b)/S(+w_b) = {worst:.3e} over gamma_m {PANEL_GAMMA_M}"

    def unresolved_ground_state(self) -> Tuple[bool, str]:
        p = SystemParams.red_sideband(gamma_m=5.0)
        squeezed = steady_phonon_number(p, optimal_squeezing(p)).n_st
        unsqueezed = steady_phonon_number(p, SqueezingParams.none()).n_st
        far_detuned = steady_phonon_number(p.with_values(delta_m=0.02), SqueezingParams.none()).n_st
        passed = 0.3 <= squeezed <= 0.7 and unsqueezed >= 10.0 * squeezed and far_detuned > 100.0
        return passed, (
            f"N_st optimal = {squeezed:.4f}, unsqueezed = {unsqueezed:.4f}, "
            f"unsqueezed at Delta_m = 0.02 = {far_detuned:.1f}"
        )

    def optimizer_recovery(self) -> Tuple[bool, str]:
        cases = [SystemParams.red_sideband(gamma_m=g) for g in PANEL_GAMMA_M]
        if not self.quick:
            cases += random_optimizer_draws(20)
        worst_zeta = worst_phi = 0.0
        for p in cases:
            expected = optimal_squeezing(p)
            found = optimize_squeezing_numeric(p)
            worst_zeta = max(worst_zeta, abs(found.zeta_abs - expected.zeta_abs) / expected.zeta_abs)
            worst_phi = max(worst_phi, abs(wrap_phase(found.phi - expected.phi)))
        passed = worst_zeta < 1e-3 and worst_phi < 1e-3
        return passed, f"{len(cases)} cases, worst |zeta| rel. error {worst_zeta:.2e}, worst phi error {worst_phi:.2e} rad"

    def spectrum_equivalence(self) -> Tuple[bool, str]:
        count, points = (5, 201) if self.quick else (50, 1001)
        omega = np.linspace(-5.0, 5.0, points)
        worst = 0.0
        sets = random_spectrum_sets(count)
        for p, sq in sets:
            closed = magnon_spectrum(omega, p, sq)
            numeric = numeric_spectrum(omega, p, 0.0, sq.complex)
            floor = 1e-12 * closed.max()
            worst = max(worst, float(np.max(np.abs(closed - numeric) / (closed + floor))))
        return worst < 1e-8 and len(sets) == count, f"{len(sets)} parameter sets, max relative deviation {worst:.2e}"

    def weak_coupling(self) -> Tuple[bool, str]:
        discrepancies = []
        for coupling in (0.1, 0.05, 0.02):
            p = SystemParams.red_sideband(gamma_m=0.1, G_mag=coupling)
            sq = optimal_squeezing(p)
            n_st = steady_phonon_number(p, sq).n_st
            n_full = full_phonon_number(p, sq)
            discrepancies.append(abs(n_st - n_full) / n_full)
        decreasing = all(later < earlier for earlier, later in zip(discrepancies, discrepancies[1:]))
        passed = all(math.isfinite(d) for d in discrepancies) and decreasing and discrepancies[-1] < 0.2
        shown = ", ".join(f"{d:.3f}" for d in discrepancies)
        return passed, f"|N_st - N_full|/N_full at G = 0.1, 0.05, 0.02: {shown}"

    def cavity_adverse(self) -> Tuple[bool, str]:
        couplings = np.linspace(0.0, 1.0, 41)
        worst_rise = 0.0
        for gamma_m in PANEL_GAMMA_M:
            values = [
                steady_phonon_number(p, optimal_squeezing(p)).n_st
                for p in (SystemParams.red_sideband(gamma_m=gamma_m, g=g) for g in couplings)
            ]
            worst_rise = max(worst_rise, -float(np.min(np.diff(values))) / max(values))
        gamma_a = np.geomspace(0.1, 10.0, 41)
        values = [
            steady_phonon_number(p, optimal_squeezing(p)).n_st
            for p in (SystemParams.red_sideband(gamma_m=1.0, g=0.5, gamma_a=ga) for ga in gamma_a)
        ]
        worst_fall = max(0.0, float(np.max(np.diff(values))) / max(values))
        passed = worst_rise <= 1e-12 and worst_fall <= 1e-12
        return passed, f"largest decrease in g {worst_rise:.1e}, largest increase in gamma_a {worst_fall:.1e} (relative)"

    def thermal_anchor(self) -> Tuple[bool, str]:
        n = thermal_occupancy(2.0 * math.pi * 10e6, 0.048)
        return 95.0 <= n <= 105.0, f"n(10 MHz, 48 mK) = {n:.3f}"

    def feasibility_anchor(self) -> Tuple[bool, str]:
        two_pi = 2.0 * math.pi
        report = feasibility_report(two_pi * 6.4e-9, 1e15, two_pi * 10e6, 0.1 * two_pi * 10e6)
        zeta_mhz = report.zeta_abs / two_pi / 1e6
        passed = math.isclose(zeta_mhz, 12.8, rel_tol=1e-12) and report.meets_optimum
        return passed, f"|zeta|/2pi = {zeta_mhz:.6f} MHz, meets gamma_m = 0.1 w_b optimum: {report.meets_optimum}"

    def fluctuation_dissipation(self) -> Tuple[bool, str]:
        p = SystemParams(delta_a=0.7, delta_m=1.3, gamma_a=1.0, gamma_b=0.05, gamma_m=0.3,
                         g=0.0, G_mag=0.0, n_a=0.3, n_b=100.0, n_m=2.0)
        v = solve_lyapunov(build_drift(p, 0.0, 0.0), build_diffusion(p)).matrix
        expected = np.repeat([p.n_a, p.n_b, p.n_m], 2) + 0.5
        worst = float(np.max(np.abs(np.diag(v) - expected)))
        return worst < 1e-10, f"max |V_kk - (n_k + 1/2)| = {worst:.2e}"

    def stability_guard(self) -> Tuple[bool, str]:
        p = SystemParams.red_sideband(gamma_m=0.1, G_mag=0.0)
        threshold = math.hypot(p.gamma_m, p.delta_m)

        def abscissa(zeta_abs: float) -> float:
            return check_stability(build_drift(p, 0.0, complex(zeta_abs)))[1]

        below, _ = check_stability(build_drift(p, 0.0, complex(0.999 * threshold)))
        at, _ = check_stability(build_drift(p, 0.0, complex(threshold)))
        above, _ = check_stability(build_drift(p, 0.0, complex(1.001 * threshold)))
        boundary = brentq(abscissa, p.delta_m, 2.0 * threshold, xtol=1e-12)
        error = abs(boundary - threshold) / threshold
        passed = below and not at and not above and error < 1e-6
        return passed, f"threshold {threshold:.8f}, detected boundary {boundary:.8f} (rel. error {error:.1e})"

    # --------------------------------------------------------------------
    def run(self) -> List[CheckResult]:
        criteria = [
            ("Stokes sideband suppression", self.stokes_null),
            ("Ground state in the unresolved-sideband regime", self.unresolved_ground_state),
            ("Numeric optimizer recovers the closed-form optimum", self.optimizer_recovery),
            ("Closed-form vs frequency-domain spectrum", self.spectrum_equivalence),
            ("Weak-coupling convergence of N_st", self.weak_coupling),
            ("Adverse cavity coupling", self.cavity_adverse),
            ("Thermal occupancy anchor", self.thermal_anchor),
            ("Kerr squeezing feasibility anchor", self.feasibility_anchor),
            ("Fluctuation-dissipation anchor", self.fluctuation_dissipation),
            ("Stability guard", self.stability_guard),
        ]
        logger.info(f"Referee running {len(criteria)} criteria{' (quick)' if self.quick else ''}")
        return [self._timed(name, check) for name, check in criteria]
