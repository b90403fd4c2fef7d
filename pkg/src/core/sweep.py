"""
src/core/sweep.py

THE SWEEP ENGINE
----------------
One-dimensional parameter sweeps over the cooling model and the labeled
sweep bundles that regenerate the spectrum / phonon-number figure data.

Grid points are independent. They may be evaluated on a thread pool; rows
are always assembled in grid order.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from src.core.errors import MagnonCoolingError, SchemaError
from src.core.lyapunov_oracle import build_drift, check_stability, full_phonon_number, numeric_spectrum
from src.core.optimizer import optimize_squeezing_numeric
from src.core.params import SqueezingParams, SystemParams
from src.core.spectrum import magnon_spectrum, optimal_squeezing, steady_phonon_number

SYSTEM_VARIABLES = tuple(f.name for f in fields(SystemParams))
SQUEEZING_VARIABLES = ("zeta_abs", "phi")
PROBE_VARIABLE = "omega"
VARIABLES = SYSTEM_VARIABLES + SQUEEZING_VARIABLES + (PROBE_VARIABLE,)

POINT_METRICS = ("s_minus", "s_plus", "a_plus", "a_minus", "gamma_net", "n_st", "n_full", "stability")
PROBE_METRICS = ("s_omega", "s_omega_oracle")
METRICS = POINT_METRICS + PROBE_METRICS

SQUEEZING_MODES = ("none", "analytic_optimal", "numeric_optimal", "fixed")
DEFAULT_POINTS = 401


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: Tuple[float, ...]
    fixed: SystemParams
    metrics: Tuple[str, ...]
    squeezing_mode: str = "none"
    squeezing: Optional[SqueezingParams] = None
    label: str = ""
    rate: str = "number"
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        object.__setattr__(self, "notes", tuple(self.notes))

        if self.variable not in VARIABLES:
            raise SchemaError(f"unknown sweep variable {self.variable!r}; expected one of {VARIABLES}")
        if not self.grid:
            raise SchemaError("sweep grid is empty")
        steps = np.diff(self.grid)
        if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
            raise SchemaError(f"sweep grid over {self.variable!r} is not strictly monotone")
        if not self.metrics:
            raise SchemaError("no metrics requested")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise SchemaError(f"unknown metrics {unknown}; expected a subset of {METRICS}")
        if self.variable != PROBE_VARIABLE and any(m in PROBE_METRICS for m in self.metrics):
            raise SchemaError(f"metrics {PROBE_METRICS} need variable {PROBE_VARIABLE!r}")
        if self.squeezing_mode not in SQUEEZING_MODES:
            raise SchemaError(f"unknown squeezing mode {self.squeezing_mode!r}; expected one of {SQUEEZING_MODES}")
        if self.squeezing_mode == "fixed" and self.squeezing is None:
            raise SchemaError("squeezing mode 'fixed' needs explicit zeta_abs and phi")

    def provenance(self) -> Dict[str, object]:
        header: Dict[str, object] = {"label": self.label or self.variable, "variable": self.variable}
        header["grid"] = f"{len(self.grid)} points from {self.grid[0]:.12g} to {self.grid[-1]:.12g}"
        for name, value in self.fixed.as_dict().items():
            if name != self.variable:
                header[name] = value
        header["squeezing_mode"] = self.squeezing_mode
        if self.squeezing is not None:
            header["zeta_abs"] = self.squeezing.zeta_abs
            header["phi"] = self.squeezing.phi
        header["rate_convention"] = self.rate
        for i, note in enumerate(self.notes):
            header[f"note_{i + 1}"] = note
        return header


@dataclass
class SweepRow:
    value: float
    metrics: Dict[str, Optional[float]]
    stable: Optional[bool]
    weak_coupling_ok: Optional[bool]
    zeta_abs: Optional[float] = None
    phi: Optional[float] = None
    error: Optional[str] = None


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: List[SweepRow] = field(default_factory=list)

    @property
    def label(self) -> str:
        return self.spec.label or self.spec.variable

    def column(self, name: str) -> np.ndarray:
        """Metric column as floats, NaN where the point carried no value."""
        if name == self.spec.variable:
            return np.array([row.value for row in self.rows])
        values = []
        for row in self.rows:
            value = getattr(row, name) if name in ("zeta_abs", "phi") else row.metrics.get(name)
            values.append(math.nan if value is None else float(value))
        return np.array(values)

    def header(self) -> List[str]:
        return [self.spec.variable, *self.spec.metrics, "zeta_abs", "phi", "stable", "weak_coupling_ok", "error"]

    def table(self) -> List[List[object]]:
        return [
            [row.value, *(row.metrics.get(m) for m in self.spec.metrics), row.zeta_abs, row.phi,
             row.stable, row.weak_coupling_ok, row.error]
            for row in self.rows
        ]


def _squeezing_for(spec: SweepSpec, p: SystemParams) -> SqueezingParams:
    if spec.squeezing_mode == "none":
        return SqueezingParams.none()
    if spec.squeezing_mode == "fixed":
        return spec.squeezing
    if spec.squeezing_mode == "analytic_optimal":
        return optimal_squeezing(p)
    return optimize_squeezing_numeric(p).squeezing


def _apply_variable(spec: SweepSpec, value: float, sq: SqueezingParams) -> SqueezingParams:
    if spec.variable == "zeta_abs":
        sq = SqueezingParams(value, sq.phi)
    elif spec.variable == "phi":
        sq = SqueezingParams(sq.zeta_abs, value)
    return sq


def evaluate_point(spec: SweepSpec, value: float) -> SweepRow:
    metrics: Dict[str, Optional[float]] = {m: None for m in spec.metrics}
    try:
        p = spec.fixed
        if spec.variable in SYSTEM_VARIABLES:
            p = p.with_values(**{spec.variable: value})
        sq = _apply_variable(spec, value, _squeezing_for(spec, p))
    except MagnonCoolingError as e:
        return SweepRow(value=value, metrics=metrics, stable=None, weak_coupling_ok=None, error=str(e))

    row = SweepRow(value=value, metrics=metrics, stable=None, weak_coupling_ok=p.weak_coupling_ok,
                   zeta_abs=sq.zeta_abs, phi=sq.phi)
    stable, abscissa = check_stability(build_drift(p, p.G_mag, sq.complex))
    row.stable = stable
    if not stable:
        row.error = f"unstable (spectral abscissa {abscissa:.6g})"
        return row

    try:
        if spec.variable == PROBE_VARIABLE:
            # probe sweeps show the bare magnon spectrum
            if "s_omega" in metrics:
                metrics["s_omega"] = magnon_spectrum(value, p, sq)
            if "s_omega_oracle" in metrics:
                metrics["s_omega_oracle"] = numeric_spectrum(value, p, 0.0, sq.complex)
        if "stability" in metrics:
            metrics["stability"] = abscissa
        if "n_full" in metrics:
            metrics["n_full"] = full_phonon_number(p, sq)

        wanted = {"s_minus", "s_plus", "a_plus", "a_minus", "gamma_net", "n_st"} & set(metrics)
        if wanted:
            report = steady_phonon_number(p, sq, rate=spec.rate)
            for name in wanted:
                metrics[name] = getattr(report, name)
    except MagnonCoolingError as e:
        row.error = str(e)

    row.metrics = {name: (None if v is None or not math.isfinite(v) else float(v)) for name, v in metrics.items()}
    if any(v is None for v in row.metrics.values()) and row.error is None:
        logger.warning(f"{spec.label or spec.variable}: non-finite metric at {spec.variable}={value:.6g}")
    return row


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    logger.info(f"Sweep '{spec.label or spec.variable}': {len(spec.grid)} points, metrics {list(spec.metrics)}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: evaluate_point(spec, v), spec.grid))
    else:
        rows = [evaluate_point(spec, v) for v in spec.grid]
    unstable = sum(1 for r in rows if r.stable is False)
    if unstable:
        logger.info(f"Sweep '{spec.label or spec.variable}': {unstable} unstable points reported without metrics")
    return SweepResult(spec=spec, rows=rows)


FIGURE_SETS = ("fig2_row1", "fig2_row2", "fig2_row3", "fig3a", "fig3b")
FIG2_ROWS = {"fig2_row1": (0.1, "abc"), "fig2_row2": (1.0, "def"), "fig2_row3": (5.0, "ghi")}
FIG3A_GAMMA_M = (0.1, 1.0, 5.0)
FIG3B_COUPLINGS = (0.0, 0.5, 1.0)
FIG3B_GAMMA_M = 1.0


def figure_specs(which: str) -> List[SweepSpec]:
    if which in FIG2_ROWS:
        gamma_m, panels = FIG2_ROWS[which]
        fixed = SystemParams.red_sideband(gamma_m=gamma_m)
        spectrum_grid = np.linspace(-3.0, 3.0, 601)
        phase_grid = np.linspace(-math.pi, math.pi, DEFAULT_POINTS)
        detuning_grid = np.linspace(0.0, 2.0, DEFAULT_POINTS)
        specs = []
        for mode, tag in (("none", "unsqueezed"), ("analytic_optimal", "optimal")):
            specs.append(SweepSpec(
                variable="omega", grid=spectrum_grid, fixed=fixed, metrics=("s_omega",),
                squeezing_mode=mode, label=f"fig2{panels[0]}_spectrum_{tag}",
            ))
        specs.append(SweepSpec(
            variable="phi", grid=phase_grid, fixed=fixed, metrics=("n_st", "a_plus", "a_minus"),
            squeezing_mode="analytic_optimal", label=f"fig2{panels[1]}_phase",
            notes=("|zeta| held at its optimum, phi in radians",),
        ))
        for mode, tag in (("none", "unsqueezed"), ("analytic_optimal", "optimal")):
            specs.append(SweepSpec(
                variable="delta_m", grid=detuning_grid, fixed=fixed,
                metrics=("n_st", "a_plus", "a_minus", "gamma_net"),
                squeezing_mode=mode, label=f"fig2{panels[2]}_detuning_{tag}",
            ))
        return specs

    if which == "fig3a":
        return [
            SweepSpec(
                variable="g", grid=np.linspace(0.0, 1.0, 41), fixed=SystemParams.red_sideband(gamma_m=gamma_m),
                metrics=("n_st",), squeezing_mode="analytic_optimal", label=f"fig3a_gamma_m_{gamma_m:g}",
            )
            for gamma_m in FIG3A_GAMMA_M
        ]

    if which == "fig3b":
        return [
            SweepSpec(
                variable="gamma_a", grid=np.geomspace(0.1, 10.0, 41),
                fixed=SystemParams.red_sideband(gamma_m=FIG3B_GAMMA_M, g=g), metrics=("n_st",),
                squeezing_mode="analytic_optimal", label=f"fig3b_g_{g:g}",
                notes=("gamma_a range [0.1, 10] omega_b chosen for this dataset",),
            )
            for g in FIG3B_COUPLINGS
        ]

    raise SchemaError(f"unknown figure set {which!r}; expected one of {FIGURE_SETS}")


def figure_dataset(which: str, workers: int = 1) -> Dict[str, SweepResult]:
    """Labeled sweep results for one figure panel set, in panel order."""
    return {spec.label: run_sweep(spec, workers=workers) for spec in figure_specs(which)}

