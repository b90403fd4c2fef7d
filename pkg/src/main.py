"""
src/main.py

Command dispatch: spectrum, cool, steady, sweep, figures, optimize, verify.
Every command reads a TOML/JSON config (except figures/verify), calls the
engines in src/core and writes a CSV or JSON artifact with provenance.
"""
import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from src.core.errors import ConfigError, InstabilityError, MagnonCoolingError
from src.core.lyapunov_oracle import build_drift, check_stability, cooling_report, numeric_spectrum
from src.core.optimizer import optimize_squeezing_numeric
from src.core.params import SqueezingParams, SystemParams, wrap_phase
from src.core.referee import Referee
from src.core.spectrum import magnon_spectrum, optimal_squeezing
from src.core.steady_state import SteadyState, effective_params, solve_steady_state
from src.core.sweep import FIGURE_SETS, figure_dataset, run_sweep
from src.parsers.config_parser import ConfigParser, OptimizeBlock, RunConfig
from src.settings import get_settings
from src.writers.dataset_writer import DatasetWriter
from src.writers.report_writer import ReportWriter

SETTINGS = get_settings()

logger.remove()
logger.add(sys.stderr, format="<green>{time:HH:mm:ss}</green> | <level>{message}</level>", level=SETTINGS.log_level)

DEFAULT_FORMATS = {"spectrum": "csv", "cool": "json", "steady": "json", "sweep": "csv", "optimize": "json"}


@dataclass
class ResolvedSqueezing:
    """System and squeezing actually fed to the engines."""
    system: SystemParams
    squeezing: SqueezingParams
    source: str
    g_eff: complex
    zeta: complex
    steady: Optional[SteadyState] = None


def resolve_squeezing(cfg: RunConfig) -> ResolvedSqueezing:
    p = cfg.system_params()
    mode = cfg.squeezing_mode()

    if mode == "drive":
        drive = cfg.drive_config()
        solve_mode = cfg.drive.mode
        steady = solve_steady_state(drive, mode=solve_mode)
        eff = effective_params(drive, steady)
        if solve_mode == "self_consistent":
            p = p.with_values(delta_m=steady.delta_m_eff)
        p = eff.apply(p)
        logger.info(f"Drive-derived |G|={eff.g_abs:.6g}, |zeta|={eff.zeta_abs:.6g}, phi_relative={eff.phi_relative:.6g}")
        return ResolvedSqueezing(p, eff.squeezing(), mode, eff.g_eff, eff.zeta, steady)

    if mode == "fixed":
        sq = cfg.fixed_squeezing()
    elif mode == "analytic_optimal":
        sq = optimal_squeezing(p)
    elif mode == "numeric_optimal":
        sq = optimize_squeezing_numeric(p).squeezing
    else:
        sq = SqueezingParams.none()
    return ResolvedSqueezing(p, sq, mode, complex(p.G_mag), sq.complex)


def squeezing_record(resolved: ResolvedSqueezing) -> Dict[str, object]:
    record: Dict[str, object] = {
        "mode": resolved.source,
        "zeta_abs": resolved.squeezing.zeta_abs,
        "phi": resolved.squeezing.phi,
    }
    if resolved.steady is not None:
        record["g_eff"] = resolved.g_eff
        record["zeta"] = resolved.zeta
    return record


def provenance(p: SystemParams, resolved: ResolvedSqueezing) -> Dict[str, object]:
    header: Dict[str, object] = dict(p.as_dict())
    header["squeezing_mode"] = resolved.source
    header["zeta_abs"] = resolved.squeezing.zeta_abs
    header["phi"] = resolved.squeezing.phi
    return header


def stability_record(resolved: ResolvedSqueezing) -> Dict[str, object]:
    p = resolved.system
    stable, abscissa = check_stability(build_drift(p, resolved.g_eff, resolved.zeta))
    return {"stable": stable, "spectral_abscissa": abscissa, "weak_coupling_ok": p.weak_coupling_ok}


def output_target(cfg: Optional[RunConfig], command: str, args) -> Tuple[Path, str]:
    block = cfg.output if cfg is not None else None
    path = args.out or (block.path if block is not None else None)
    fmt = args.format or (block.format if block is not None else None)
    if fmt is None and path is not None and Path(path).suffix.lower() in (".csv", ".json"):
        fmt = Path(path).suffix.lower().lstrip(".")
    fmt = fmt or DEFAULT_FORMATS[command]
    if path is None:
        path = SETTINGS.output_dir / f"{command}.{fmt}"
    return Path(path), fmt


def load_config(args, command: str) -> RunConfig:
    if not args.config:
        raise ConfigError(f"command {command!r} needs --config <path>")
    cfg = ConfigParser.parse_file(args.config)
    cfg.check_command(command)
    return cfg


def write_record(cfg: RunConfig, command: str, args, result: Dict[str, object],
                 provenance_values: Dict[str, object]) -> Path:
    """Single-record commands: JSON report, or a one-row CSV of the scalar fields."""
    path, fmt = output_target(cfg, command, args)
    writer = DatasetWriter(cfg.output.precision)
    if fmt == "json":
        return writer.write_json(path, command, cfg.echo(command), result)
    scalars = {k: v for k, v in result.items() if not isinstance(v, (dict, list, complex))}
    return writer.write_csv(path, command, provenance_values, list(scalars), [list(scalars.values())])


# --- commands -----------------------------------------------------------
def cmd_spectrum(args) -> int:
    cfg = load_config(args, "spectrum")
    resolved = resolve_squeezing(cfg)
    p = resolved.system
    omega = cfg.omega_grid()

    columns: Dict[str, np.ndarray] = {
        "omega_over_omega_b": omega / p.omega_b,
        "S": magnon_spectrum(omega, p, resolved.squeezing),
    }
    header = provenance(p, resolved)
    header["grid"] = f"{len(omega)} points from {omega[0]:.12g} to {omega[-1]:.12g}"
    stability = stability_record(resolved)
    header.update(stability)
    if not stability["stable"]:
        logger.warning(f"Unstable configuration (spectral abscissa {stability['spectral_abscissa']:.6g}); "
                       "the spectrum is not a stationary one")
    if args.oracle:
        # the closed form describes the bare magnon driven by vacuum noise
        bare = p.with_values(n_a=0.0, n_m=0.0)
        columns["S_oracle"] = numeric_spectrum(omega, bare, 0.0, resolved.squeezing.complex)
        header["oracle"] = "frequency-domain spectrum, bare magnon, vacuum cavity and magnon baths"

    path, fmt = output_target(cfg, "spectrum", args)
    writer = DatasetWriter(cfg.output.precision)
    if fmt == "json":
        result = {"squeezing": squeezing_record(resolved), **stability, **{k: v.tolist() for k, v in columns.items()}}
        writer.write_json(path, "spectrum", cfg.echo("spectrum"), result)
    else:
        writer.write_csv(path, "spectrum", header, list(columns), zip(*columns.values()))
    return 0


def cmd_cool(args) -> int:
    cfg = load_config(args, "cool")
    resolved = resolve_squeezing(cfg)
    p = resolved.system

    stable, abscissa = check_stability(build_drift(p, resolved.g_eff, resolved.zeta))
    if not stable:
        raise InstabilityError(abscissa)
    if not p.weak_coupling_ok:
        logger.warning(f"|G| = {p.G_mag:.6g} is not small against omega_b; N_st is outside its weak-coupling regime")

    report = cooling_report(p, resolved.squeezing, resolved.g_eff, resolved.zeta)
    result = {
        "squeezing": squeezing_record(resolved),
        "a_plus": report.a_plus,
        "a_minus": report.a_minus,
        "s_minus": report.s_minus,
        "s_plus": report.s_plus,
        "gamma_net": report.gamma_net,
        "n_st": report.n_st,
        "n_full": report.n_full,
        "rate_convention": report.rate_convention,
        "weak_coupling_ok": report.weak_coupling_ok,
        "stable": report.stable,
        "spectral_abscissa": abscissa,
    }
    logger.info(f"N_st = {report.n_st:.6g}, N_full = {report.n_full:.6g}")
    write_record(cfg, "cool", args, result, provenance(p, resolved))
    return 0


def cmd_steady(args) -> int:
    cfg = load_config(args, "steady")
    drive = cfg.drive_config()
    steady = solve_steady_state(drive, mode=cfg.drive.mode)
    eff = effective_params(drive, steady)
    if steady.multistable:
        logger.warning(f"Other real branches exist: |m_s|^2 in {steady.candidate_populations}")

    result = {
        "mode": cfg.drive.mode,
        "a_s": steady.a_s,
        "b_s": steady.b_s,
        "m_s": steady.m_s,
        "delta_m_eff": steady.delta_m_eff,
        "shift": steady.shift(drive.system),
        "converged": steady.converged,
        "iterations_used": steady.iterations_used,
        "residual": steady.residual,
        "multistable": steady.multistable,
        "candidate_populations": steady.candidate_populations,
        "g_abs": eff.g_abs,
        "zeta_abs": eff.zeta_abs,
        "phi": eff.phi,
        "phi_relative": eff.phi_relative,
    }
    header = dict(drive.system.as_dict())
    header.update(e_abs=drive.e_abs, theta=drive.theta, g0=drive.g0, xi=drive.xi, mode=cfg.drive.mode)
    write_record(cfg, "steady", args, result, header)
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args, "sweep")
    spec = cfg.sweep_spec()
    result = run_sweep(spec, workers=SETTINGS.workers)

    path, fmt = output_target(cfg, "sweep", args)
    writer = DatasetWriter(cfg.output.precision)
    if fmt == "json":
        payload = {"label": result.label, "columns": result.header(), "rows": result.table()}
        writer.write_json(path, "sweep", cfg.echo("sweep"), payload)
    else:
        writer.write_csv(path, "sweep", spec.provenance(), result.header(), result.table())
    return 0


def cmd_figures(args) -> int:
    which = list(FIGURE_SETS) if args.which == "all" else [args.which]
    out_dir = Path(args.out) if args.out else SETTINGS.output_dir / "figures"
    writer = DatasetWriter()

    bundles = {}
    files: Dict[str, str] = {}
    for name in which:
        bundle = figure_dataset(name, workers=SETTINGS.workers)
        for label, result in bundle.items():
            path = writer.write_csv(out_dir / f"{label}.csv", f"figures {name}", result.spec.provenance(),
                                    result.header(), result.table())
            files[label] = path.name
        bundles[name] = bundle
    ReportWriter().write_bundle_index(out_dir, bundles, files)
    logger.info(f"Figure bundle written to {out_dir} ({len(files)} datasets)")
    return 0


def cmd_optimize(args) -> int:
    cfg = load_config(args, "optimize")
    p = cfg.system_params()
    options = cfg.optimize or OptimizeBlock()
    objective = args.objective or options.objective

    found = optimize_squeezing_numeric(p, objective=objective, zeta_points=options.zeta_points,
                                       phi_points=options.phi_points, rate=options.rate)
    analytic = optimal_squeezing(p)
    result = {
        "objective": found.objective,
        "zeta_abs": found.zeta_abs,
        "phi": found.phi,
        "objective_min": found.objective_min,
        "n_st": found.n_st_min,
        "degenerate": found.degenerate,
        "evaluations": found.evaluations,
        "analytic_zeta_abs": analytic.zeta_abs,
        "analytic_phi": analytic.phi,
        "zeta_rel_difference": abs(found.zeta_abs - analytic.zeta_abs) / analytic.zeta_abs,
        "phi_difference": abs(wrap_phase(found.phi - analytic.phi)),
    }
    header = dict(p.as_dict())
    header.update(objective=objective, zeta_points=options.zeta_points, phi_points=options.phi_points)
    write_record(cfg, "optimize", args, result, header)
    return 0


def cmd_verify(args) -> int:
    checks = Referee(quick=args.quick, perturb_phase=args.perturb_phase).run()
    print(ReportWriter().verify_summary(checks, quick=args.quick), end="")
    return 0 if all(c.passed for c in checks) else 1


COMMANDS = {
    "spectrum": cmd_spectrum,
    "cool": cmd_cool,
    "steady": cmd_steady,
    "sweep": cmd_sweep,
    "figures": cmd_figures,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magsq", description="Magnon-squeezing enhanced mechanical cooling: spectra, phonon numbers, sweeps."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("spectrum", "cool", "steady", "sweep", "optimize"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="TOML config or a JSON report written by this tool")
        cmd.add_argument("--out", help="output file (default: $MAGSQ_OUTPUT_DIR/<command>.<format>)")
        cmd.add_argument("--format", choices=["csv", "json"])
        if name == "spectrum":
            cmd.add_argument("--oracle", action="store_true", help="add the frequency-domain spectrum column")
        if name == "optimize":
            cmd.add_argument("--objective", choices=["stokes", "n_st"])

    figures = sub.add_parser("figures")
    figures.add_argument("which", choices=[*FIGURE_SETS, "all"])
    figures.add_argument("--out", help="output directory (default: $MAGSQ_OUTPUT_DIR/figures)")

    verify = sub.add_parser("verify")
    verify.add_argument("--quick", action="store_true", help="reduced randomized draws")
    verify.add_argument("--perturb-phase", type=float, default=None,
                        help="offset (rad) added to the optimal phase in the Stokes check")
    return parser


def dispatch(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except MagnonCoolingError as e:
        logger.error(f"{args.command} failed ({type(e).__name__}): {e}")
        return e.exit_code


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
