import cmath
import math

import pytest

from src.core.errors import ConvergenceError, ParameterError
from src.core.params import SystemParams
from src.core.steady_state import (
    DriveConfig,
    SteadyStateSolver,
    effective_params,
    feasibility_report,
    solve_steady_state,
)

TWO_PI = 2 * math.pi


def drive(e_abs=0.5, theta=0.0, g0=0.01, xi=0.01, **system):
    values = dict(gamma_m=0.5, g=0.3, gamma_b=1e-3)
    values.update(system)
    return DriveConfig(system=SystemParams.red_sideband(**values), e_abs=e_abs, theta=theta, g0=g0, xi=xi)


def test_undriven_system_is_empty():
    d = drive(e_abs=0.0)
    ss = solve_steady_state(d)
    assert ss.a_s == ss.b_s == ss.m_s == 0
    assert ss.delta_m_eff == d.system.delta_m
    assert ss.shift(d.system) == 0.0
    eff = effective_params(d, ss)
    assert eff.g_eff == 0 and eff.zeta == 0


def test_without_cavity_coupling():
    d = drive(g=0.0, xi=0.0, g0=0.0)
    ss = solve_steady_state(d)
    assert ss.a_s == 0
    assert ss.m_s == pytest.approx(0.5 / (0.5 + 1.0j))


def test_reported_detuning_is_exact():
    d = drive()
    ss = solve_steady_state(d)
    expected = d.system.delta_m + 2 * d.g0 * ss.b_s.real + 2 * d.xi * abs(ss.m_s) ** 2
    assert ss.delta_m_eff == pytest.approx(expected, rel=1e-15)


def test_amplitude_scales_linearly_in_drive():
    single = solve_steady_state(drive(e_abs=0.3))
    double = solve_steady_state(drive(e_abs=0.6))
    assert double.m_s == pytest.approx(2 * single.m_s, rel=1e-14)


def test_drive_phase_steers_squeezing_phase():
    alpha = 0.4
    d0, d1 = drive(theta=0.0), drive(theta=alpha)
    eff0 = effective_params(d0, solve_steady_state(d0))
    eff1 = effective_params(d1, solve_steady_state(d1))
    assert eff1.zeta_abs == pytest.approx(eff0.zeta_abs)
    assert eff1.g_abs == pytest.approx(eff0.g_abs)
    assert cmath.phase(eff1.zeta / eff0.zeta) == pytest.approx(2 * alpha)
    # the phase seen from the frame where G is real does not move
    assert eff1.phi_relative == pytest.approx(eff0.phi_relative)


def test_self_consistent_residuals():
    d = drive()
    ss = solve_steady_state(d, mode="self_consistent")
    assert ss.converged
    assert ss.iterations_used > 0
    assert SteadyStateSolver.residual(d, ss) < 1e-10
    assert ss.shift(d.system) > 0


def test_iteration_cap_raises(monkeypatch):
    monkeypatch.setattr(SteadyStateSolver, "MAX_ITERATIONS", 1)
    with pytest.raises(ConvergenceError) as excinfo:
        solve_steady_state(drive(), mode="self_consistent")
    assert excinfo.value.residual > 1e-10
    assert excinfo.value.exit_code == 4


def test_unknown_mode():
    with pytest.raises(ParameterError):
        solve_steady_state(drive(), mode="exact")


def test_linear_population_root():
    d = drive(xi=0.0, g0=0.0)
    ss = solve_steady_state(d)
    assert SteadyStateSolver.population_roots(d) == pytest.approx([abs(ss.m_s) ** 2])
    assert not ss.multistable


def test_undriven_population_root():
    assert SteadyStateSolver.population_roots(drive(e_abs=0.0)) == [0.0]


def test_real_amplitude_gives_negative_imaginary_squeezing():
    d = drive(g=0.0, delta_m=0.0)
    ss = solve_steady_state(d)
    assert ss.m_s.imag == pytest.approx(0.0, abs=1e-15)
    eff = effective_params(d, ss)
    assert eff.phi == pytest.approx(-math.pi / 2)
    assert eff.zeta_abs == pytest.approx(2 * d.xi * abs(ss.m_s) ** 2, rel=1e-15)
    # G real as well, so both frames agree
    assert eff.phi_relative == pytest.approx(-math.pi / 2)


def test_effective_params_apply_sets_coupling():
    d = drive()
    eff = effective_params(d, solve_steady_state(d))
    assert eff.apply(d.system).G_mag == pytest.approx(d.g0 * abs(solve_steady_state(d).m_s))
    assert eff.squeezing().zeta_abs == pytest.approx(eff.zeta_abs)


def test_negative_drive_rejected():
    with pytest.raises(ParameterError):
        drive(xi=-1.0)


def test_feasibility_anchor():
    report = feasibility_report(TWO_PI * 6.4e-9, 1e15, TWO_PI * 10e6, 0.1 * TWO_PI * 10e6)
    assert report.zeta_abs / TWO_PI / 1e6 == pytest.approx(12.8, rel=1e-12)
    assert report.meets_optimum


def test_feasibility_fails_for_broad_magnon():
    report = feasibility_report(TWO_PI * 6.4e-9, 1e15, TWO_PI * 10e6, 5 * TWO_PI * 10e6)
    assert not report.meets_optimum


def test_feasibility_without_kerr():
    report = feasibility_report(0.0, 1e15, 1.0, 0.1)
    assert report.zeta_abs == 0.0
    assert not report.meets_optimum


def test_blue_detuned_kerr_drive_is_multistable():
    d = drive(e_abs=1.0, g0=0.0, xi=0.05, delta_m=-1.0, gamma_m=0.1, g=0.0)
    roots = SteadyStateSolver.population_roots(d)
    assert len(roots) == 3
    assert roots == sorted(roots)
    assert roots == pytest.approx([1.3056, 6.0643, 12.6301], abs=1e-3)
    for n in roots:
        # n (gamma_m^2 + (Delta_m + 2 xi n)^2) = |E|^2
        assert n * (0.1 ** 2 + (-1.0 + 0.1 * n) ** 2) == pytest.approx(1.0)

    ss = solve_steady_state(d, mode="self_consistent")
    assert ss.multistable is True
    assert ss.candidate_populations == roots
    assert ss.residual < 1e-8
    assert any(abs(ss.m_s) ** 2 == pytest.approx(n, rel=1e-6) for n in roots)
