import json
import math

import pytest

from src.core.errors import ConfigError, SchemaError
from src.core.spectrum import thermal_occupancy
from src.parsers.config_parser import ConfigParser

SYSTEM = """
[system]
delta_a = 1.0
delta_m = 1.0
gamma_a = 1.0
gamma_b = 1e-5
gamma_m = 5.0
g = 0.0
G_mag = 0.1
n_a = 0.0
n_b = 100.0
n_m = 0.0
"""


def test_minimal_config():
    cfg = ConfigParser.parse_content(SYSTEM)
    p = cfg.system_params()
    assert p.gamma_m == 5.0
    assert p.omega_b == 1.0
    assert cfg.squeezing_mode() == "none"
    assert cfg.output.precision == 12


def test_default_omega_grid():
    grid = ConfigParser.parse_content(SYSTEM).omega_grid()
    assert len(grid) == 1201
    assert (grid[0], grid[-1]) == (-3.0, 3.0)


def test_misspelled_key_is_rejected():
    with pytest.raises(ConfigError, match="gama_m"):
        ConfigParser.parse_content(SYSTEM.replace("gamma_m", "gama_m"))


def test_negative_rate_is_rejected():
    with pytest.raises(ConfigError, match="gamma_b"):
        ConfigParser.parse_content(SYSTEM.replace("gamma_b = 1e-5", "gamma_b = -1e-5"))


def test_missing_occupancy_is_an_error():
    cfg = ConfigParser.parse_content(SYSTEM.replace("n_b = 100.0\n", ""))
    with pytest.raises(ConfigError, match="n_b"):
        cfg.system_params()


def test_toml_syntax_error():
    with pytest.raises(ConfigError, match="TOML"):
        ConfigParser.parse_content("[system\n")


def test_fixed_squeezing_needs_both_values():
    with pytest.raises(ConfigError):
        ConfigParser.parse_content(SYSTEM + '\n[squeezing]\nmode = "fixed"\nzeta_abs = 1.0\n')
    with pytest.raises(ConfigError):
        ConfigParser.parse_content(SYSTEM + '\n[squeezing]\nmode = "analytic_optimal"\nphi = 1.0\n')


def test_fixed_squeezing():
    cfg = ConfigParser.parse_content(SYSTEM + '\n[squeezing]\nmode = "fixed"\nzeta_abs = 5.0\nphi = 3.0\n')
    sq = cfg.fixed_squeezing()
    assert (sq.zeta_abs, sq.phi) == (5.0, 3.0)


def test_command_blocks():
    cfg = ConfigParser.parse_content(SYSTEM)
    cfg.check_command("cool")
    with pytest.raises(SchemaError, match="drive"):
        cfg.check_command("steady")
    with pytest.raises(SchemaError):
        cfg.check_command("verify")


def test_block_not_belonging_to_command():
    cfg = ConfigParser.parse_content(SYSTEM + "\n[optimize]\nphi_points = 16\n")
    with pytest.raises(SchemaError, match="optimize"):
        cfg.check_command("cool")


def test_config_written_for_another_command():
    cfg = ConfigParser.parse_content('command = "spectrum"\n' + SYSTEM)
    with pytest.raises(SchemaError):
        cfg.check_command("cool")


def test_drive_squeezing_needs_drive_block():
    with pytest.raises(ConfigError, match="drive"):
        ConfigParser.parse_content(SYSTEM + '\n[squeezing]\nmode = "drive"\n')


def test_si_units():
    content = """
units = "si"
omega_b_hz = 10e6
temperature_k = 0.048

[system]
delta_a = 10e6
delta_m = 10e6
gamma_a = 10e6
gamma_b = 100.0
gamma_m = 1e6
g = 0.0
G_mag = 1e6
n_a = 0.0
n_m = 0.0

[drive]
e_abs = 1e6
g0 = 10.0
xi = 1e-2
"""
    cfg = ConfigParser.parse_content(content)
    p = cfg.system_params()
    assert p.omega_b == 1.0
    assert p.gamma_m == pytest.approx(0.1)
    assert p.gamma_b == pytest.approx(1e-5)
    assert p.n_b == pytest.approx(thermal_occupancy(2 * math.pi * 10e6, 0.048))
    d = cfg.drive_config()
    assert d.e_abs == pytest.approx(0.1)
    assert d.xi == pytest.approx(1e-9)


def test_si_requires_mechanical_frequency():
    with pytest.raises(ConfigError, match="omega_b_hz"):
        ConfigParser.parse_content('units = "si"\n' + SYSTEM)


def test_normalized_rejects_si_fields():
    with pytest.raises(ConfigError):
        ConfigParser.parse_content("temperature_k = 0.048\n" + SYSTEM)


def test_sweep_block_grid():
    cfg = ConfigParser.parse_content(SYSTEM + """
[sweep]
variable = "gamma_a"
metrics = ["n_st"]
start = 0.1
stop = 10.0
points = 3
spacing = "log"
""")
    spec = cfg.sweep_spec()
    assert spec.grid == pytest.approx((0.1, 1.0, 10.0))
    assert spec.fixed.gamma_m == 5.0


def test_sweep_block_needs_one_grid():
    with pytest.raises(ConfigError):
        ConfigParser.parse_content(SYSTEM + '\n[sweep]\nvariable = "g"\nmetrics = ["n_st"]\nvalues = [0.0]\nstart = 0.0\n')


def test_unknown_sweep_variable():
    cfg = ConfigParser.parse_content(SYSTEM + '\n[sweep]\nvariable = "kappa"\nmetrics = ["n_st"]\nvalues = [0.0]\n')
    with pytest.raises(SchemaError):
        cfg.sweep_spec()


def test_echo_round_trip_through_json_report():
    cfg = ConfigParser.parse_content(SYSTEM + '\n[squeezing]\nmode = "analytic_optimal"\n')
    report = {"version": "0.1.0", "command": "cool", "config": cfg.echo("cool"), "result": {"n_st": 0.5}}
    again = ConfigParser.parse_content(json.dumps(report), ".json")
    again.check_command("cool")
    assert again.system_params() == cfg.system_params()
    assert again.squeezing_mode() == "analytic_optimal"


def test_json_syntax_error():
    with pytest.raises(ConfigError, match="JSON"):
        ConfigParser.parse_content("{", ".json")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ConfigParser.parse_file(str(tmp_path / "nope.toml"))
