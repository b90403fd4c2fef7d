import csv
import json

import pytest

from src.core.steady_state import SteadyStateSolver
from src.main import dispatch

SYSTEM = """
[system]
delta_a = 1.0
delta_m = 1.0
gamma_a = 1.0
gamma_b = 1e-5
gamma_m = {gamma_m}
g = 0.0
G_mag = {G_mag}
n_a = 0.0
n_b = 100.0
n_m = 0.0
"""


def write_config(tmp_path, body, gamma_m=5.0, G_mag=0.1, name="run.toml"):
    path = tmp_path / name
    path.write_text(SYSTEM.format(gamma_m=gamma_m, G_mag=G_mag) + body, encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def test_cool_with_optimal_squeezing(tmp_path):
    config = write_config(tmp_path, '\n[squeezing]\nmode = "analytic_optimal"\n')
    out = tmp_path / "cool.json"
    assert dispatch(["cool", "--config", config, "--out", str(out)]) == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    result = payload["result"]
    assert result["n_st"] == pytest.approx(0.4975, abs=1e-4)
    assert result["squeezing"] == {"mode": "analytic_optimal", "zeta_abs": 5.0, "phi": pytest.approx(3.14159265359)}
    assert result["stable"] is True
    assert result["spectral_abscissa"] < 0
    assert result["weak_coupling_ok"] is True
    assert result["n_full"] > 0


def test_cool_without_coupling_is_thermal(tmp_path):
    config = write_config(tmp_path, "", G_mag=0.0)
    out = tmp_path / "cool.json"
    assert dispatch(["cool", "--config", config, "--out", str(out)]) == 0
    assert json.loads(out.read_text(encoding="utf-8"))["result"]["n_st"] == pytest.approx(100.0)


def test_cool_report_round_trip(tmp_path):
    config = write_config(tmp_path, '\n[squeezing]\nmode = "analytic_optimal"\n')
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    assert dispatch(["cool", "--config", config, "--out", str(first)]) == 0
    assert dispatch(["cool", "--config", str(first), "--out", str(second)]) == 0
    a = json.loads(first.read_text(encoding="utf-8"))
    b = json.loads(second.read_text(encoding="utf-8"))
    assert a == b


def test_cool_csv_format(tmp_path):
    config = write_config(tmp_path, "")
    out = tmp_path / "cool.csv"
    assert dispatch(["cool", "--config", config, "--out", str(out)]) == 0
    (row,) = read_rows(out)
    assert float(row["n_st"]) == pytest.approx(9.53, abs=0.01)
    assert row["stable"] == "1"


def test_cool_unstable_exits_3(tmp_path):
    config = write_config(tmp_path, '\n[squeezing]\nmode = "fixed"\nzeta_abs = 8.0\nphi = 0.0\n')
    assert dispatch(["cool", "--config", config, "--out", str(tmp_path / "x.json")]) == 3
    assert not (tmp_path / "x.json").exists()


def test_spectrum_with_oracle(tmp_path):
    body = '\n[squeezing]\nmode = "analytic_optimal"\n\n[spectrum]\nomega_min = -2.0\nomega_max = 2.0\npoints = 41\n'
    config = write_config(tmp_path, body, gamma_m=0.1)
    out = tmp_path / "spectrum.csv"
    assert dispatch(["spectrum", "--config", config, "--out", str(out), "--oracle"]) == 0
    header = out.read_text(encoding="utf-8").splitlines()
    assert header[0].startswith("# code_version:")
    rows = read_rows(out)
    assert len(rows) == 41
    assert list(rows[0]) == ["omega_over_omega_b", "S", "S_oracle"]
    stokes = next(r for r in rows if float(r["omega_over_omega_b"]) == -1.0)
    assert float(stokes["S"]) < 1e-10
    for r in rows:
        assert float(r["S_oracle"]) == pytest.approx(float(r["S"]), rel=1e-8, abs=1e-12)


def test_spectrum_json(tmp_path):
    config = write_config(tmp_path, "\n[spectrum]\npoints = 5\n")
    out = tmp_path / "spectrum.json"
    assert dispatch(["spectrum", "--config", config, "--out", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))["result"]
    assert result["omega_over_omega_b"] == [-3.0, -1.5, 0.0, 1.5, 3.0]
    assert len(result["S"]) == 5


def test_missing_config_exits_2(tmp_path):
    assert dispatch(["cool", "--out", str(tmp_path / "x.json")]) == 2


def test_misspelled_key_exits_2(tmp_path):
    config = write_config(tmp_path, "\n[squeezing]\nmodee = \"none\"\n")
    assert dispatch(["cool", "--config", config]) == 2


def test_steady(tmp_path):
    config = write_config(tmp_path, "\n[drive]\ne_abs = 0.5\ng0 = 0.01\nxi = 0.01\nmode = \"self_consistent\"\n",
                          gamma_m=0.5)
    out = tmp_path / "steady.json"
    assert dispatch(["steady", "--config", config, "--out", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))["result"]
    assert len(result["m_s"]) == 2
    assert result["converged"] is True
    assert result["shift"] > 0
    assert result["zeta_abs"] == pytest.approx(2 * 0.01 * (result["m_s"][0] ** 2 + result["m_s"][1] ** 2), rel=1e-9)
    assert result["phi_relative"] == pytest.approx(-1.5707963268)


def test_steady_non_convergence_exits_4(tmp_path, monkeypatch):
    monkeypatch.setattr(SteadyStateSolver, "MAX_ITERATIONS", 1)
    config = write_config(tmp_path, "\n[drive]\ne_abs = 0.5\ng0 = 0.01\nxi = 0.01\nmode = \"self_consistent\"\n",
                          gamma_m=0.5)
    assert dispatch(["steady", "--config", config, "--out", str(tmp_path / "s.json")]) == 4


def test_cool_with_drive_squeezing(tmp_path):
    body = '\n[drive]\ne_abs = 2.0\ng0 = 0.05\nxi = 0.05\n\n[squeezing]\nmode = "drive"\n'
    config = write_config(tmp_path, body, gamma_m=1.0)
    out = tmp_path / "cool.json"
    assert dispatch(["cool", "--config", config, "--out", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))["result"]
    assert result["squeezing"]["mode"] == "drive"
    assert result["squeezing"]["phi"] == pytest.approx(-1.5707963268)
    assert len(result["squeezing"]["zeta"]) == 2


def test_sweep(tmp_path):
    body = '\n[sweep]\nvariable = "g"\nmetrics = ["n_st", "stability"]\nstart = 0.0\nstop = 1.0\npoints = 5\n' \
           '\n[squeezing]\nmode = "analytic_optimal"\n'
    config = write_config(tmp_path, body)
    out = tmp_path / "sweep.csv"
    assert dispatch(["sweep", "--config", config, "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [float(r["g"]) for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert float(rows[0]["n_st"]) == pytest.approx(0.4975, abs=1e-4)


def test_optimize(tmp_path):
    config = write_config(tmp_path, "\n[optimize]\nzeta_points = 41\nphi_points = 32\n", gamma_m=1.0)
    out = tmp_path / "opt.json"
    assert dispatch(["optimize", "--config", config, "--out", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))["result"]
    assert result["zeta_rel_difference"] < 1e-3
    assert result["phi_difference"] < 1e-3


def test_figures_bundle(tmp_path):
    assert dispatch(["figures", "fig3a", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["INDEX.md", "fig3a_gamma_m_0.1.csv", "fig3a_gamma_m_1.csv", "fig3a_gamma_m_5.csv"]
    rows = read_rows(tmp_path / "fig3a_gamma_m_1.csv")
    assert len(rows) == 41


def test_verify_perturbed_phase_fails(capsys):
    assert dispatch(["verify", "--quick", "--perturb-phase", "0.3"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] Stokes sideband suppression" in out


def test_spectrum_report_flags_unstable_squeezing(tmp_path):
    body = '\n[squeezing]\nmode = "fixed"\nzeta_abs = 1.2\nphi = 0.0\n'
    config = write_config(tmp_path, body, gamma_m=0.1, G_mag=0.0)
    out = tmp_path / "spectrum.json"
    assert dispatch(["spectrum", "--config", config, "--out", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))["result"]
    assert result["stable"] is False
    assert result["spectral_abscissa"] > 0
    assert result["weak_coupling_ok"] is True

    table = tmp_path / "spectrum.csv"
    assert dispatch(["spectrum", "--config", config, "--out", str(table)]) == 0
    header = [line for line in table.read_text(encoding="utf-8").splitlines() if line.startswith("#")]
    assert "# stable: 0" in header
    assert any(line.startswith("# spectral_abscissa: ") for line in header)


def test_spectrum_report_flags_stable_squeezing(tmp_path):
    config = write_config(tmp_path, '\n[squeezing]\nmode = "analytic_optimal"\n\n[spectrum]\npoints = 5\n')
    out = tmp_path / "spectrum.json"
    assert dispatch(["spectrum", "--config", config, "--out", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))["result"]
    assert result["stable"] is True
    assert result["spectral_abscissa"] < 0
