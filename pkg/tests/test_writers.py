import json
from dataclasses import dataclass

import numpy as np
import pytest

from src.core.params import SystemParams
from src.core.sweep import figure_dataset
from src.settings import CODE_VERSION
from src.writers.dataset_writer import DatasetWriter, format_number, round_for_json
from src.writers.report_writer import ReportWriter


@pytest.mark.parametrize("value, expected", [
    (None, ""),
    (True, "1"),
    (np.bool_(False), "0"),
    (7, "7"),
    (0.1, "0.1"),
    (1.0 / 3.0, "0.333333333333"),
    (np.float64(2.5e-7), "2.5e-07"),
    (float("nan"), ""),
    (float("inf"), ""),
    ("unstable", "unstable"),
])
def test_format_number(value, expected):
    assert format_number(value, 12) == expected


def test_round_for_json():
    rounded = round_for_json({"a": 1.0 / 3.0, "z": 1 + 2j, "bad": float("nan"), "rows": [np.float64(0.125), 3]}, 4)
    assert rounded == {"a": 0.3333, "z": [1.0, 2.0], "bad": None, "rows": [0.125, 3]}


def test_write_csv_provenance_then_table(tmp_path):
    writer = DatasetWriter(precision=6)
    path = writer.write_csv(tmp_path / "out" / "demo.csv", "sweep", {"gamma_m": 0.1, "note": "x"},
                            ["delta_m", "n_st"], [[0.5, 1.0 / 3.0], [1.0, None]])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# code_version: {CODE_VERSION}"
    assert lines[1] == "# command: sweep"
    assert lines[2] == "# gamma_m: 0.1"
    assert lines[3] == "# note: x"
    assert lines[4] == "delta_m,n_st"
    assert lines[5] == "0.5,0.333333"
    assert lines[6] == "1,"


def test_write_json_payload(tmp_path):
    path = DatasetWriter(precision=3).write_json(tmp_path / "cool.json", "cool", {"command": "cool"},
                                                 {"n_st": 0.49751, "m_s": 0.5 - 0.25j})
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload == {
        "version": CODE_VERSION,
        "command": "cool",
        "config": {"command": "cool"},
        "result": {"n_st": 0.498, "m_s": [0.5, -0.25]},
    }


@dataclass
class FakeCheck:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0


def test_verify_summary():
    text = ReportWriter().verify_summary(
        [FakeCheck("Stokes sideband suppression", True, "ratio 1e-30", 0.01),
         FakeCheck("Stability guard", False, "boundary off", 0.2)],
        quick=True,
    )
    assert "(quick)" in text
    assert "[PASS] Stokes sideband suppression (0.01 s)" in text
    assert "[FAIL] Stability guard (0.20 s)" in text
    assert "boundary off" in text
    assert text.rstrip().endswith("1/2 criteria passed")


def test_bundle_index(tmp_path):
    bundle = figure_dataset("fig3b")
    files = {label: f"{label}.csv" for label in bundle}
    path = ReportWriter().write_bundle_index(tmp_path, {"fig3b": bundle}, files)
    text = path.read_text(encoding="utf-8")
    assert path.name == "INDEX.md"
    assert "## fig3b" in text
    assert "[fig3b_g_0.5](fig3b_g_0.5.csv)" in text
    assert "| gamma_a | 41 | analytic_optimal |" in text


def test_parameters_survive_provenance_formatting():
    p = SystemParams.red_sideband(gamma_m=0.1)
    lines = DatasetWriter().provenance_lines("cool", p.as_dict())
    assert "# gamma_b: 1e-05" in lines
    assert "# n_b: 100" in lines
