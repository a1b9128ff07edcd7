from __future__ import annotations

import csv
import io
import json
import math

import pytest

from rydcavity.cli import main
from rydcavity.io import csv_text, format_number, json_text, write_text

SMALL = {
    "name": "small",
    "coefficients": {"C0": "1 rad/us", "C3": "2.5 rad/us*um3", "C6": "10 rad/us*um6"},
    "ramsey": {"p_d": 0.05, "N": 60, "density": "0.35 um^-3", "realizations": 3, "seed": 7,
               "tau": {"start": "0 us", "stop": "6.283185307179586 us", "num": 5}},
    "outputs": [{"kind": "ramsey", "path": "mc.csv", "analytic": ["all_to_all"]},
                {"kind": "coeffs", "path": "c.csv"},
                {"kind": "potential", "path": "u.json", "format": "json", "num": 10}],
}


@pytest.fixture
def scenario(tmp_path):
    p = tmp_path / "small.json"
    p.write_text(json.dumps(SMALL))
    return p


def read_csv(path):
    rows = list(csv.reader(io.StringIO(path.read_text())))
    return rows[0], rows[1:]


def test_missing_unit_tag_exits_2(tmp_path, capsys):
    bad = json.loads(json.dumps(SMALL))
    bad["coefficients"]["C0"] = 1.0
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    assert main(["coeffs", "-c", str(p)]) == 2
    assert "coefficients.C0" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path):
    assert main(["coeffs", "-c", str(tmp_path / "nope.json")]) == 1


def test_numerical_failure_exits_3(tmp_path, capsys):
    pos = tmp_path / "pos.csv"
    pos.write_text("x[um],y[um],z[um]\n0,0,0\n0,0,0\n")
    p = tmp_path / "s.json"
    p.write_text(json.dumps(SMALL))
    assert main(["ramsey-exact", "-c", str(p), "--positions", str(pos), "-o", str(tmp_path / "o.csv")]) == 3
    assert "rydcavity.ramsey.ensemble" in capsys.readouterr().err


def test_ramsey_mc_is_byte_identical(scenario, tmp_path):
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(["ramsey-mc", "-c", str(scenario), "-o", str(a)]) == 0
    assert main(["ramsey-mc", "-c", str(scenario), "-o", str(b)]) == 0
    assert main(["ramsey-mc", "-c", str(scenario), "-o", str(c), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    head, rows = read_csv(a)
    assert head[:3] == ["tau[us]", "contrast[1]", "contrast_stderr[1]"]
    assert float(rows[0][1]) == 1.0 and len(rows) == 5


def test_seed_override_changes_output(scenario, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["ramsey-mc", "-c", str(scenario), "-o", str(a)])
    main(["ramsey-mc", "-c", str(scenario), "-o", str(b), "--seed", "8"])
    assert a.read_bytes() != b.read_bytes()


def test_run_writes_outputs_and_manifest(scenario, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(scenario), "--output-dir", str(out)]) == 0
    man = json.loads((out / "small_manifest.json").read_text())
    assert set(man["outputs"]) == {"mc.csv", "c.csv", "u.json"}
    assert man["seed"] == 7 and man["scenario"] == "small"
    assert {"python", "numpy", "scipy", "rydcavity"} <= set(man["versions"])
    head, rows = read_csv(out / "mc.csv")
    assert head[-1] == "all_to_all_contrast[1]"
    assert float(rows[-1][-1]) == pytest.approx(1.0, abs=1e-12)
    pot = json.loads((out / "u.json").read_text())
    assert len(pot["r"]) == 10
    # re-running reproduces the manifest exactly
    first = (out / "small_manifest.json").read_bytes()
    main(["run", str(scenario), "--output-dir", str(out)])
    assert (out / "small_manifest.json").read_bytes() == first


def test_output_dir_from_environment(scenario, tmp_path, monkeypatch):
    monkeypatch.setenv("RYDCAVITY_OUTPUT_DIR", str(tmp_path / "env"))
    (tmp_path / "env").mkdir()
    assert main(["coeffs", "-c", str(scenario)]) == 0
    assert (tmp_path / "env" / "small_coeffs.csv").exists()


def test_presets_and_subcommands(tmp_path, capsys):
    assert main(["coeffs", "--preset", "35D", "-o", "-"]) == 0
    out = capsys.readouterr().out
    head = out.splitlines()[0].split(",")
    assert "C6[rad/us*um^6]" in head or any(h.startswith("C6[") for h in head)
    assert main(["potential", "--preset", "35D", "--num", "5", "-o", "-"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert main(["ham-spectrum", "--preset", "12D", "--r", "5 um", "-o", "-", "--format", "json"]) == 0
    spec = json.loads(capsys.readouterr().out)
    assert spec["r"] == 5.0 and len(spec["eigenvalues"]) == 6
    assert main(["table1-check", "-o", "-"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert [r["label"] for r in rep["rows"]] == ["5D5/2", "12D5/2", "35D5/2"]


def test_ramsey_analytic_models(scenario, capsys):
    for model in ("asymptotic", "free_space", "all_to_all", "continuum"):
        assert main(["ramsey-analytic", "-c", str(scenario), "--model", model, "-o", "-"]) == 0
        head, *rows = capsys.readouterr().out.splitlines()
        assert len(rows) == 5
        assert float(rows[0].split(",")[1]) == 1.0


def test_bundled_scenario_by_name(tmp_path):
    out = tmp_path / "t1.json"
    assert main(["table1-check", "-c", "table1_check.json", "-o", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert len(rep["rows"]) == 3


def test_number_formatting_round_trips():
    for x in (0.1, 1 / 3, -2.5e-300, 6.02e23):
        assert float(format_number(x)) == x
    assert format_number(math.nan) == "nan" and format_number(True) == "1"
    text = csv_text([("a", "um"), ("b", "1")], {"a": [1.0, 2.0], "b": [3.0, 4.0]})
    assert text.splitlines()[0] == "a[um],b[1]"
    assert json.loads(json_text({"b": math.inf, "a": 1})) == {"a": 1, "b": None}
    assert len(write_text("-", "")) == 64


def test_revival_mask():
    from rydcavity.cli import revival_mask

    tau = [0.0, math.pi, 2 * math.pi, 3 * math.pi, 4 * math.pi * (1 + 1e-13)]
    assert list(revival_mask(tau, -1.0)) == [0, 0, 1, 0, 1]
    assert list(revival_mask(tau, 0.0)) == [0] * 5
