"""End-to-end tests of the command-line interface.

These drive ``blowlab.cli.main`` with real configuration files and check
exit codes, emitted files, and the printed reports.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from blowlab.cli import main

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
TRAJECTORY_HEADER = "t,tau,J,I,E,L,K,M,P_term,energy_residual"


def config(name: str) -> str:
    return str(CONFIG_DIR / name)


def write_ini(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


SMALL_BLOWUP = """\
[domain]
dimension = 3

[mesh]
nodes = 128

[exponent]
model = constant
value = 3.0

[modulation]
model = constant
k0 = 1.0

[initial]
family = parabolic
amplitude = 30.0

[solver]
tau0 = 1e-3
t_end = 5.0
"""


def test_validate_accepts_shipped_configs(capsys):
    rc = main(["validate", "--config", config("variable_exponent.ini")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "validation: OK" in out
    assert "log-holder-estimate:" in out
    assert "violation:" not in out


def test_validate_rejects_borderline_exponent(tmp_path, capsys):
    text = SMALL_BLOWUP.replace("value = 3.0", "value = 2.0")
    rc = main(["validate", "--config", write_ini(tmp_path, text)])
    out = capsys.readouterr().out
    assert rc == 1
    assert "validation: FAIL" in out
    assert "violation:" in out
    assert "exceed 2" in out


def test_simulate_writes_trajectory_and_summary(tmp_path, capsys):
    out_csv = str(tmp_path / "traj.csv")
    rc = main(["simulate", "--config", write_ini(tmp_path, SMALL_BLOWUP),
               "--out", out_csv])
    printed = capsys.readouterr().out
    assert rc == 0
    assert "termination: blow-up" in printed

    lines = Path(out_csv).read_text(encoding="utf-8").splitlines()
    assert lines[0] == TRAJECTORY_HEADER
    assert len(lines) > 100

    with open(tmp_path / "traj.summary.json", encoding="utf-8") as fh:
        summary = json.load(fh)
    assert summary["termination"] == "blow-up"
    assert summary["steps"] == len(lines) - 2  # header + initial row
    assert summary["backend"] in ("compiled", "python")
    lo, hi = summary["t_num_bracket"]
    assert lo <= summary["t_num"] <= hi
    assert summary["gamma_hat"] > 1.0


def test_simulate_requires_out_flag(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["simulate", "--config", write_ini(tmp_path, SMALL_BLOWUP)])
    assert excinfo.value.code == 2


def test_bounds_round_trip_matches_summary(tmp_path, capsys):
    cfg = config("negative_energy_blowup.ini")
    out_csv = str(tmp_path / "traj.csv")
    main(["simulate", "--config", cfg, "--out", out_csv])
    capsys.readouterr()

    report_path = str(tmp_path / "report.json")
    rc = main(["bounds", "--config", cfg, "--trajectory", out_csv,
               "--out", report_path])
    printed = capsys.readouterr().out
    assert rc == 0
    assert "t_upper_1: satisfied" in printed
    assert "t_lower: satisfied" in printed

    with open(tmp_path / "traj.summary.json", encoding="utf-8") as fh:
        summary = json.load(fh)
    with open(report_path, encoding="utf-8") as fh:
        report = json.load(fh)
    # the reported observed time must be bit-identical to the summary's
    assert report["t_num"] == summary["t_num"]
    assert report["t_num_bracket"] == summary["t_num_bracket"]
    assert report["t_upper_1"] == pytest.approx(70.0 / 17.0, rel=1e-3)
    assert report["t_upper_2"] is None
    statuses = {v["bound"]: v["status"] for v in report["verdicts"]}
    assert statuses == {"t_upper_1": "satisfied",
                        "t_upper_2": "not-applicable",
                        "t_lower": "satisfied"}


def test_bounds_without_trajectory_prints_json(capsys):
    rc = main(["bounds", "--config", config("negative_energy_blowup.ini")])
    out = capsys.readouterr().out
    assert rc == 0
    report = json.loads(out)
    assert report["t_num"] is None
    assert report["t_upper_1"] == pytest.approx(70.0 / 17.0, rel=1e-3)
    reasons = {}
    for verdict in report["verdicts"]:
        assert verdict["status"] == "not-applicable"
        reasons[verdict["bound"]] = verdict["reason"]
    # the computable bounds are unverifiable without an observed time; the
    # inapplicable one explains its own gate instead
    assert "no trajectory supplied" in reasons["t_upper_1"]
    assert "no trajectory supplied" in reasons["t_lower"]
    assert "negative-energy bound applies" in reasons["t_upper_2"]


def test_bounds_exit_1_when_no_theorem_applies(tmp_path, capsys):
    text = SMALL_BLOWUP.replace("amplitude = 30.0", "amplitude = 10.0")
    rc = main(["bounds", "--config", write_ini(tmp_path, text)])
    captured = capsys.readouterr()
    assert rc == 1
    assert "no upper-bound theorem applies" in captured.err
    report = json.loads(captured.out)
    assert report["t_upper_1"] is None
    assert report["t_upper_2"] is None
    assert report["t_lower"] > 0.0


def test_bounds_rejects_trajectory_without_summary(tmp_path, capsys):
    # a bare CSV without its sidecar summary cannot provide the termination
    orphan = tmp_path / "orphan.csv"
    orphan.write_text(TRAJECTORY_HEADER + "\n0.0,0.0,1,1,1,1,-1,11,0,0\n",
                      encoding="utf-8")
    rc = main(["bounds", "--config", config("negative_energy_blowup.ini"),
               "--trajectory", str(orphan)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "config error:" in err
    assert "simulate command" in err


def test_config_errors_exit_2(tmp_path, capsys):
    text = SMALL_BLOWUP + "\n[bounds]\ndictionary = bespoke\n"
    rc = main(["validate", "--config", write_ini(tmp_path, text)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "config error:" in err
    assert "unknown probe dictionary" in err


def test_sweep_writes_table(tmp_path, capsys):
    out_csv = str(tmp_path / "sweep.csv")
    rc = main(["sweep", "--config", config("sweep_amplitude.ini"),
               "--out", out_csv])
    printed = capsys.readouterr().out
    assert rc == 0
    assert "initial.amplitude=24: blow-up" in printed

    lines = Path(out_csv).read_text(encoding="utf-8").splitlines()
    assert lines[0] == "parameter,value,t_num,t_upper_1,t_upper_2,t_lower,status"
    assert len(lines) == 4
    t_nums = [float(line.split(",")[2]) for line in lines[1:]]
    assert t_nums == sorted(t_nums, reverse=True)  # larger amplitude, earlier
    assert all(line.endswith('"blow-up"') for line in lines[1:])


def test_sweep_flags_bad_rows_but_continues(tmp_path, capsys):
    text = SMALL_BLOWUP + "\n[sweep]\nparameter = mesh.nodes\nvalues = 4, 64\n"
    out_csv = str(tmp_path / "sweep.csv")
    rc = main(["sweep", "--config", write_ini(tmp_path, text),
               "--out", out_csv])
    capsys.readouterr()
    assert rc == 0  # one row still succeeded
    lines = Path(out_csv).read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    assert '"error:' in lines[1]
    assert lines[2].endswith('"blow-up"')


def test_sweep_exit_1_when_all_rows_fail(tmp_path, capsys):
    text = SMALL_BLOWUP + "\n[sweep]\nparameter = mesh.nodes\nvalues = 4, 6\n"
    rc = main(["sweep", "--config", write_ini(tmp_path, text),
               "--out", str(tmp_path / "sweep.csv")])
    capsys.readouterr()
    assert rc == 1


def test_sweep_requires_sweep_section(tmp_path, capsys):
    rc = main(["sweep", "--config", write_ini(tmp_path, SMALL_BLOWUP),
               "--out", str(tmp_path / "sweep.csv")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "nothing to sweep" in err


def test_verify_passes_on_shipped_config(tmp_path, capsys):
    out_json = str(tmp_path / "verify.json")
    rc = main(["verify", "--config", config("verify.ini"), "--out", out_json])
    printed = capsys.readouterr().out
    assert rc == 0
    assert "verify: OK" in printed
    assert "FAIL" not in printed

    with open(out_json, encoding="utf-8") as fh:
        payload = json.load(fh)
    assert payload["passed"] is True
    names = {c["name"] for c in payload["criteria"]}
    for prefix in ("hardy-ratio", "k-monotonicity", "energy-identity",
                   "growth-derivative"):
        assert any(name.startswith(prefix) for name in names)


def test_verify_detects_dropped_drift_term(capsys):
    rc = main(["verify", "--config", config("verify_variable.ini"),
               "--disable-p-term"])
    printed = capsys.readouterr().out
    assert rc == 1
    assert "verify: FAIL" in printed
    assert "FAIL energy-identity" in printed


def test_constants_json_and_seed_override(capsys):
    rc = main(["constants", "--config", config("negative_energy_blowup.ini")])
    out = capsys.readouterr().out
    assert rc == 0
    payload = json.loads(out)
    assert payload["constants"]["h_n"] == pytest.approx(4.0)
    assert payload["constants"]["c1"] == pytest.approx(12.0)
    assert payload["constants"]["c_star"] > 0.0
    assert payload["seed"] == 0

    rc = main(["constants", "--config", config("negative_energy_blowup.ini"),
               "--seed", "5"])
    payload5 = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert payload5["seed"] == 5


def test_repeated_runs_are_byte_identical(tmp_path, capsys):
    cfg = write_ini(tmp_path, SMALL_BLOWUP)
    out_a, out_b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    main(["simulate", "--config", cfg, "--out", out_a])
    main(["simulate", "--config", cfg, "--out", out_b])
    capsys.readouterr()
    assert Path(out_a).read_bytes() == Path(out_b).read_bytes()
    assert (tmp_path / "a.summary.json").read_bytes() == \
        (tmp_path / "b.summary.json").read_bytes()


def test_verbose_flag_accepted(capsys):
    rc = main(["--verbose", "validate", "--config", config("dissipative.ini")])
    assert rc == 0
    assert "validation: OK" in capsys.readouterr().out
