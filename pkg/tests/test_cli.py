"""CLI: config handling, subcommands, exit codes, output formats."""

import csv
import json
import math

import pytest
import yaml

from wellblock.cli import RunConfig, main
from wellblock.errors import ConfigError


def write_config(tmp_path, data, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return str(path)


def base_config(**overrides):
    data = {
        "regime": "ss",
        "geometry": {"kind": "slab", "r_e": 10.0},
        "grid": {"delta": 1.0, "n": 10, "tau": 1e-6},
    }
    data.update(overrides)
    return data


# ---------------------------------------------------------------------------
# config object
# ---------------------------------------------------------------------------

def test_config_roundtrip():
    data = base_config(params={"conductivity": 2.0}, rate=1.5)
    cfg = RunConfig.from_dict(data)
    restored = RunConfig.from_dict(cfg.to_dict())
    assert restored == cfg
    assert restored.to_dict()["params"]["conductivity"] == 2.0


def test_config_rejects_unknown_root_key():
    with pytest.raises(ConfigError) as exc:
        RunConfig.from_dict(base_config(wells=3))
    assert "wells" in str(exc.value)


def test_config_rejects_unknown_nested_key():
    data = base_config()
    data["grid"]["spacing"] = 0.1
    with pytest.raises(ConfigError) as exc:
        RunConfig.from_dict(data)
    assert "spacing" in str(exc.value)


def test_config_rejects_bad_regime():
    with pytest.raises(ConfigError):
        RunConfig.from_dict(base_config(regime="transient"))


# ---------------------------------------------------------------------------
# radius
# ---------------------------------------------------------------------------

def test_radius_ss(tmp_path, capsys):
    path = write_config(tmp_path, base_config())
    assert main(["radius", "--config", path]) == 0
    rec = json.loads(capsys.readouterr().out)["records"][0]
    assert rec["r0"] == 0.5
    assert rec["method"] == "closed-form"


def test_radius_pss_radial(tmp_path, capsys):
    data = base_config(regime="pss",
                       geometry={"kind": "radial", "r_w": 0.1, "r_e": 100.0},
                       grid={"delta": 1.0, "n": 100, "tau": 1e-6})
    path = write_config(tmp_path, data)
    assert main(["radius", "--config", path]) == 0
    rec = json.loads(capsys.readouterr().out)["records"][0]
    assert rec["r0"] == pytest.approx(0.207880, abs=1e-5)


def test_radius_bd_slab_reports_approx(tmp_path, capsys):
    path = write_config(tmp_path, base_config(regime="bd"))
    assert main(["radius", "--config", path]) == 0
    rec = json.loads(capsys.readouterr().out)["records"][0]
    assert rec["approx"] == pytest.approx(0.5 / (1 + math.pi**2 / 800), rel=1e-12)
    assert abs(rec["r0"] - rec["approx"]) < 4e-3


def test_malformed_config_exit_2(tmp_path, capsys):
    path = write_config(tmp_path, base_config(frobnicate=1))
    assert main(["radius", "--config", path]) == 2
    rec = json.loads(capsys.readouterr().out)["records"][0]
    assert rec["error"] == "ConfigError"
    assert "frobnicate" in rec["message"]


def test_bd_radial_no_root_exit_3_with_scan(tmp_path, capsys):
    data = base_config(regime="bd",
                       geometry={"kind": "radial", "r_w": 0.5, "r_e": 5.0},
                       grid={"delta": 1.0, "n": 5, "tau": 1e-6})
    path = write_config(tmp_path, data)
    assert main(["radius", "--config", path]) == 3
    rec = json.loads(capsys.readouterr().out)["records"][0]
    assert rec["error"] == "NoSignChange"
    assert len(rec["scan"]) > 100


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def sweep_config():
    return base_config(regime="pss",
                       geometry={"kind": "radial", "r_w": 0.1, "r_e": 10.0},
                       sweep={"parameter": "r_e",
                              "values": [5.0, 10.0, 50.0, 100.0, 500.0]})


def test_sweep_csv_decreasing(tmp_path):
    out = tmp_path / "table.csv"
    path = write_config(tmp_path, sweep_config())
    assert main(["sweep", "--config", path, "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    r0s = [float(r["r0"]) for r in rows]
    assert all(a > b for a, b in zip(r0s, r0s[1:]))


def test_sweep_json_matches_csv(tmp_path):
    path = write_config(tmp_path, sweep_config())
    out_csv = tmp_path / "t.csv"
    out_json = tmp_path / "t.json"
    assert main(["sweep", "--config", path, "--format", "csv",
                 "--out", str(out_csv)]) == 0
    assert main(["sweep", "--config", path, "--format", "json",
                 "--out", str(out_json)]) == 0
    with open(out_csv, newline="") as fh:
        csv_rows = list(csv.DictReader(fh))
    json_rows = json.loads(out_json.read_text())["records"]
    for a, b in zip(csv_rows, json_rows):
        # 17 significant digits round-trip exactly
        assert float(a["r0"]) == b["r0"]
        assert float(a["residual"]) == b["residual"]


def test_sweep_empty_values_is_config_error(tmp_path, capsys):
    data = sweep_config()
    data["sweep"]["values"] = []
    path = write_config(tmp_path, data)
    assert main(["sweep", "--config", path]) == 2


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_ss_ladder(tmp_path, capsys):
    data = base_config(verify={"deltas": [0.2, 0.1, 0.05]})
    path = write_config(tmp_path, data)
    assert main(["verify", "--config", path]) == 0
    recs = json.loads(capsys.readouterr().out)["records"]
    assert len(recs) == 3
    assert all(r["discrepancy"] <= 1e-10 for r in recs)


def test_verify_with_bad_override_fails(tmp_path, capsys):
    data = base_config(verify={"deltas": [0.2, 0.1], "r0_override": 1.0})
    path = write_config(tmp_path, data)
    assert main(["verify", "--config", path]) == 3
    recs = json.loads(capsys.readouterr().out)["records"]
    assert all(r["mb_analytic"] > 0.1 for r in recs)  # residual column large
    assert all(r["discrepancy"] > 1e-3 for r in recs)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_dumps_csv(tmp_path):
    data = base_config(regime="pss",
                       grid={"delta": 0.5, "n": 20, "tau": 0.05},
                       simulate={"t_end": 5.0, "sample_interval": 1.0})
    path = write_config(tmp_path, data)
    out = tmp_path / "fields.csv"
    assert main(["simulate", "--config", path, "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0].keys()) == {"t", "i", "x", "pressure"}
    assert len(rows) == 6 * 21  # initial + 5 samples, 21 nodes


def test_simulate_json_summary(tmp_path, capsys):
    data = base_config(regime="pss",
                       grid={"delta": 0.5, "n": 20, "tau": 0.05},
                       simulate={"t_end": 2.0, "sample_interval": 1.0})
    path = write_config(tmp_path, data)
    assert main(["simulate", "--config", path, "--format", "json"]) == 0
    recs = json.loads(capsys.readouterr().out)["records"]
    assert recs[0]["t"] == 0.0
    assert recs[-1]["well_value"] > 0.0


def test_quiet_suppresses_stdout(tmp_path, capsys):
    path = write_config(tmp_path, base_config())
    assert main(["radius", "--config", path, "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_shipped_config_examples_load_and_run(capsys):
    import glob
    import os
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    examples = sorted(glob.glob(os.path.join(here, "docs", "configs", "*.yaml")))
    assert len(examples) >= 6
    for path in examples:
        cfg = RunConfig.load(path)  # schema-valid
        name = os.path.basename(path)
        if name.startswith("radius_"):
            assert main(["radius", "--config", path, "--quiet"]) == 0
        elif name.startswith("sweep_"):
            assert main(["sweep", "--config", path, "--quiet"]) == 0
    capsys.readouterr()


def test_verify_pss_ladder(tmp_path, capsys):
    data = base_config(regime="pss", verify={"deltas": [0.2, 0.1]})
    path = write_config(tmp_path, data)
    assert main(["verify", "--config", path]) == 0
    recs = json.loads(capsys.readouterr().out)["records"]
    assert len(recs) == 2
    assert recs[0]["discrepancy"] > recs[1]["discrepancy"]
    assert all(r["drift"] == pytest.approx(0.1, rel=1e-3) for r in recs)


def test_verify_override_rejected_for_transient(tmp_path, capsys):
    data = base_config(regime="pss", verify={"deltas": [0.2, 0.1],
                                             "r0_override": 1.0})
    path = write_config(tmp_path, data)
    assert main(["verify", "--config", path]) == 2
