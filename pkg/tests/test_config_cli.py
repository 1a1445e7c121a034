import json
import math

import pytest

from swarm_isac.cli import main
from swarm_isac.config import (DEFAULT_SEED, alpha_max_from_db, baseline_scenario, dbm_to_watts,
                               parse_config)
from swarm_isac.errors import ConfigError


def test_unit_conversions():
    assert dbm_to_watts(30.0) == 1.0
    assert dbm_to_watts(33.0) == pytest.approx(1.9952623149688795, rel=1e-15)
    assert alpha_max_from_db(60.0, "amplitude") == pytest.approx(1e6)
    assert alpha_max_from_db(60.0, "power") == pytest.approx(1e3)


def test_baseline_linear_values():
    s = baseline_scenario()
    assert s.sigma_rcs_mean == pytest.approx(0.1)
    assert s.sigma_r2 == pytest.approx(10 ** -15.4)
    assert s.sigma_ap2 == pytest.approx(1e-14)
    assert s.gamma_ue_req == pytest.approx(10**1.5)
    assert s.theta == pytest.approx(math.pi / 6)
    assert s.wavelength == pytest.approx(0.019986163866666667, rel=1e-15)


def test_parse_config_defaults():
    cfg = parse_config(experiment="optimize-once")
    assert cfg.seed == DEFAULT_SEED and cfg.workers >= 1 and cfg.include_rr is False


@pytest.mark.parametrize("bad", [["nope=1"], ["M=0"], ["theta_rad=4"], ["l_AD_m=-1"],
                                 ["alpha_db_convention=\"dB\""], ["N=1.5"]])
def test_parse_config_rejects(bad):
    with pytest.raises(ConfigError):
        parse_config(experiment="optimize-once", overrides=bad)


def test_parse_config_file_and_flag_precedence(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment": "roc", "seed": 5, "scenario": {"N": 7},
                             "options": {"configs": []}}))
    cfg = parse_config(p, seed=9, overrides=["N=8"])
    assert cfg.experiment == "roc" and cfg.seed == 9 and cfg.scenario.N == 8
    p.write_text(json.dumps({"experiment": "roc", "colour": 1}))
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(p)
    with pytest.raises(ConfigError, match="missing required field"):
        parse_config(tmp_path / "absent.json")
    with pytest.raises(ConfigError, match="missing required field"):
        parse_config()


def _run(tmp_path, *args):
    return main(["--out", str(tmp_path), "--workers", "1", *args])


def test_cli_optimize_once(tmp_path, capsys):
    assert _run(tmp_path, "--experiment", "optimize-once", "--set", "N=5") == 0
    out = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert out["converged"] is True
    names = sorted(f.name for f in tmp_path.iterdir())
    assert len(names) == 2 and names[0].startswith("optimize-once_") and names[1].endswith(".manifest.json")


def test_cli_error_exit(tmp_path, capsys):
    assert _run(tmp_path, "--experiment", "bogus") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError" and "unknown experiment" in err["message"]
    assert _run(tmp_path, "--experiment", "roc", "--set", "flux=2") == 2
    assert "unknown key" in json.loads(capsys.readouterr().err)["message"]


def _csv_bytes(d):
    return [f.read_bytes() for f in sorted(d.glob("*.csv"))]


@pytest.mark.parametrize("args", [
    ["--experiment", "roc", "--trials", "600", "--set", "N=6", "--set", "M=8"],
    ["--experiment", "sinr-sweep", "--trials", "200", "--set", "N=5"],
    ["--experiment", "validate-sinr", "--trials", "500", "--set", "N=5"],
    ["--experiment", "activation", "--set", "N=5"],
])
def test_cli_bitwise_deterministic(tmp_path, args):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--out", str(a), "--workers", "1", "--seed", "4", *args]) == 0
    assert main(["--out", str(b), "--workers", "3", "--seed", "4", *args]) == 0
    assert _csv_bytes(a) == _csv_bytes(b) and _csv_bytes(a)


def test_cli_never_overwrites(tmp_path):
    for _ in range(3):
        assert _run(tmp_path, "--experiment", "optimize-once", "--set", "N=3") == 0
    assert len(list(tmp_path.iterdir())) == 6


def test_cli_sweep_options_from_config(tmp_path, capsys):
    p = tmp_path / "sweep.json"
    p.write_text(json.dumps({"experiment": "sinr-sweep", "scenario": {"N": 4},
                             "options": {"variable": "alpha_max_db", "values": [0, 40],
                                         "N_values": [4, 8]}}))
    assert main(["--config", str(p), "--out", str(tmp_path / "o")]) == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert [(r["N"], r["value"]) for r in rows] == [(4, 0.0), (4, 40.0), (8, 0.0), (8, 40.0)]
    assert len(list((tmp_path / "o").glob("*.timing.json"))) == 1


def test_cli_sweep_default_repeater_counts(tmp_path, capsys):
    p = tmp_path / "sweep.json"
    p.write_text(json.dumps({"experiment": "sinr-sweep", "options": {"values": [50]}}))
    assert main(["--config", str(p), "--out", str(tmp_path / "o")]) == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert [r["N"] for r in rows] == [10, 25, 50, 100]
