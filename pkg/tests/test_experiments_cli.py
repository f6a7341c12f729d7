import json
import subprocess
import sys

import numpy as np
import pytest

from biriesz.cli import main
from biriesz.experiments import (
    REGISTRY,
    SCHEMA_VERSION,
    ConfigError,
    child_seed,
    load_config_file,
    make_config,
    parse_override,
    run,
    run_named,
)
from biriesz.errors import ResourceCapError
from biriesz.fieldgrid import GridSpec
from biriesz.symbols import br_profile, lift_biradial

FAST = ["kernel-decay", "band-limit", "engine-oracle", "sobolev-threshold", "restriction-scaling",
        "annulus-average", "torus-demo", "net-packing"]


def test_registry_names():
    assert set(REGISTRY) == {
        "kernel-decay", "band-limit", "engine-oracle", "sobolev-threshold", "l2l2l1-uniformity",
        "delta-zero-blowup", "dyadic-rate", "tensorization", "restriction-scaling", "annulus-average",
        "net-packing", "torus-demo", "threshold-table",
    }


def test_override_parsing():
    assert parse_override("delta=0.5") == ("delta", "0.5")
    assert parse_override(" grid.N = 64 ") == ("grid.N", "64")
    with pytest.raises(ConfigError):
        parse_override("delta")


def test_make_config_merges_layers():
    cfg = make_config("dyadic-rate", {"params": {"delta": 0.5}, "seed": "0x10"}, ["n=2", "params.j=1..3", "grid.N=32"])
    assert cfg.grid["n"] == "2" and cfg.grid["N"] == "32"
    assert cfg.params["delta"] == 0.5 and cfg.params["j"] == "1..3"
    assert cfg.seed == 16
    assert cfg.params["budget"] == REGISTRY["dyadic-rate"].param_defaults["budget"]
    blob = json.dumps(cfg.to_json())
    assert "dyadic-rate" in blob


@pytest.mark.parametrize(
    "data,overrides",
    [
        ({"bogus": 1}, ()),
        ({}, ["params.nope=1"]),
        ({}, ["other.delta=1"]),
        ({"name": "kernel-decay"}, ()),
        ({"grid": [1, 2]}, ()),
    ],
)
def test_make_config_rejects(data, overrides):
    with pytest.raises(ConfigError):
        make_config("torus-demo", data, overrides)


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        make_config("no-such-thing")


def test_config_files(tmp_path):
    toml = tmp_path / "c.toml"
    toml.write_text('seed = 7\n[params]\ndelta = "1/2"\nNs = [64, 128]\n')
    data = load_config_file(toml)
    assert data["params"]["Ns"] == [64, 128]
    js = tmp_path / "c.json"
    js.write_text(json.dumps({"params": {"delta": 2}}))
    assert load_config_file(js)["params"]["delta"] == 2
    broken = tmp_path / "bad.toml"
    broken.write_text("[params\n")
    with pytest.raises(ConfigError):
        load_config_file(broken)
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "missing.json")


def test_bad_values_raise_config_error():
    with pytest.raises(ConfigError):
        run(make_config("kernel-decay", overrides=["delta=abc"]))
    with pytest.raises(ConfigError):
        run(make_config("net-packing", overrides=["trials=many"]))


def test_child_seed_is_deterministic():
    assert child_seed(1, 2, 3) == child_seed(1, 2, 3)
    assert child_seed(1, 2, 3) != child_seed(1, 2, 4)


@pytest.mark.parametrize("name", FAST)
def test_fast_experiments_pass(name):
    report = run_named(name)
    assert report.checks and report.passed


def test_report_files(tmp_path):
    report = run_named("kernel-decay", out_dir=tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["schema"] == SCHEMA_VERSION
    assert manifest["experiment"] == "kernel-decay"
    assert manifest["passed"] is report.passed
    for name in manifest["tables"] + manifest["figures"]:
        assert (tmp_path / name).exists()
    for name in manifest["figures"]:
        assert (tmp_path / name.replace(".dat", ".gp")).exists()
    verdict = (tmp_path / "verdict.csv").read_bytes()
    assert verdict.startswith(b"check,measured,criterion,passed\r\n")


def test_engine_oracle_bytes_repeat(tmp_path):
    run_named("engine-oracle", out_dir=tmp_path / "a")
    run_named("engine-oracle", out_dir=tmp_path / "b")
    for path in sorted((tmp_path / "a").glob("*.csv")):
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()


def test_resource_cap():
    with pytest.raises(ResourceCapError):
        run_named("band-limit", overrides=["N=128", "ns=2"])


def test_cli_list(capsys):
    assert main(["--list"]) == 0
    out = capsys.readouterr().out
    assert "torus-demo" in out and "threshold-table" in out
    assert main(["experiment", "--list"]) == 0


def test_cli_indices(capsys):
    assert main(["indices", "--n", "2", "--lattice", "1/4"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("n,p1,p2,p,region,bounded_if,unbounded_if,source\r\n")


def test_cli_kernel(capsys):
    assert main(["kernel", "--delta", "1", "--rmax", "4", "--points", "5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "r,kernel" and len(lines) == 6
    assert float(lines[1].split(",")[1]) == pytest.approx(np.pi / 2, rel=1e-12)


def test_cli_experiment(tmp_path, capsys):
    assert main(["experiment", "torus-demo", "--out", str(tmp_path / "t")]) == 0
    assert (tmp_path / "t" / "manifest.json").exists()
    assert "PASS" in capsys.readouterr().out
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"params": {"ratio_lo": 100}}))
    assert main(["experiment", "torus-demo", "--config", str(cfg), "--out", str(tmp_path / "u")]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["experiment", "nope"],
        ["experiment", "kernel-decay", "--set", "delta"],
        ["experiment", "kernel-decay", "--set", "zzz=1"],
        ["opnorm", "--symbol", "/nonexistent.brgrid", "--triple", "2,2,1"],
    ],
)
def test_cli_errors(argv, tmp_path, capsys):
    assert main(argv + (["--out", str(tmp_path)] if argv[0] == "experiment" else [])) == 2
    assert "biriesz: error:" in capsys.readouterr().err


def test_cli_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("delta = = 1\n")
    assert main(["experiment", "kernel-decay", "--config", str(bad)]) == 2


def test_cli_opnorm(tmp_path, capsys):
    spec = GridSpec(1, 32, 8.0)
    lift_biradial(br_profile(1, 1), spec).save(tmp_path / "br.brgrid")
    argv = ["opnorm", "--symbol", str(tmp_path / "br.brgrid"), "--triple", "2,2,1", "--seeds", "1", "--budget", "4"]
    assert main(argv + ["--out", str(tmp_path / "w")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] > 0 and len(payload["witness_files"]) == 2
    assert (tmp_path / "w" / "br.json").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "biriesz", "--list"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "kernel-decay" in proc.stdout


def test_restriction_endpoint_is_reported():
    report = run_named("restriction-scaling")
    header, rows = report.tables["endpoint_fit"]
    assert header[:2] == ("swept", "fitted_exponent")
    assert {r[0] for r in rows} == {"lambda1", "lambda2"}
    assert all(np.isfinite(r[1]) for r in rows)
