from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from geofun.cli import build_parser, main, read_config_file, resolve_config


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def load(path):
    return json.loads(path.read_text())


def test_check_linear(tmp_path):
    assert run(tmp_path, "check", "--solution", "linear", "--dim", "2", "--samples", "10000", "--seed", "42") == 0
    doc = load(tmp_path / "axioms_linear.json")
    assert set(doc) == {"schema_version", "config", "results", "witnesses"}
    assert doc["config"]["seed"] == 42 and doc["results"]["passed"]
    names = {r["name"] for r in doc["results"]["results"]}
    assert {"boundary", "composition", "diagonal", "symmetry", "segment", "jensen_midpoint"} <= names


def test_check_weierstrass_1d(tmp_path):
    assert run(tmp_path, "check", "--solution", "reparam:weierstrass", "--dim", "1") == 0
    doc = load(tmp_path / "axioms_reparam-weierstrass.json")
    assert max(r["max_residual"] for r in doc["results"]["results"]) <= 1e-8


def test_check_broken_fixture(tmp_path):
    assert run(tmp_path, "check", "--solution", "broken-fixture", "--samples", "200") == 1
    doc = load(tmp_path / "axioms_broken-fixture.json")
    assert doc["witnesses"]["boundary"]["residual"] > 0


@pytest.mark.parametrize("args", [
    ["check", "--solution", "reparam:nope"],
    ["check", "--tolerance", "bogus=1"],
    ["check", "--tolerance", "boundary"],
    ["check", "--samples", "0"],
    ["compare", "--solution", "reparam:weierstrass"],
    ["spray", "--solution", "broken-fixture"],
    ["extract", "--dim", "2", "--point", "1,2,3"],
])
def test_usage_errors_exit_2(tmp_path, args, capsys):
    assert run(tmp_path, *args) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        run(tmp_path, "check", "--dim", "two")
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run(tmp_path, "extract", "--point", "1,x")
    assert info.value.code == 2


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# settings\nseed = 5\nsamples = 100\nfd-step = 0.002\ntolerance.boundary = 1e-7\n")
    args = build_parser().parse_args(["check", "--config", str(cfg_file), "--seed", "7",
                                      "--tolerance", "composition=1e-6"])
    cfg = resolve_config(args, environ={})
    assert (cfg.seed, cfg.samples, cfg.fd_step, cfg.dim) == (7, 100, 0.002, 2)
    assert cfg.tolerances == {"boundary": 1e-7, "composition": 1e-6}
    assert cfg.out == "geofun-out"


def test_config_file_errors(tmp_path):
    from geofun.cli import ConfigError

    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)
    assert run(tmp_path, "check", "--config", str(tmp_path / "missing.cfg")) == 2


def test_env_output_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("GEOFUN_OUT", str(tmp_path / "env-out"))
    assert main(["check", "--samples", "50"]) == 0
    assert (tmp_path / "env-out" / "axioms_linear.json").exists()


def test_extract_commands(tmp_path):
    assert run(tmp_path, "extract", "--solution", "linear", "--probes", "5") == 0
    rows = load(tmp_path / "gamma_linear.json")["results"]["points"]
    assert len(rows) == 5 and all(not np.any(r["gamma"]) for r in rows)

    assert run(tmp_path, "extract", "--solution", "reparam:gaussian", "--point", "0.3,-0.7") == 0
    row = load(tmp_path / "gamma_reparam-gaussian.json")["results"]["points"][0]
    a = np.array([0.3, -0.7])
    oracle = np.array([[[0.5 * (a[j] * (i == k) + a[k] * (i == j)) for k in range(2)] for j in range(2)]
                       for i in range(2)])
    assert np.max(np.abs(np.array(row["gamma"]) - oracle)) <= 1e-4 and row["reliable"]

    assert run(tmp_path, "extract", "--solution", "reparam:weierstrass", "--probes", "2") == 0
    assert not load(tmp_path / "gamma_reparam-weierstrass.json")["results"]["all_reliable"]


def test_extract_with_chart(tmp_path):
    assert run(tmp_path, "extract", "--solution", "linear", "--chart", "quadratic", "--probes", "3") == 0
    for row in load(tmp_path / "gamma_linear.json")["results"]["points"]:
        assert row["transformation_residual"] <= 1e-3 and row["gamma_bar_oracle_error"] <= 1e-3


def test_numeric_failure_writes_diagnostic(tmp_path):
    assert run(tmp_path, "extract", "--solution", "reparam:gaussian", "--dim", "1", "--point", "8.5") == 1
    res = load(tmp_path / "gamma_reparam-gaussian.json")["results"]
    assert not res["passed"] and "DomainError" in res["error"]


def test_spray_command(tmp_path):
    assert run(tmp_path, "spray", "--solution", "reparam:gaussian", "--samples", "300", "--format", "csv") == 0
    res = load(tmp_path / "spray_reparam-gaussian.json")["results"]
    assert res["homogeneity_residual"] <= 1e-12 and res["r_source"] == "analytic"
    lines = (tmp_path / "spray_reparam-gaussian.csv").read_text().splitlines()
    assert lines[0] == "a1,a2,b1,b2,s1,s2" and len(lines) == 301


def test_compare_commands(tmp_path):
    assert run(tmp_path, "compare", "--solution", "linear") == 0
    assert load(tmp_path / "compare_linear_zero.json")["results"]["sup_distance"] <= 1e-12
    assert run(tmp_path, "compare", "--solution", "reparam:gaussian", "--a", "0.5,0", "--b", "0,0.5") == 0
    res = load(tmp_path / "compare_reparam-gaussian_spray.json")["results"]
    assert res["sup_distance"] <= 1e-5
    lines = (tmp_path / "ode_reparam-gaussian_spray.csv").read_text().splitlines()
    assert lines[0] == "t,x1,x2" and len(lines) == 258
    assert lines[-1].split(",")[:1] == ["1"]


def test_roughness_commands(tmp_path):
    assert run(tmp_path, "roughness", "--curve", "quadratic") == 0
    prof = (tmp_path / "profile_quadratic.csv").read_text().splitlines()
    assert prof[0] == "h,value" and all(line.endswith(",2") for line in prof[1:])
    assert run(tmp_path, "roughness", "--solution", "linear") == 0
    assert max(load(tmp_path / "roughness_linear.json")["results"]["second_difference_profile"]) <= 1e-9
    assert run(tmp_path, "roughness") == 0
    res = load(tmp_path / "roughness_reparam-weierstrass.json")["results"]
    assert res["growth_ratio"] >= 10 and res["arc_closure"]["max_residual"] <= 1e-8
    assert run(tmp_path, "roughness", "--tolerance", "growth=1e6") == 1


@pytest.mark.parametrize("args", [
    ["check", "--solution", "reparam:gaussian", "--samples", "500", "--workers", "1"],
    ["roughness"],
    ["compare", "--solution", "reparam:gaussian"],
])
def test_outputs_are_byte_identical(tmp_path, args):
    first, second = tmp_path / "one", tmp_path / "two"
    assert main([*args, "--out", str(first)]) == main([*args, "--out", str(second)])
    files = sorted(p.name for p in first.iterdir())
    assert files == sorted(p.name for p in second.iterdir())
    for name in files:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_workers_do_not_change_report(tmp_path):
    base = ["check", "--solution", "reparam:gaussian", "--samples", "800"]
    main([*base, "--out", str(tmp_path / "serial")])
    main([*base, "--workers", "4", "--chunk-size", "100", "--out", str(tmp_path / "threads")])
    a = load(tmp_path / "serial" / "axioms_reparam-gaussian.json")
    b = load(tmp_path / "threads" / "axioms_reparam-gaussian.json")
    assert a["results"] == b["results"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "geofun", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "roughness" in out.stdout
