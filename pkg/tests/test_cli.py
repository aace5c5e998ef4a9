"""Tests for the mixtrace command line."""
import json
import math

import pytest

from mixtrace.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_PASS, main
from mixtrace.fieldio import read_field

PI = str(math.pi)


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_admissible(tmp_path, capsys):
    code = main(["admissible", "--a", "1,1", "--p", "2,2", "--s", "1", "--axis", "1", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    verdict = _json_out(capsys)
    assert verdict["admissible"] is True
    assert verdict["bound"] == "1/2"
    assert verdict["trace_space"]["scale"] == "F"
    assert json.loads((tmp_path / "admissible.json").read_text()) == verdict


def test_admissible_rejects_intermediate_axis(capsys):
    code = main(["admissible", "--a", "1,1,1", "--s", "1", "--axis", "2"])
    assert code == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_verify_list(capsys):
    assert main(["verify", "--list"]) == EXIT_PASS
    names = capsys.readouterr().out.split()
    assert "hardy" in names
    assert "borderline-table" in names


def test_verify_writes_report(tmp_path, capsys):
    code = main(["verify", "hardy", "--profile", "quick", "--seed", "3", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    assert capsys.readouterr().out.startswith("PASS hardy")
    report = json.loads((tmp_path / "hardy.json").read_text())
    assert report["passed"] is True
    assert report["config"]["seed"] == 3
    assert (tmp_path / "hardy_cases.csv").is_file()


def test_verify_reads_config_file(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"profile": "quick", "ensemble_size": 2, "options": {"length": 12}}))
    code = main(["verify", "hardy", "--config", str(config), "--out", str(tmp_path / "out")])
    assert code == EXIT_PASS
    report = json.loads((tmp_path / "out" / "hardy.json").read_text())
    assert report["config"]["ensemble_size"] == 2
    assert report["config"]["options"]["length"] == 12


def test_verify_config_errors(tmp_path):
    assert main(["verify", "hardy", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    assert main(["verify", "no-such-suite", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["verify"]) == EXIT_CONFIG


def test_norm_of_generated_field(capsys):
    code = main(["norm", "--grid", "32x32", "--half-period", PI, "--radius", "4", "--s", "1"])
    assert code == EXIT_PASS
    report = _json_out(capsys)
    assert report["value"] > 0
    assert report["remainder_ratio"] < 1e-10


def test_band_outside_grid(capsys):
    assert main(["norm", "--grid", "16x16", "--half-period", PI, "--radius", "12"]) == EXIT_CONFIG


def test_decompose_writes_blocks(tmp_path, capsys):
    code = main(["decompose", "--grid", "32x32", "--half-period", PI, "--radius", "4", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    summary = _json_out(capsys)
    assert summary["reconstruction_error"] < 1e-12
    assert (tmp_path / "remainder.mtgf").is_file()
    block = read_field(tmp_path / "block_00.mtgf")
    assert block.grid.points == (32, 32)


def test_trace_from_field_file(tmp_path, capsys):
    assert main(["decompose", "--grid", "32x32", "--half-period", PI, "--radius", "4", "--out", str(tmp_path)]) == EXIT_PASS
    capsys.readouterr()
    code = main(["trace", "--field", str(tmp_path / "block_01.mtgf"), "--axis", "2", "--out", str(tmp_path / "trace")])
    assert code == EXIT_PASS
    diagnostics = _json_out(capsys)
    assert diagnostics["axis"] == 2
    assert (tmp_path / "trace" / "trace.csv").is_file()


def test_extend_reproduces_trace(capsys):
    code = main(["extend", "--grid", "32", "--half-period", PI, "--radius", "2"])
    assert code == EXIT_PASS
    summary = _json_out(capsys)
    assert summary["trace_error"] < 1e-8
    assert summary["grid"]["points"] == [512, 32]


def test_counterexample_slope(tmp_path, capsys):
    code = main(["counterexample", "--j-min", "4", "--j-max", "7", "--q", "2", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    payload = _json_out(capsys)
    assert payload["s"] == pytest.approx(0.5)
    assert payload["fit"]["slope"] == pytest.approx(-0.5, abs=0.01)
    assert (tmp_path / "counterexample_norms.csv").is_file()


def _write_config(tmp_path, payload):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(payload))
    return str(path)


def test_norm_takes_grid_params_and_seed_from_config(tmp_path, capsys):
    config = _write_config(tmp_path, {
        "grid": {"half_periods": [math.pi, math.pi], "points": [32, 32]},
        "params": {"s": 1, "a": {"a": [1, 1]}, "p": {"p": [2, 2]}, "q": 2},
        "seed": 5,
        "options": {"radius": 4},
    })
    assert main(["norm", "--config", config]) == EXIT_PASS
    from_config = _json_out(capsys)
    assert main(["norm", "--grid", "32x32", "--half-period", PI, "--radius", "4", "--s", "1", "--seed", "5"]) == EXIT_PASS
    from_flags = _json_out(capsys)
    assert from_config["value"] == pytest.approx(from_flags["value"], rel=1e-12)
    assert len(from_config["contributions"]) == len(from_flags["contributions"])

    # explicit flags override the file
    assert main(["norm", "--config", config, "--s", "0"]) == EXIT_PASS
    assert _json_out(capsys)["value"] != pytest.approx(from_config["value"], rel=1e-6)


def test_config_for_counterexample_sets_exponents(tmp_path, capsys):
    config = _write_config(tmp_path, {"params": {"s": 0.25, "a": {"a": [1, 1]}, "p": {"p": [2, 2]}, "q": 2, "scale": "B"}})
    assert main(["counterexample", "--config", config, "--j-min", "4", "--j-max", "7"]) == EXIT_PASS
    assert _json_out(capsys)["s"] == pytest.approx(0.25)


def test_config_keys_a_command_cannot_use(tmp_path, capsys):
    assert main(["norm", "--config", _write_config(tmp_path, {"options": {"layout": "full"}})]) == EXIT_CONFIG
    assert "does not take" in capsys.readouterr().err
    assert main(["admissible", "--a", "1,1", "--config", _write_config(tmp_path, {"seed": 3})]) == EXIT_CONFIG
    assert main(["norm", "--config", _write_config(tmp_path, {"suite": "hardy"})]) == EXIT_CONFIG


def test_verify_only_flags_are_rejected_elsewhere():
    with pytest.raises(SystemExit) as exc:
        main(["norm", "--refine-check"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["admissible", "--a", "1,1", "--profile", "quick"])
    assert exc.value.code == 2


def test_domain_error_has_its_own_exit_code(capsys):
    assert main(["counterexample", "--axis", "3"]) == EXIT_DOMAIN
    assert "domain error (DomainError)" in capsys.readouterr().err
