from __future__ import annotations

import json

import numpy as np
import pytest

from einstein_pinch.curvature.curvature_core import model_space
from einstein_pinch.utils.reporting.schema import validate_report
from einstein_pinch.workflows.cli import build_parser, main
from einstein_pinch.workflows.commands import EXIT_OK, EXIT_PRECONDITION

QUICK_VERIFY = ["--samples", "5000", "--refinements", "2", "--domination-samples", "500", "--pinching-samples", "2000"]


def _run_json(capsys, argv: list[str]) -> tuple[int, dict]:
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_constants_json(capsys):
    code, report = _run_json(capsys, ["constants"])
    assert code == EXIT_OK
    assert validate_report(report)
    assert report["command"] == "constants"
    assert report["schema"] == "1"
    payload = report["payload"]
    assert payload["status"] == "ok"
    assert payload["all_printed_decimals_match"] is True
    rows = {row["name"]: row for row in payload["table"]["rows"]}
    assert rows["M1"]["value"] == "0.866025"
    assert payload["corollary_audit"]["two_k_half"] == "0.400544"


def test_constants_precision_flag(capsys):
    code, report = _run_json(capsys, ["constants", "--precision", "12"])
    assert code == EXIT_OK
    assert report["config"]["precision"] == 12
    assert all(len(row["value"].split(".")[1]) == 12 for row in report["payload"]["table"]["rows"])


def test_global_flags_before_or_after_subcommand(capsys):
    code, before = _run_json(capsys, ["--seed", "5", "model", "S4"])
    assert code == EXIT_OK
    code, after = _run_json(capsys, ["model", "S4", "--seed", "5"])
    assert code == EXIT_OK
    assert before["seed"] == after["seed"] == 5
    assert before["payload"] == after["payload"]


def test_verify_lemma22(capsys):
    code, report = _run_json(capsys, ["verify", "22", "--eps", "0.05", *QUICK_VERIFY])
    assert code == EXIT_OK
    payload = report["payload"]
    assert payload["status"] == "verified"
    assert payload["report"]["counterexample"] is False
    assert payload["empirical_delta"] > 0
    assert "skipped" in payload["extras"]["domination"]
    assert payload["extras"]["pinching"]["all_positive"] is True
    assert report["config"]["arguments"]["samples"] == 5000


def test_verify_lemma41(capsys):
    code, report = _run_json(capsys, ["verify", "41", "--eps", "0.05", "--s", "0.5", *QUICK_VERIFY])
    assert code == EXIT_OK
    payload = report["payload"]
    assert payload["status"] == "verified"
    assert payload["report"]["s"] == 0.5
    assert payload["extras"]["domination"]["holds"] is True


def test_verify_out_of_range_eps_is_a_precondition_error(capsys):
    code, error = _run_json(capsys, ["verify", "22", "--eps", "0.5", *QUICK_VERIFY])
    assert code == EXIT_PRECONDITION
    assert error["error"] == "PreconditionError"
    assert error["constraint"] == "eps_range"


def test_verify_payload_is_deterministic(capsys):
    argv = ["verify", "22", "--eps", "0.1", "--no-extras", "--samples", "4000", "--refinements", "1"]
    _, first = _run_json(capsys, argv)
    _, second = _run_json(capsys, [*argv, "--threads", "2"])
    assert first["payload"] == second["payload"]


def test_flow_round_sphere(capsys):
    code, report = _run_json(capsys, ["flow", "S4", "--t-end", "0.4", "--dt", "1e-3"])
    assert code == EXIT_OK
    checks = report["payload"]["checks"]
    assert checks["self_similar_ok"] is True
    assert checks["self_similar_residual"] < 1e-6
    assert checks["boundary_identity_residual"] < 1e-12
    assert report["payload"]["blow_up_time"] == pytest.approx(0.5)


def test_flow_custom_profile(capsys):
    code, report = _run_json(capsys, ["flow", "--a=-0.5,0.2,1.0", "--c=0.1,0.3,0.4", "--t-end", "0.2", "--dt", "0.01"])
    assert code == EXIT_OK
    checks = report["payload"]["checks"]
    assert "self_similar_residual" not in checks
    assert checks["trace_identity_residual"] < 1e-8
    assert report["config"]["arguments"]["a"] == [-0.5, 0.2, 1.0]


def test_flow_csv(capsys, tmp_path):
    target = tmp_path / "cp2.csv"
    code, _ = _run_json(capsys, ["flow", "CP2", "--t-end", "0.25", "--dt", "0.01", "--csv", str(target)])
    assert code == EXIT_OK
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,a1,a2,a3,c1,c2,c3,R,I"
    assert len(lines) == 27


def test_flow_past_blow_up(capsys):
    code, error = _run_json(capsys, ["flow", "S4", "--t-end", "0.6"])
    assert code == EXIT_PRECONDITION
    assert error["constraint"] == "t_end_before_blow_up"


def test_flow_without_initial_data(capsys):
    code, _ = _run_json(capsys, ["flow"])
    assert code == EXIT_PRECONDITION


def test_berger_fixture(capsys):
    code, report = _run_json(capsys, ["berger", "--fixture", "CP2"])
    assert code == EXIT_OK
    payload = report["payload"]
    assert payload["all_properties_hold"] is True
    data = payload["berger_data"]
    assert [data[key] for key in ("K12", "K13", "K14", "x", "y")] == pytest.approx(
        [1 / 6, 1 / 6, 2 / 3, 1 / 6, 1 / 6], abs=1e-6
    )


def test_berger_degenerate_fixture(capsys):
    code, report = _run_json(capsys, ["berger", "--fixture", "S4"])
    assert code == EXIT_OK
    assert report["payload"]["degenerate"] is True


def test_berger_tensor_file(capsys, tmp_path):
    path = tmp_path / "cp2.json"
    path.write_text(json.dumps(model_space("CP2").to_json()), encoding="utf-8")
    code, report = _run_json(capsys, ["berger", str(path), "--method", "multistart", "--starts", "8"])
    assert code == EXIT_OK
    assert report["payload"]["all_properties_hold"] is True


def test_berger_rejects_non_einstein_tensor(capsys, tmp_path):
    path = tmp_path / "scaled.json"
    scaled = 2.0 * np.asarray(model_space("CP2").comp)
    path.write_text(json.dumps({"comp": scaled.tolist()}), encoding="utf-8")
    code, error = _run_json(capsys, ["berger", str(path)])
    assert code == EXIT_PRECONDITION
    assert error["error"] == "NotEinsteinError"
    assert error["ricci_defect"] == pytest.approx(1.0)


def test_berger_missing_file(capsys, tmp_path):
    code, _ = _run_json(capsys, ["berger", str(tmp_path / "missing.json")])
    assert code == EXIT_PRECONDITION


def test_model_text_report(capsys):
    assert main(["model", "S2xS2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "EINSTEIN-PINCH MODEL SPACE" in out
    assert "RESULTS" in out


def test_model_json(capsys):
    code, report = _run_json(capsys, ["model", "S2xS2"])
    assert code == EXIT_OK
    payload = report["payload"]
    assert payload["scalar_curvature"] == pytest.approx(4.0)
    assert payload["sectional_range"] == pytest.approx([0.0, 1.0], abs=1e-9)
    assert payload["profile"]["a"] == pytest.approx([0.0, 0.0, 2.0], abs=1e-12)
    assert payload["profile"]["c"] == pytest.approx([0.0, 0.0, 2.0], abs=1e-12)


def test_output_dir_artifacts(capsys, tmp_path):
    code, _ = _run_json(capsys, ["flow", "S4", "--t-end", "0.1", "--dt", "0.01", "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    runs = [path for path in tmp_path.iterdir() if path.name.endswith("_flow")]
    assert len(runs) == 1
    for folder in (runs[0], tmp_path / "latest"):
        assert (folder / "report.json").is_file()
        assert (folder / "report.txt").is_file()
        assert (folder / "trajectory.csv").is_file()
    stored = json.loads((tmp_path / "latest" / "report.json").read_text(encoding="utf-8"))
    assert validate_report(stored)


def test_yaml_config_file(capsys, tmp_path):
    config = tmp_path / "pinch.yaml"
    config.write_text("seed: 42\nprecision: 8\n", encoding="utf-8")
    code, report = _run_json(capsys, ["constants", "--config", str(config)])
    assert code == EXIT_OK
    assert report["seed"] == 42
    assert report["config"]["precision"] == 8


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["--version"])
    assert excinfo.value.code == 0
    assert "einstein_pinch" in capsys.readouterr().out


def test_seed_out_of_range_from_env_is_a_precondition_error(capsys, monkeypatch):
    monkeypatch.setenv("EINSTEIN_PINCH_SEED", "-1")
    code, error = _run_json(capsys, ["model", "S4"])
    assert code == EXIT_PRECONDITION
    assert error["error"] == "DomainError"


def test_slope_flag_is_not_taken_for_a_global_prefix():
    args = build_parser().parse_args(["verify", "41", "--s", "0.5", "--eps", "0.02"])
    assert args.s == 0.5
    assert args.eps == 0.02
    assert not hasattr(args, "seed")
