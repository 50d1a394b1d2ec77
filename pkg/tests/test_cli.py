import json
import subprocess
import sys

import pytest

from kerrtraj.cli import ConfigError, emit_config, main, parse_config, run
from kerrtraj.counting import run_counting
from kerrtraj.model import ModelParams
from kerrtraj.record import write_events_json, write_record_csv


def test_scenario_preset_fig1a():
    cfg = parse_config(None, {"run.scenario": "fig1a_counting"})
    assert cfg.params == ModelParams(U=1.0, G=5.0, F=0.0, gamma=0.1, eta=1.0, n_max=15)
    assert cfg.dt == 1e-3


def test_scenario_preset_fig2a():
    cfg = parse_config(None, {"run.scenario": "fig2a_counting_1ph"})
    assert cfg.params.F == 5.0
    assert cfg.params.G == 0.0


def test_negative_rate_rejected():
    with pytest.raises(ConfigError, match="gamma"):
        parse_config(None, {"params.gamma": "-1"})


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[params]\nfoo = 1\n")
    with pytest.raises(ConfigError, match="foo"):
        parse_config(str(path))


def test_unknown_section_rejected(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[misc]\nU = 1\n")
    with pytest.raises(ConfigError, match="misc"):
        parse_config(str(path))


def test_type_mismatch_names_key():
    with pytest.raises(ConfigError, match="params.U"):
        parse_config(None, {"params.U": "three"})


def test_pinned_preset_requires_override():
    with pytest.raises(ConfigError, match="params.G"):
        parse_config(None, {"run.scenario": "fig1a_counting", "params.G": "4.0"})
    cfg = parse_config(None, {"run.scenario": "fig1a_counting", "params.G": "4.0"}, allow_override=True)
    assert cfg.params.G == 4.0
    # restating the pinned value is not an override
    cfg2 = parse_config(None, {"run.scenario": "fig1a_counting", "params.G": "5.0"})
    assert cfg2.params.G == 5.0


def test_config_round_trip(tmp_path):
    cfg = parse_config(None, {"run.scenario": "fig1bc_homodyne", "run.seed": "9", "run.t_final": "12.5"})
    path = tmp_path / "echo.ini"
    path.write_text(emit_config(cfg))
    assert parse_config(str(path)) == cfg


def test_output_dir_env(monkeypatch):
    monkeypatch.setenv("KERRTRAJ_OUTPUT_DIR", "/tmp/some-dir")
    cfg = parse_config(None, {})
    assert cfg.output_dir == "/tmp/some-dir"


def test_record_csv_format(tmp_path, two_photon_params):
    rec = run_counting(two_photon_params, t_final=1.0, dt=1e-3, sample_every=0.5, seed=3)
    csv_path = tmp_path / "t.csv"
    write_record_csv(rec, csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("#") and "1/eta" in lines[0]
    assert lines[1] == "t,x,p,parity,n"
    assert len(lines) == 2 + len(rec.sample_times)
    ev_path = tmp_path / "e.json"
    write_events_json(rec, ev_path)
    events = json.loads(ev_path.read_text())
    assert all(set(ev) == {"t", "channel"} for ev in events)
    assert all(ev["channel"] in ("1ph", "2ph") for ev in events)


def test_steady_state_scenario_artifacts(tmp_path):
    cfg = parse_config(None, {"run.scenario": "steady_state", "output.dir": str(tmp_path)})
    assert run(cfg, "steady_state") == 0
    payload = json.loads((tmp_path / "steady_state.json").read_text())
    assert payload["fit_applicable"]
    assert payload["p_plus"] == pytest.approx(0.50097, abs=1e-4)
    assert payload["p_minus"] == pytest.approx(0.49898, abs=1e-4)
    assert payload["alpha_re"] == pytest.approx(0.72306, abs=1e-4)
    assert payload["alpha_im"] == pytest.approx(-1.72832, abs=1e-4)
    assert payload["fidelity"] >= 0.95
    assert (tmp_path / "resolved_config.ini").exists()
    assert (tmp_path / "manifest.json").exists()


def test_steady_state_one_photon_not_applicable(tmp_path):
    rc = main([
        "steady-state", "--scenario", "steady_state", "--output-dir", str(tmp_path),
        "--set", "params.G=0", "--set", "params.F=5",
    ])
    assert rc == 0
    payload = json.loads((tmp_path / "steady_state.json").read_text())
    assert payload["fit_applicable"] is False
    assert "p_plus" not in payload


def test_traj_count_cli(tmp_path):
    rc = main([
        "traj", "count", "--scenario", "fig1a_counting", "--t-final", "2.0",
        "--seed", "4", "--output-dir", str(tmp_path),
    ])
    assert rc == 0
    for name in ("trajectory.csv", "events.json", "analysis.json", "run_meta.json", "quadratures.svg", "parity.svg", "manifest.json"):
        assert (tmp_path / name).exists(), name
    svg = (tmp_path / "parity.svg").read_text()
    assert "<polyline" in svg and "<svg" in svg
    analysis = json.loads((tmp_path / "analysis.json").read_text())
    assert "parity_switches" in analysis
    assert analysis["parity_switches"]["thresholds"] == {"outer": 0.99, "inner": 0.495}
    assert "x_histogram" in analysis


def test_cli_exit_code_config_error(tmp_path):
    rc = main(["traj", "count", "--set", "params.gamma=-2", "--output-dir", str(tmp_path)])
    assert rc == 2


def test_cli_exit_code_numerical_failure(tmp_path):
    # dt so large the jump probability cap trips immediately
    rc = main([
        "traj", "count", "--scenario", "fig1a_counting", "--t-final", "10.0",
        "--dt", "1.0", "--sample-every", "1.0", "--override",
        "--output-dir", str(tmp_path),
    ])
    assert rc == 3
    err = json.loads((tmp_path / "error.json").read_text())
    assert err["error"] == "StepSizeError"


def test_cli_scenario_subcommand_mismatch(tmp_path):
    rc = main(["traj", "count", "--scenario", "fig1bc_homodyne", "--output-dir", str(tmp_path)])
    assert rc == 2


def test_wigner_scenario(tmp_path):
    rc = main([
        "wigner", "--output-dir", str(tmp_path),
        "--set", "params.n_max=12",
    ])
    assert rc == 0
    svg = (tmp_path / "wigner.svg").read_text()
    assert svg.count("<rect") > 1000
    lines = (tmp_path / "wigner.csv").read_text().splitlines()
    assert lines[1] == "x,p,W"
    assert len(lines) == 2 + 101 * 101


def test_ensemble_cli_workers_deterministic(tmp_path):
    out1, out2 = tmp_path / "w1", tmp_path / "w2"
    base = [
        "ensemble", "--protocol", "counting", "--n-traj", "48", "--t-final", "1.0",
        "--seed", "5", "--sample-every", "0.25",
    ]
    assert main(base + ["--workers", "1", "--output-dir", str(out1)]) == 0
    assert main(base + ["--workers", "4", "--output-dir", str(out2)]) == 0
    assert (out1 / "ensemble.csv").read_bytes() == (out2 / "ensemble.csv").read_bytes()


def test_reproduce_fig2_writes_both_panels(tmp_path):
    rc = main([
        "reproduce", "fig2", "--t-final", "1.0", "--seed", "2",
        "--output-dir", str(tmp_path),
    ])
    assert rc == 0
    assert (tmp_path / "fig2a" / "trajectory.csv").exists()
    assert (tmp_path / "fig2b" / "trajectory.csv").exists()
    cfg_a = (tmp_path / "fig2a" / "resolved_config.ini").read_text()
    assert "fig2a_counting_1ph" in cfg_a


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "kerrtraj.cli", "steady-state", "--output-dir", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert (tmp_path / "steady_state.json").exists()
