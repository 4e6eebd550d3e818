"""CLI tests: argument plumbing, exit codes, file outputs, config files,
environment overrides, and byte-level reproducibility."""

import json
import os

import pytest

from ybcavity.cli import main
from ybcavity.config import config_from_dict, default_run_config, dump_config


@pytest.fixture(autouse=True)
def _scrub_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith("YBCAVITY_"):
            monkeypatch.delenv(name)


def _write_config(tmp_path, overrides):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(overrides))
    return str(path)


def _small_stochastic(tmp_path, **run_extra):
    run = {"n_runs": 60, **run_extra}
    return _write_config(tmp_path, {"run": run})


def test_print_defaults_is_machine_readable(capsys):
    assert main(["--print-defaults"]) == 0
    out = capsys.readouterr().out
    doc = json.loads(out)
    assert set(doc) == {"scheme", "cavity", "drive", "shift_beam",
                       "geometry", "mot", "run", "grids"}
    # the printed document reconstructs the default config exactly
    assert dump_config(config_from_dict(doc)) == out


def test_missing_command_is_a_config_error(capsys):
    assert main([]) == 2
    assert "command is required" in capsys.readouterr().err


def test_motdip_emits_tagged_csv(tmp_path):
    assert main(["motdip", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "motdip.csv").read_text().splitlines()
    assert lines[0] == "# format=ybcavity.dip.v1"
    assert lines[1] == "detuning_MHz,normalized_N"
    values = [float(row.split(",")[1]) for row in lines[2:]]
    assert min(values) < 0.2 and max(values) <= 1.0


def test_motdip_env_override_flattens_dip(tmp_path, monkeypatch):
    monkeypatch.setenv("YBCAVITY_MOT__P1_POPULATION", "0.0")
    assert main(["motdip", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "motdip.csv").read_text().splitlines()[2:]
    assert all(float(row.split(",")[1]) == 1.0 for row in lines)


def test_spectrum_outputs_and_determinism(tmp_path):
    cfg = _write_config(tmp_path, {
        "grids": {"spectrum_mhz": {"start": -3.0, "stop": 9.0,
                                   "step": 0.5}}})
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
    for name in ("spectrum_shift_off.csv", "spectrum_shift_on.csv",
                 "spectrum_summary.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    summary = json.loads((out_a / "spectrum_summary.json").read_text())
    assert abs(summary["peak_shift_off_mhz"]) <= 0.5
    assert summary["peak_shift_on_mhz"] > 2.0
    assert summary["engineered_shift_mhz"] == pytest.approx(6.8, rel=0.1)


def test_snr_sweep_structure(tmp_path):
    cfg = _write_config(tmp_path, {
        "grids": {"snr_power_mw": [0.0, 2.0, 9.0],
                  "snr_waist_um": [20.0, 50.0]}})
    assert main(["snr", "--config", cfg, "--out", str(tmp_path)]) == 0
    power_rows = (tmp_path / "snr_vs_power.csv").read_text().splitlines()[2:]
    snrs = [float(r.split(",")[1]) for r in power_rows]
    assert snrs == sorted(snrs)
    waist_rows = (tmp_path / "snr_vs_waist.csv").read_text().splitlines()[2:]
    by_waist = {float(r.split(",")[0]): float(r.split(",")[1])
                for r in waist_rows}
    assert by_waist[20.0] < by_waist[50.0]


def test_scatter_requires_seed(tmp_path, capsys):
    cfg = _small_stochastic(tmp_path)
    assert main(["scatter", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "seed" in capsys.readouterr().err


def test_scatter_outputs_and_correlation_ordering(tmp_path):
    cfg = _small_stochastic(tmp_path, n_runs=150, initial_spin="up")
    out = tmp_path / "data"
    assert main(["scatter", "--config", cfg, "--seed", "11",
                 "--out", str(out), "--threads", "2"]) == 0
    summary = json.loads((out / "scatter_summary.json").read_text())
    assert summary["pearson_shift_on"] < summary["pearson_shift_off"]
    assert (out / "scatter_shift_off.csv").exists()
    assert (out / "scatter_shift_on.csv").exists()


def test_scatter_reruns_are_byte_identical(tmp_path):
    cfg = _small_stochastic(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["scatter", "--config", cfg, "--seed", "3",
                 "--out", str(out_a), "--threads", "1"]) == 0
    assert main(["scatter", "--config", cfg, "--seed", "3",
                 "--out", str(out_b), "--threads", "4"]) == 0
    for name in ("scatter_shift_off.csv", "scatter_shift_on.csv",
                 "scatter_summary.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_transit_jsonl_and_summary(tmp_path):
    cfg = _small_stochastic(tmp_path, n_runs=100, initial_spin="up")
    assert main(["transit", "--config", cfg, "--seed", "5",
                 "--out", str(tmp_path), "--format", "jsonl"]) == 0
    lines = (tmp_path / "transit_records.jsonl").read_text().splitlines()
    assert json.loads(lines[0]) == {"format": "ybcavity.transit.v1"}
    assert len(lines) == 101
    summary = json.loads((tmp_path / "transit_summary.json").read_text())
    assert summary["mean_counts_per_atom"] > 1.0
    assert summary["monte_carlo_snr"] == "inf" \
        or summary["monte_carlo_snr"] > 2.0


def test_bad_config_file_is_a_config_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["motdip", "--config", str(path)]) == 2
    assert "not valid JSON" in capsys.readouterr().err

    cfg = _write_config(tmp_path, {"unknown_section": {}})
    assert main(["motdip", "--config", cfg]) == 2


def test_flag_overrides_reach_the_config(tmp_path):
    cfg = _write_config(tmp_path, {"run": {"n_runs": 40,
                                           "emit_format": "csv"}})
    assert main(["transit", "--config", cfg, "--seed", "2",
                 "--out", str(tmp_path), "--format", "jsonl"]) == 0
    assert (tmp_path / "transit_records.jsonl").exists()
    assert not (tmp_path / "transit_records.csv").exists()
