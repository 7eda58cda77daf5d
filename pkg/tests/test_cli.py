import csv
import textwrap

import numpy as np
import pytest

from banditgne.cli import main
from banditgne.config import PRESETS, load_config, preset_config, validate, validate_config
from banditgne.errors import ConfigError
from banditgne.experiment import run_experiment


def _write(tmp_path, text, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_validate_cites_violated_conditions(tmp_path):
    bad_order = _write(tmp_path, "schedule: {a1: 0.45, a2: 0.2, a3: 0.1}\n")
    report = validate_config(bad_order)
    assert not report.ok and any("a2 < a3" in e for e in report.errors)
    bad_a1 = _write(tmp_path, "schedule: {a1: 0.6, a2: 0.05, a3: 0.1, variant: delay_free}\n", "b.yaml")
    report = validate_config(bad_a1)
    assert not report.ok and any("a1 < 0.5" in e for e in report.errors)


def test_validate_corollary_preset(tmp_path):
    report = validate_config(_write(tmp_path, "preset: corollary2\n"))
    assert report.ok
    assert any("(0.428571, 0, 0.142857)" in n for n in report.notes)


def test_validate_delayed_needs_tau():
    cfg = preset_config("figure3")
    cfg.schedule = dict(cfg.schedule, tau=0)
    assert any("tau >= 1" in e for e in validate(cfg).errors)


def test_parse_error_has_line_context(tmp_path):
    path = _write(tmp_path, "game:\n  kind: cournot\nschedule: [a1, : }\n")
    with pytest.raises(ConfigError, match="line 3"):
        load_config(path)
    report = validate_config(path)
    assert not report.ok and "line 3" in report.errors[0]


def test_presets_defaults():
    for name in PRESETS:
        cfg = preset_config(name)
        assert (cfg.horizon, cfg.runs) == (5000, 10)
        assert validate(cfg).ok
    assert preset_config("figure3").tau == 1
    assert preset_config("figure1").tau == 0


def test_single_round_single_run(tmp_path):
    cfg = preset_config("figure1", horizon=1, runs=1, out=str(tmp_path))
    res = run_experiment(cfg)
    assert res.status == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"aggregate.csv", "summary.txt", "run_000_trace.csv", "run_000_regret.csv", "run_000_violation.csv"} <= names
    agg = _rows(tmp_path / "aggregate.csv")
    assert agg[0] == ["t", "player", "mean_regret_over_t", "regret_stderr", "mean_violation_over_t", "violation_stderr"]
    # one round, one row per player
    assert len(agg) - 1 == 20 and {r[0] for r in agg[1:]} == {"1"}
    assert len(_rows(tmp_path / "run_000_violation.csv")) - 1 == 1


def test_schema_and_row_counts(tmp_path):
    T = 30
    res = run_experiment(preset_config("figure3", horizon=T, runs=2, out=str(tmp_path)))
    assert res.status == 0
    trace = _rows(tmp_path / "run_001_trace.csv")
    assert trace[0] == ["t", "player", "x_0", "z_0", "lambda_0", "f_value", "g_value_0", "consensus_err"]
    assert len(trace) - 1 == T * 20
    assert _rows(tmp_path / "run_000_regret.csv")[0] == ["t", "player", "cum_regret", "regret_over_t"]
    assert len(_rows(tmp_path / "run_000_regret.csv")) - 1 == T * 20
    vio = _rows(tmp_path / "run_000_violation.csv")
    assert vio[0] == ["t", "violation_norm", "violation_over_t"] and len(vio) - 1 == T
    summary = (tmp_path / "summary.txt").read_text()
    for key in ("sigma_m:", "path_variation:", "measured_lambda_star_norm:", "assertions_checked:",
                "closed_form_discrepancy:", "horizon_runs_note:"):
        assert key in summary


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_are_byte_reproducible(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run_experiment(preset_config(name, horizon=40, runs=2, out=str(out))).status == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_worker_pool_matches_serial(tmp_path):
    a, b = tmp_path / "serial", tmp_path / "pool"
    run_experiment(preset_config("figure1", horizon=20, runs=3, out=str(a)))
    cfg = preset_config("figure1", horizon=20, runs=3, out=str(b))
    cfg.workers = 2
    run_experiment(cfg)
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_trajectory_cache_is_reused(tmp_path):
    cfg = preset_config("figure1", horizon=15, runs=1, out=str(tmp_path))
    first = run_experiment(cfg)
    second = run_experiment(cfg)
    assert not first.trajectory.cached and second.trajectory.cached
    np.testing.assert_array_equal(first.trajectory.x_star, second.trajectory.x_star)
    assert "trajectory_cached: True" in (tmp_path / "summary.txt").read_text()


def test_closed_form_comparator_and_scripted_game(tmp_path):
    cfg = preset_config("figure1", horizon=10, runs=1)
    cfg.comparator = "closed_form"
    res = run_experiment(cfg, write=False)
    assert res.status == 0 and res.trajectory.source == "closed_form"
    path = _write(tmp_path, """
        game:
          kind: scripted
          players:
            - {set: {kind: box, lower: [0.0], upper: [2.0]}, Q: [[2.0]], q: -2.0, A: [[1.0]], b: 0.5}
            - {set: {kind: box, lower: [0.0], upper: [2.0]}, Q: [[2.0]], q: {const: -2.0, amp: 0.5, period: 12}, A: [[1.0]], b: 0.5}
          coupling: {"0,1": [[0.2]], "1,0": [[0.2]]}
        graph: {kind: complete}
        horizon: 12
        runs: 2
        """)
    res = run_experiment(load_config(path), write=False)
    assert res.status == 0
    assert res.mean_regret_over_t.shape == (12, 2)


def test_invalid_config_and_abort_status(tmp_path):
    cfg = preset_config("figure1", horizon=5, runs=1)
    cfg.schedule = dict(cfg.schedule, a2=0.3)
    assert run_experiment(cfg, write=False).status == 1
    bad = _write(tmp_path, "game: {kind: cournot}\nschedule: {a1: 0.45, a2: 0.1, a3: 0.11}\nhorizon: 5\nruns: 1\n")
    assert main(["run", "--config", str(bad), "--horizon", "0"]) == 1


def test_cli_commands(tmp_path, capsys):
    assert main(["presets", "list"]) == 0
    assert "figure4" in capsys.readouterr().out
    cfg = _write(tmp_path, "preset: corollary2\n")
    assert main(["validate", str(cfg)]) == 0
    assert "(0.428571, 0, 0.142857)" in capsys.readouterr().out
    out = tmp_path / "run"
    assert main(["run", "--preset", "figure2", "--horizon", "8", "--runs", "1", "--seed", "3", "--out", str(out)]) == 0
    assert "seed: 3" in (out / "summary.txt").read_text()
    traj = tmp_path / "traj"
    assert main(["oracle", "--preset", "figure1", "--horizon", "8", "--out", str(traj)]) == 0
    assert len(list(traj.glob("gne_trajectory_*.csv"))) == 1
    with pytest.raises(SystemExit):
        main(["run", "--preset", "figure9"])
