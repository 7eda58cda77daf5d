"""Experiment orchestration: GNE trajectory, seeded runs, CSV persistence and summary.

All floats are written with ``repr`` (shortest round-trip form), so two
executions with the same config and seed produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import (
    DEFAULT_HORIZON,
    DEFAULT_RUNS,
    RunConfig,
    build_game,
    build_graph,
    build_schedule,
    validate,
)
from .errors import ConfigError, InvariantViolation
from .games import cournot_closed_form_gne
from .learner import run as run_learner
from .metrics import MetricSeries, metric_series, monte_carlo_mean, path_variation
from .oracle import gne_trajectory
from .rng import player_streams

TRACE_FILE = "run_{:03d}_trace.csv"
REGRET_FILE = "run_{:03d}_regret.csv"
VIOLATION_FILE = "run_{:03d}_violation.csv"
AGGREGATE_FILE = "aggregate.csv"
SUMMARY_FILE = "summary.txt"
TRAJECTORY_FILE = "gne_trajectory_{}.csv"


def fmt(v) -> str:
    return repr(float(v))


@dataclass
class Trajectory:
    """Comparator sequence for rounds ``1..T+1``."""

    x_star: np.ndarray  # (T+1, n)
    lambda_star: np.ndarray  # (T+1, m)
    residual: np.ndarray  # (T+1,)
    source: str = "oracle"
    cached: bool = False


@dataclass
class RunRecord:
    run_index: int
    x: np.ndarray  # (T, n)
    z: np.ndarray  # (T, n)
    lam: np.ndarray  # (T, N, m)
    f_values: np.ndarray  # (T, N)
    g_values: np.ndarray  # (T, N, m)
    consensus_err: np.ndarray  # (T, N)
    metrics: MetricSeries
    assertions: dict


@dataclass
class ExperimentResult:
    config: RunConfig
    status: int
    trajectory: Trajectory | None = None
    records: list[RunRecord] = field(default_factory=list)
    mean_regret_over_t: np.ndarray | None = None  # (T, N)
    stderr_regret_over_t: np.ndarray | None = None
    mean_violation_over_t: np.ndarray | None = None  # (T,)
    stderr_violation_over_t: np.ndarray | None = None
    summary: dict = field(default_factory=dict)
    message: str = ""
    files: list[Path] = field(default_factory=list)


# ---------------------------------------------------------------------------
# trajectory


def _trajectory_key(cfg: RunConfig) -> str:
    blob = json.dumps(
        {"game": cfg.game, "tol": cfg.oracle_tol, "comparator": cfg.comparator},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _write_trajectory(path: Path, traj: Trajectory) -> None:
    n, m = traj.x_star.shape[1], traj.lambda_star.shape[1]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"x_star_{k}" for k in range(n)] + [f"lambda_star_{k}" for k in range(m)] + ["vi_residual"])
        for k in range(traj.x_star.shape[0]):
            w.writerow(
                [k + 1]
                + [fmt(v) for v in traj.x_star[k]]
                + [fmt(v) for v in traj.lambda_star[k]]
                + [fmt(traj.residual[k])]
            )


def _read_trajectory(path: Path, rows: int, n: int, m: int) -> Trajectory | None:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] < rows or data.shape[1] != 2 + n + m:
        return None
    data = data[:rows]
    return Trajectory(data[:, 1 : 1 + n], data[:, 1 + n : 1 + n + m], data[:, -1], cached=True)


def compute_trajectory(cfg: RunConfig, horizon: int | None = None, out: Path | None = None) -> Trajectory:
    """GNE (or closed-form) comparator for rounds ``1..T+1``, cached under ``out``."""
    game = build_game(cfg.game)
    T = int(cfg.horizon if horizon is None else horizon)
    if cfg.comparator == "closed_form":
        xs = np.array([cournot_closed_form_gne(t, game.n_players) for t in range(1, T + 2)])
        return Trajectory(xs, np.full((T + 1, game.m), np.nan), np.full(T + 1, np.nan), source="closed_form")
    path = out / TRAJECTORY_FILE.format(_trajectory_key(cfg)) if out is not None else None
    if path is not None and path.exists():
        traj = _read_trajectory(path, T + 1, game.n, game.m)
        if traj is not None:
            return traj
    sols = gne_trajectory(game, T, tol=cfg.oracle_tol, seed=int(cfg.seed))
    traj = Trajectory(
        np.array([s.x_star for s in sols]),
        np.array([s.lambda_star for s in sols]),
        np.array([s.residual for s in sols]),
    )
    if path is not None:
        out.mkdir(parents=True, exist_ok=True)
        _write_trajectory(path, traj)
    return traj


# ---------------------------------------------------------------------------
# runs


def execute_run(cfg_dict: dict, run_index: int, x_star: np.ndarray, order=None) -> RunRecord:
    """One seeded run; rebuilt from the plain config so it can live in a worker process."""
    from .config import config_from_dict

    cfg = config_from_dict(cfg_dict, cfg_dict.get("preset"))
    game = build_game(cfg.game)
    W = build_graph(cfg.graph, game.n_players)
    sched = build_schedule(cfg, game)
    rngs = player_streams(int(cfg.seed), run_index, game.n_players)
    state = run_learner(game, W, sched, int(cfg.horizon), rngs, mode=cfg.assertion_mode, order=order)
    traces = state.traces
    metrics = metric_series(game, traces, x_star, run_id=run_index, seed=int(cfg.seed))
    return RunRecord(
        run_index=run_index,
        x=np.array([tr.x for tr in traces]),
        z=np.array([tr.z for tr in traces]),
        lam=np.array([tr.lam for tr in traces]),
        f_values=np.array([tr.f_values for tr in traces]),
        g_values=np.array([tr.g_values for tr in traces]),
        consensus_err=np.array([tr.consensus_err for tr in traces]),
        metrics=metrics,
        assertions={
            "summary": state.monitor.summary(),
            "checked": int(sum(c for c, _ in state.monitor.summary().values())),
            "failed": int(state.monitor.total_failures),
            "first_failure": "; ".join(f"{k}: {v}" for k, v in state.monitor.first_failure.items()),
        },
    )


def _execute_all(cfg: RunConfig, x_star: np.ndarray) -> list[RunRecord]:
    payload = cfg.to_dict()
    indices = list(range(int(cfg.runs)))
    if int(cfg.workers) <= 1 or len(indices) == 1:
        return [execute_run(payload, k, x_star) for k in indices]
    with ProcessPoolExecutor(max_workers=int(cfg.workers)) as pool:
        futures = {k: pool.submit(execute_run, payload, k, x_star) for k in indices}
        return [futures[k].result() for k in indices]


# ---------------------------------------------------------------------------
# persistence


def _write_rows(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_run(out: Path, rec: RunRecord, game) -> list[Path]:
    dims, offsets = game.dims, game._offsets
    width = max(dims)
    m = game.m
    T, N = rec.x.shape[0], game.n_players
    header = (
        ["t", "player"]
        + [f"x_{k}" for k in range(width)]
        + [f"z_{k}" for k in range(width)]
        + [f"lambda_{k}" for k in range(m)]
        + ["f_value"]
        + [f"g_value_{k}" for k in range(m)]
        + ["consensus_err"]
    )

    def trace_rows():
        for k in range(T):
            for i in range(N):
                sl = slice(offsets[i], offsets[i + 1])
                pad = [""] * (width - dims[i])
                yield (
                    [k + 1, i]
                    + [fmt(v) for v in rec.x[k, sl]]
                    + pad
                    + [fmt(v) for v in rec.z[k, sl]]
                    + pad
                    + [fmt(v) for v in rec.lam[k, i]]
                    + [fmt(rec.f_values[k, i])]
                    + [fmt(v) for v in rec.g_values[k, i]]
                    + [fmt(rec.consensus_err[k, i])]
                )

    paths = [out / TRACE_FILE.format(rec.run_index), out / REGRET_FILE.format(rec.run_index), out / VIOLATION_FILE.format(rec.run_index)]
    _write_rows(paths[0], header, trace_rows())
    reg, reg_t = rec.metrics.regret, rec.metrics.regret_over_t()
    _write_rows(
        paths[1],
        ["t", "player", "cum_regret", "regret_over_t"],
        ([k + 1, i, fmt(reg[k, i]), fmt(reg_t[k, i])] for k in range(T) for i in range(N)),
    )
    vio, vio_t = rec.metrics.violation, rec.metrics.violation_over_t()
    _write_rows(
        paths[2],
        ["t", "violation_norm", "violation_over_t"],
        ([k + 1, fmt(vio[k]), fmt(vio_t[k])] for k in range(T)),
    )
    return paths


def _write_aggregate(out: Path, res: ExperimentResult) -> Path:
    mr, sr = res.mean_regret_over_t, res.stderr_regret_over_t
    mv, sv = res.mean_violation_over_t, res.stderr_violation_over_t
    T, N = mr.shape
    path = out / AGGREGATE_FILE
    _write_rows(
        path,
        ["t", "player", "mean_regret_over_t", "regret_stderr", "mean_violation_over_t", "violation_stderr"],
        ([k + 1, i, fmt(mr[k, i]), fmt(sr[k, i]), fmt(mv[k]), fmt(sv[k])] for k in range(T) for i in range(N)),
    )
    return path


def _write_summary(out: Path, summary: dict) -> Path:
    path = out / SUMMARY_FILE
    lines = []
    for key, val in summary.items():
        if isinstance(val, (list, tuple, np.ndarray)):
            val = " ".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in val)
        elif isinstance(val, (float, np.floating)):
            val = fmt(val)
        lines.append(f"{key}: {val}")
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# entry point


def _summary(cfg: RunConfig, game, W, traj: Trajectory, res: ExperimentResult) -> dict:
    T = int(cfg.horizon)
    a1, a2, a3 = cfg.exponents()
    s = {
        "game": game.name,
        "players": game.n_players,
        "variant": cfg.variant,
        "tau": cfg.tau,
        "exponents": [a1, a2, a3],
        "horizon": T,
        "runs": int(cfg.runs),
        "seed": int(cfg.seed),
        "horizon_runs_note": (
            f"T and R are not fixed by the benchmark description; defaults are T = {DEFAULT_HORIZON}, "
            f"R = {DEFAULT_RUNS}; this run used T = {T}, R = {int(cfg.runs)}"
        ),
        "comparator": traj.source,
        "trajectory_cached": traj.cached,
        "sigma_m": W.sigma_m,
        "path_variation": path_variation(traj.x_star, T),
        "measured_lambda_star_norm": float(np.nanmax(np.linalg.norm(traj.lambda_star, axis=1)))
        if np.isfinite(traj.lambda_star).any()
        else float("nan"),
        "min_vi_residual": float(np.nanmin(traj.residual)) if np.isfinite(traj.residual).any() else float("nan"),
    }
    if game.name == "cournot":
        closed = np.array([cournot_closed_form_gne(t, game.n_players) for t in range(1, T + 2)])
        s["closed_form_discrepancy"] = float(np.max(np.abs(closed - traj.x_star)))
    s["final_mean_regret_over_t"] = list(res.mean_regret_over_t[-1])
    s["final_regret_stderr"] = list(res.stderr_regret_over_t[-1])
    s["final_mean_violation_over_t"] = float(res.mean_violation_over_t[-1])
    s["final_violation_stderr"] = float(res.stderr_violation_over_t[-1])
    s["assertions_checked"] = sum(r.assertions["checked"] for r in res.records)
    s["assertions_failed"] = sum(r.assertions["failed"] for r in res.records)
    first = next((r.assertions["first_failure"] for r in res.records if r.assertions["first_failure"]), None)
    s["first_assertion_failure"] = first if first else "none"
    counters = {}
    for r in res.records:
        for name, (checked, failed) in r.assertions["summary"].items():
            c0, f0 = counters.get(name, (0, 0))
            counters[name] = (c0 + checked, f0 + failed)
    for name in sorted(counters):
        s[f"assert_{name}"] = f"{counters[name][0]} checked, {counters[name][1]} failed"
    return s


def run_experiment(cfg: RunConfig, write: bool = True) -> ExperimentResult:
    """Validate, solve the comparator, execute ``R`` runs and persist everything.

    Returns an :class:`ExperimentResult` whose ``status`` is 0 on success,
    1 on an invalid config and 2 on an invariant violation in abort mode.
    """
    report = validate(cfg)
    if not report.ok:
        return ExperimentResult(cfg, 1, message=str(report))
    out = Path(cfg.out) if (write and cfg.out) else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    game = build_game(cfg.game)
    W = build_graph(cfg.graph, game.n_players)
    traj = compute_trajectory(cfg, out=out)
    try:
        records = _execute_all(cfg, traj.x_star)
    except InvariantViolation as exc:
        res = ExperimentResult(cfg, 2, trajectory=traj, message=f"invariant violation: {exc}")
        if out is not None:
            (out / SUMMARY_FILE).write_text(f"status: aborted\nreason: {exc}\n")
        return res
    res = ExperimentResult(cfg, 0, trajectory=traj, records=records)
    res.mean_regret_over_t, res.stderr_regret_over_t = monte_carlo_mean([r.metrics.regret_over_t() for r in records])
    res.mean_violation_over_t, res.stderr_violation_over_t = monte_carlo_mean(
        [r.metrics.violation_over_t() for r in records]
    )
    res.summary = _summary(cfg, game, W, traj, res)
    if out is not None:
        for rec in records:
            res.files += _write_run(out, rec, game)
        res.files.append(_write_aggregate(out, res))
        res.files.append(_write_summary(out, res.summary))
    return res


def run_oracle(cfg: RunConfig) -> tuple[int, Trajectory]:
    """Trajectory only; written to ``cfg.out`` when set."""
    report = validate(cfg)
    if not report.ok:
        raise ConfigError(str(report))
    out = Path(cfg.out) if cfg.out else None
    return 0, compute_trajectory(cfg, out=out)
