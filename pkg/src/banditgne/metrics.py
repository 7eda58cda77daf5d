"""Dynamic regret, constraint violation, path variation and Monte Carlo means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch
from .games import GameSpec


@dataclass
class MetricSeries:
    """Per-round cumulative metrics of one run (row k is round k + 1)."""

    regret: np.ndarray  # (T, N) cumulative Reg_i(t)
    violation: np.ndarray  # (T,) R_g(t)
    path_variation: np.ndarray  # (T,) partial sums of ||x*_{t+1} - x*_t||
    consensus_err: np.ndarray  # (T, N)
    run_id: int = 0
    seed: int = 0

    @property
    def horizon(self) -> int:
        return self.violation.shape[0]

    def regret_over_t(self) -> np.ndarray:
        return self.regret / np.arange(1, self.horizon + 1)[:, None]

    def violation_over_t(self) -> np.ndarray:
        return self.violation / np.arange(1, self.horizon + 1)


def _as_matrix(rows, name: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2:
        raise LengthMismatch(f"{name} must be a (T, n) array of profiles")
    return arr


def instantaneous_regret(game: GameSpec, plays, x_star, i: int, rounds=None) -> np.ndarray:
    """``f_{i,t}(x_{i,t}, x*_{-i,t}) - f_{i,t}(x*_t)`` for every round."""
    X = _as_matrix(plays, "plays")
    XS = _as_matrix(x_star, "equilibria")
    if X.shape[0] != XS.shape[0]:
        raise LengthMismatch(f"{X.shape[0]} plays but {XS.shape[0]} equilibria")
    rounds = np.arange(1, X.shape[0] + 1) if rounds is None else rounds
    out = np.empty(X.shape[0])
    for k, t in enumerate(rounds):
        t = int(t)
        mixed = game.with_block(XS[k], i, game.block(X[k], i))
        out[k] = game.cost(i, t, mixed) - game.cost(i, t, XS[k])
    return out


def dynamic_regret(game: GameSpec, plays, x_star, i: int) -> np.ndarray:
    """Cumulative ``Reg_i(t)`` for ``t = 1..T``, comparing against the mixed profile."""
    return np.cumsum(instantaneous_regret(game, plays, x_star, i))


def regret_all(game: GameSpec, plays, x_star) -> np.ndarray:
    """``(T, N)`` cumulative regrets of every player."""
    X = _as_matrix(plays, "plays")
    XS = _as_matrix(x_star, "equilibria")
    if X.shape[0] != XS.shape[0]:
        raise LengthMismatch(f"{X.shape[0]} plays but {XS.shape[0]} equilibria")
    T, N = X.shape[0], game.n_players
    inst = np.empty((T, N))
    for k in range(T):
        t = k + 1
        base = game.costs(t, XS[k])
        for i in range(N):
            mixed = game.with_block(XS[k], i, game.block(X[k], i))
            inst[k, i] = game.cost(i, t, mixed) - base[i]
    return np.cumsum(inst, axis=0)


def coupled_values(game: GameSpec, plays) -> np.ndarray:
    """``(T, m)`` array of ``g_t(x_t) = sum_i g_{i,t}(x_{i,t})``."""
    X = _as_matrix(plays, "plays")
    return np.array([game.coupled(k + 1, X[k]) for k in range(X.shape[0])])


def constraint_violation_series(g_sums) -> np.ndarray:
    """``R_g(t) = || [sum_{s<=t} g_s(x_s)]_+ ||`` for every prefix, from per-round coupled values."""
    G = np.asarray(g_sums, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    return np.linalg.norm(np.maximum(np.cumsum(G, axis=0), 0.0), axis=1)


def constraint_violation(g_sums, T: int | None = None) -> float:
    """``R_g(T)`` from the per-round coupled constraint values of rounds ``1..T``."""
    G = np.asarray(g_sums, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    T = G.shape[0] if T is None else T
    if T > G.shape[0]:
        raise LengthMismatch(f"trace has {G.shape[0]} rounds, asked for {T}")
    return float(np.linalg.norm(np.maximum(G[:T].sum(axis=0), 0.0)))


def path_variation_series(x_star) -> np.ndarray:
    """Partial sums ``sum_{s<=t} ||x*_{s+1} - x*_s||``; length is one less than the input."""
    XS = _as_matrix(x_star, "equilibria")
    return np.cumsum(np.linalg.norm(np.diff(XS, axis=0), axis=1))


def path_variation(x_star, T: int | None = None) -> float:
    XS = _as_matrix(x_star, "equilibria")
    T = XS.shape[0] - 1 if T is None else T
    if XS.shape[0] < T + 1:
        raise LengthMismatch(f"path variation over {T} rounds needs {T + 1} equilibria, got {XS.shape[0]}")
    if T == 0:
        return 0.0
    return float(path_variation_series(XS[: T + 1])[-1])


def metric_series(game: GameSpec, traces, x_star, run_id: int = 0, seed: int = 0) -> MetricSeries:
    """All per-round metrics of one run; ``x_star`` needs at least ``T + 1`` rows."""
    T = len(traces)
    XS = _as_matrix(x_star, "equilibria")
    if XS.shape[0] < T + 1:
        raise LengthMismatch(f"{T} rounds need {T + 1} equilibria, got {XS.shape[0]}")
    X = np.array([tr.x for tr in traces])
    G = np.array([tr.g_values.sum(axis=0) for tr in traces])
    return MetricSeries(
        regret=regret_all(game, X, XS[:T]),
        violation=constraint_violation_series(G),
        path_variation=path_variation_series(XS[: T + 1]),
        consensus_err=np.array([tr.consensus_err for tr in traces]),
        run_id=run_id,
        seed=seed,
    )


def monte_carlo_mean(series) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise mean and standard error across runs.

    The standard error is NaN (not applicable) when only one run is given.
    """
    arrs = [np.asarray(s, dtype=float) for s in series]
    if not arrs:
        raise LengthMismatch("need at least one run")
    if any(a.shape != arrs[0].shape for a in arrs):
        raise LengthMismatch("runs differ in length")
    stack = np.stack(arrs)
    mean = stack.mean(axis=0)
    if stack.shape[0] == 1:
        return mean, np.full_like(mean, np.nan)
    return mean, stack.std(axis=0, ddof=1) / np.sqrt(stack.shape[0])


def windowed_decreasing(series, start: int, stop: int, window: int) -> bool:
    """Means over consecutive windows of ``series[start:stop]`` never increase."""
    seg = np.asarray(series, dtype=float)[start:stop]
    k = seg.shape[0] // window
    means = seg[: k * window].reshape(k, window).mean(axis=1)
    return bool(np.all(np.diff(means) <= 0))
