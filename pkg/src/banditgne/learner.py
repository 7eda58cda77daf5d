"""Round engine for distributed bandit primal-dual mirror descent.

Two variants share one update rule:

- delay-free: at round t every player sees its own cost value and local
  constraint value at the committed profile ``x_t`` and updates from ``z_t``;
- delayed: the values of round ``t - tau`` arrive at round t and the mirror
  step is anchored at ``z_{t-tau}``.

Per round and per player ``i`` (``lt`` is the mixed dual ``sum_j a_ij lam_j``)::

    zt_{t+1}  = argmin_{w in (1-eta_t) X_i} alpha_t <w, (n_i/delta)(f + lt'g) u> + D(w, anchor)
    z_{t+1}   = (1 - alpha_t) anchor + alpha_t zt_{t+1}
    x_{t+1}   = z_{t+1} + delta_{t+1} u_{t+1}
    lam_{t+1} = [lt + gamma_t (g - beta_t lt)]_+

Players update synchronously from a snapshot, so the order in which they are
visited does not change any result.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bregman import Mirror, mirror_step
from .errors import BufferUnderflow, DimensionMismatch, InvariantViolation
from .estimator import combined_direction, sample_sphere
from .games import GameSpec
from .graph import WeightMatrix, mix_duals
from .schedules import ConsensusEnvelope, Schedule

TOL = 1e-9


@dataclass(frozen=True)
class Snapshot:
    """What one player committed and observed in one round."""

    t: int
    z: np.ndarray
    x: np.ndarray
    u: np.ndarray
    delta: float
    f_value: float
    g_values: np.ndarray


class DelayBuffer:
    """Ring buffer of the last ``tau + 1`` snapshots with an access log."""

    def __init__(self, tau: int):
        self.tau = tau
        self._items: deque[Snapshot] = deque(maxlen=tau + 1)
        self.access_log: list[tuple[int, int]] = []

    def push(self, snap: Snapshot) -> None:
        self._items.append(snap)

    def get(self, round_index: int, reader_round: int) -> Snapshot:
        for snap in self._items:
            if snap.t == round_index:
                self.access_log.append((reader_round, round_index))
                return snap
        raise BufferUnderflow(f"round {round_index} not in buffer at round {reader_round}")

    def __len__(self):
        return len(self._items)


@dataclass
class PlayerState:
    z: np.ndarray
    z_tilde: np.ndarray
    x: np.ndarray
    u: np.ndarray
    delta: float
    lam: np.ndarray
    rng: object
    history: DelayBuffer


@dataclass
class RoundTrace:
    t: int
    x: np.ndarray  # flat joint profile
    z: np.ndarray  # flat
    lam: np.ndarray  # (N, m), before the update
    lam_tilde: np.ndarray  # (N, m)
    f_values: np.ndarray  # (N,)
    g_values: np.ndarray  # (N, m)
    consensus_err: np.ndarray  # (N,)


class BanditFeedback:
    """Values-only view of a game: the learner's single point of contact.

    Only committed profiles are ever evaluated; every evaluation is logged.
    """

    def __init__(self, game: GameSpec, keep_points: bool = False):
        self._game = game
        self.keep_points = keep_points
        self.calls: list[tuple[int, np.ndarray]] = []
        self.n_calls = 0

    def reveal(self, t: int, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        self.n_calls += 1
        if self.keep_points:
            self.calls.append((t, x.copy()))
        return self._game.costs(t, x), self._game.constraints(t, x)


class Monitor:
    """Counts runtime bound checks; raises on failure in ``abort`` mode."""

    def __init__(self, mode: str = "abort"):
        if mode not in ("abort", "record"):
            raise ValueError("mode must be 'abort' or 'record'")
        self.mode = mode
        self.checked: dict[str, int] = {}
        self.failed: dict[str, int] = {}
        self.first_failure: dict[str, str] = {}

    def check(self, name: str, ok, detail=None) -> None:
        """Record one check, or one per entry when ``ok`` is a boolean array.

        ``detail`` is a callable producing the message, evaluated only on
        failure; it receives the index of the first failing entry.
        """
        ok = np.atleast_1d(np.asarray(ok, dtype=bool))
        self.checked[name] = self.checked.get(name, 0) + ok.size
        if ok.all():
            return
        bad = np.flatnonzero(~ok)
        self.failed[name] = self.failed.get(name, 0) + bad.size
        msg = detail(int(bad[0])) if detail is not None else ""
        self.first_failure.setdefault(name, msg)
        if self.mode == "abort":
            raise InvariantViolation(f"{name}: {msg}")

    @property
    def total_failures(self) -> int:
        return sum(self.failed.values())

    def summary(self) -> dict[str, tuple[int, int]]:
        return {k: (v, self.failed.get(k, 0)) for k, v in sorted(self.checked.items())}


def _within(value, bound):
    return value <= bound + TOL * (1.0 + np.abs(bound))


@dataclass
class Run:
    """Mutable state of one run of either variant."""

    game: GameSpec
    W: WeightMatrix
    sched: Schedule
    mirror: Mirror
    players: list[PlayerState]
    feedback: BanditFeedback
    monitor: Monitor
    envelope: ConsensusEnvelope
    t: int = 1
    traces: list[RoundTrace] = field(default_factory=list)

    @property
    def tau(self) -> int:
        return self.sched.tau if self.sched.variant == "delayed" else 0


def init_run(
    game: GameSpec,
    W: WeightMatrix,
    sched: Schedule,
    rngs: Sequence,
    mirror: Mirror | None = None,
    mode: str = "abort",
    keep_points: bool = False,
) -> Run:
    """Initial states: ``z_1`` uniform in the shrunk set, ``lam_1 = 0``, ``x_1 = z_1 + delta_1 u_1``.

    ``rngs`` holds one random stream per player.
    """
    if W.n_players != game.n_players or len(rngs) != game.n_players:
        raise DimensionMismatch("game, weight matrix and random streams disagree on N")
    p1 = sched.value_at(1)
    tau = sched.tau if sched.variant == "delayed" else 0
    players = []
    for S, rng in zip(game.sets, rngs):
        z = S.shrink(p1.eta).sample(rng)
        u = sample_sphere(S.dim, rng)
        players.append(
            PlayerState(
                z=z,
                z_tilde=z.copy(),
                x=z + p1.delta * u,
                u=u,
                delta=p1.delta,
                lam=np.zeros(game.m),
                rng=rng,
                history=DelayBuffer(tau),
            )
        )
    return Run(
        game,
        W,
        sched,
        mirror or Mirror.euclidean(),
        players,
        BanditFeedback(game, keep_points),
        Monitor(mode),
        ConsensusEnvelope(sched, W.sigma_m, game.n_players, game.B_g),
    )


def _commit(run: Run, t: int):
    """Reveal round-t values at the committed profile and record snapshots."""
    game = run.game
    x_t = game.join([p.x for p in run.players])
    f_vals, g_vals = run.feedback.reveal(t, x_t)
    for i, p in enumerate(run.players):
        p.history.push(Snapshot(t, p.z, p.x, p.u, p.delta, float(f_vals[i]), g_vals[i]))
    return x_t, f_vals, g_vals


def _check_round(run: Run, t: int, lam, lam_tilde, cons_err, params, shrunk) -> None:
    mon, game = run.monitor, run.game
    bound = game.B_g / params.beta
    env = run.envelope.advance()
    nl = np.linalg.norm(lam, axis=1)
    nlt = np.linalg.norm(lam_tilde, axis=1)
    mon.check("dual_nonneg", np.all(lam >= 0, axis=1), lambda i: f"t={t} i={i} lam={lam[i]}")
    mon.check("dual_bound", _within(nl, bound), lambda i: f"t={t} i={i} |lam|={nl[i]:.6g} > {bound:.6g}")
    mon.check(
        "mixed_dual_bound", _within(nlt, bound), lambda i: f"t={t} i={i} |lam~|={nlt[i]:.6g} > {bound:.6g}"
    )
    mon.check("consensus", _within(cons_err, env), lambda i: f"t={t} i={i} err={cons_err[i]:.6g} > {env:.6g}")
    x_gap = np.array([S.distance(p.x) for S, p in zip(game.sets, run.players)])
    z_gap = np.array([Ss.distance(p.z) for Ss, p in zip(shrunk, run.players)])
    mon.check("feasibility", x_gap <= TOL, lambda i: f"t={t} i={i} x={run.players[i].x}")
    mon.check("shrunk", z_gap <= TOL, lambda i: f"t={t} i={i} z={run.players[i].z}")


def _shrunk_sets(game: GameSpec, eta: float) -> list:
    cache: dict[int, object] = {}
    out = []
    for S in game.sets:
        key = id(S)
        if key not in cache:
            cache[key] = S.shrink(eta)
        out.append(cache[key])
    return out


def _update_player(run: Run, i: int, p: PlayerState, anchor: Snapshot, lam_tilde_i, params, next_params, S_shrunk):
    """One player's primal-dual update from a snapshot of delayed (or current) data."""
    n_i = S_shrunk.dim
    direction = combined_direction(anchor.f_value, anchor.g_values, lam_tilde_i, n_i, anchor.delta, anchor.u)
    est_norm = n_i * abs(anchor.f_value) / anchor.delta
    run.monitor.check(
        "estimator_norm",
        _within(est_norm, n_i * run.game.B_f / anchor.delta),
        lambda _: f"t={run.t} i={i} norm={est_norm:.6g}",
    )
    z_tilde = mirror_step(run.mirror, S_shrunk, anchor.z, direction, params.alpha)
    z_new = (1.0 - params.alpha) * anchor.z + params.alpha * z_tilde
    u_new = sample_sphere(n_i, p.rng)
    x_new = z_new + next_params.delta * u_new
    lam_new = np.maximum(lam_tilde_i + params.gamma * (anchor.g_values - params.beta * lam_tilde_i), 0.0)
    return PlayerState(z_new, z_tilde, x_new, u_new, next_params.delta, lam_new, p.rng, p.history)


def _round(run: Run, order: Sequence[int] | None, delayed: bool) -> RoundTrace:
    t = run.t
    tau = run.tau if delayed else 0
    game, N = run.game, run.game.n_players
    params, next_params = run.sched.value_at(t), run.sched.value_at(t + 1)

    x_t, f_vals, g_vals = _commit(run, t)
    lam = np.array([p.lam for p in run.players])
    lam_tilde = mix_duals(run.W, lam)
    cons_err = np.linalg.norm(lam_tilde - lam.mean(axis=0), axis=1)
    shrunk = _shrunk_sets(game, params.eta)
    _check_round(run, t, lam, lam_tilde, cons_err, params, shrunk)
    trace = RoundTrace(t, x_t, game.join([p.z for p in run.players]), lam, lam_tilde, f_vals, g_vals, cons_err)

    new_states: list[PlayerState | None] = [None] * N
    for i in order if order is not None else range(N):
        p = run.players[i]
        if delayed and t <= tau:
            # warm-up: hold z and lam, keep playing perturbed points
            u_new = sample_sphere(game.sets[i].dim, p.rng)
            new_states[i] = PlayerState(
                p.z, p.z_tilde, p.z + next_params.delta * u_new, u_new, next_params.delta, p.lam, p.rng, p.history
            )
            continue
        anchor = p.history.get(t - tau, t)
        new_states[i] = _update_player(run, i, p, anchor, lam_tilde[i], params, next_params, shrunk[i])
    run.players = new_states
    run.traces.append(trace)
    run.t += 1
    return trace


def step_algorithm1(run: Run, order: Sequence[int] | None = None) -> RoundTrace:
    """One delay-free round at ``run.t``."""
    return _round(run, order, delayed=False)


def step_algorithm2(run: Run, order: Sequence[int] | None = None) -> RoundTrace:
    """One delayed round at ``run.t > tau``, driven by the feedback of round ``t - tau``."""
    if run.t <= run.tau:
        raise BufferUnderflow(f"round {run.t} precedes the first delayed update at t = {run.tau + 1}")
    return _round(run, order, delayed=True)


def warmup_step(run: Run, order: Sequence[int] | None = None) -> RoundTrace:
    """Held round ``t <= tau`` of the delayed variant: commit and record, no update."""
    if run.t > run.tau:
        raise ValueError("warm-up only covers rounds t <= tau")
    return _round(run, order, delayed=True)


def run(
    game: GameSpec,
    W: WeightMatrix,
    sched: Schedule,
    horizon: int,
    rngs: Sequence,
    mirror: Mirror | None = None,
    mode: str = "abort",
    order: Sequence[int] | None = None,
    keep_points: bool = False,
) -> Run:
    """Initialise and execute ``horizon`` rounds of the schedule's variant."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    state = init_run(game, W, sched, rngs, mirror, mode, keep_points)
    delayed = sched.variant == "delayed"
    for _ in range(horizon):
        if delayed and state.t <= state.tau:
            warmup_step(state, order)
        elif delayed:
            step_algorithm2(state, order)
        else:
            step_algorithm1(state, order)
    return state
