"""Experiment configuration: schema, presets and validation.

Configs are YAML documents with the sections ``game``, ``graph`` and
``schedule`` plus top-level run settings::

    game:
      kind: cournot            # cournot | quadratic | scripted
    graph:
      kind: ring               # complete | ring | star | edges | explicit
    schedule:
      a1: 0.45
      a2: 0.1
      a3: 0.11
      variant: delay_free      # delay_free | delayed
      tau: 0
      # preset: corollary2     # replaces a1, a2, a3 with (3/7, 0, 1/7)
    horizon: 5000
    runs: 10
    seed: 42
    out: results/figure1
    oracle_tol: 1.0e-10
    assertion_mode: abort      # abort | record
    comparator: oracle         # oracle | closed_form (cournot only)
    workers: 1
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, InvalidExponents
from .games import GameSpec, TimeCoefficient, affine_quadratic_game, cournot_game, quadratic_test_game
from .graph import WeightMatrix, build_weight_matrix, topology_edges
from .schedules import Schedule, corollary2_exponents, schedule_conditions
from .sets import set_from_config

PAPER_EXPONENTS = {"a1": 0.45, "a2": 0.1, "a3": 0.11}
DEFAULT_HORIZON = 5000
DEFAULT_RUNS = 10

_BASE = {
    "game": {"kind": "cournot"},
    "graph": {"kind": "ring"},
    "schedule": dict(PAPER_EXPONENTS, variant="delay_free", tau=0),
    "horizon": DEFAULT_HORIZON,
    "runs": DEFAULT_RUNS,
    "seed": 42,
    "oracle_tol": 1e-10,
    "assertion_mode": "abort",
    "comparator": "oracle",
    "workers": 1,
}


def _preset(**overrides) -> dict:
    cfg = copy.deepcopy(_BASE)
    for key, val in overrides.items():
        if isinstance(val, dict):
            cfg[key].update(val)
        else:
            cfg[key] = val
    return cfg


# figure1/figure2 and figure3/figure4 share runs; the pairs differ in the
# quantity they report (regret vs violation)
PRESETS = {
    "figure1": _preset(),
    "figure2": _preset(),
    "figure3": _preset(schedule={"variant": "delayed", "tau": 1}),
    "figure4": _preset(schedule={"variant": "delayed", "tau": 1}),
    "corollary2": _preset(schedule={"preset": "corollary2"}),
}

PRESET_NOTES = {
    "figure1": "Cournot, delay-free, exponents (0.45, 0.1, 0.11); per-player Reg_i(t)/t",
    "figure2": "Cournot, delay-free, exponents (0.45, 0.1, 0.11); R_g(t)/t",
    "figure3": "Cournot, delayed tau = 1, exponents (0.45, 0.1, 0.11); per-player Reg_i(t)/t",
    "figure4": "Cournot, delayed tau = 1, exponents (0.45, 0.1, 0.11); R_g(t)/t",
    "corollary2": "Cournot, delay-free, balanced exponents (3/7, 0, 1/7)",
}


@dataclass
class RunConfig:
    game: dict
    graph: dict
    schedule: dict
    horizon: int = DEFAULT_HORIZON
    runs: int = DEFAULT_RUNS
    seed: int = 42
    out: str | None = None
    oracle_tol: float = 1e-10
    assertion_mode: str = "abort"
    comparator: str = "oracle"
    workers: int = 1
    preset: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "game": self.game,
            "graph": self.graph,
            "schedule": self.schedule,
            "horizon": self.horizon,
            "runs": self.runs,
            "seed": self.seed,
            "out": self.out,
            "oracle_tol": self.oracle_tol,
            "assertion_mode": self.assertion_mode,
            "comparator": self.comparator,
            "workers": self.workers,
        }
        if self.preset:
            d["preset"] = self.preset
        return d

    def exponents(self) -> tuple[float, float, float]:
        if self.schedule.get("preset") == "corollary2":
            return corollary2_exponents()
        return float(self.schedule["a1"]), float(self.schedule["a2"]), float(self.schedule["a3"])

    @property
    def variant(self) -> str:
        return self.schedule.get("variant", "delay_free")

    @property
    def tau(self) -> int:
        return int(self.schedule.get("tau", 0)) if self.variant == "delayed" else 0


def config_from_dict(data: dict, preset: str | None = None) -> RunConfig:
    base = copy.deepcopy(PRESETS[preset]) if preset else copy.deepcopy(_BASE)
    for key, val in (data or {}).items():
        if key == "preset":
            continue
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            base[key].update(val)
        else:
            base[key] = val
    known = set(RunConfig.__dataclass_fields__) - {"extra", "preset"}
    extra = {k: v for k, v in base.items() if k not in known}
    kwargs = {k: v for k, v in base.items() if k in known}
    return RunConfig(**kwargs, preset=preset, extra=extra)


def preset_config(name: str, **overrides) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    cfg = config_from_dict({}, preset=name)
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    return cfg


def load_config(path: str | Path, preset: str | None = None) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        line = text.splitlines()[mark.line] if mark is not None and mark.line < len(text.splitlines()) else ""
        raise ConfigError(f"cannot parse {path}{where}: {getattr(exc, 'problem', exc)}\n    {line}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    preset = data.get("preset", preset)
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}")
    return config_from_dict(data, preset)


# ---------------------------------------------------------------------------
# builders


def build_game(spec: dict) -> GameSpec:
    kind = spec.get("kind", "cournot")
    if kind == "cournot":
        return cournot_game(int(spec.get("n_players", 20)))
    if kind == "quadratic":
        return quadratic_test_game(
            int(spec.get("n_players", 2)),
            int(spec.get("dims", 1)),
            float(spec.get("coupling", 0.0)),
            float(spec.get("strength", 1e-12)),
            centers=spec.get("centers"),
            drift=float(spec.get("drift", 0.0)),
            period=float(spec.get("period", 12.0)),
            lower=float(spec.get("lower", -5.0)),
            upper=float(spec.get("upper", 5.0)),
            budget=spec.get("budget"),
        )
    if kind == "scripted":
        return _scripted_game(spec)
    raise ConfigError(f"unknown game kind {kind!r}")


def _scripted_game(spec: dict) -> GameSpec:
    """Affine-quadratic game from coefficient tables.

    ``players`` lists, per player, ``set``, ``Q`` (n_i x n_i), ``q`` (time
    coefficient), ``A`` (m x n_i) and ``b`` (time coefficient). ``coupling``
    maps ``"i,j"`` to the ``n_i x n_j`` block ``C_ij``.
    """
    players = spec.get("players")
    if not players:
        raise ConfigError("scripted game needs a non-empty 'players' list")
    sets = [set_from_config(p["set"]) for p in players]
    Q = [np.asarray(p["Q"], dtype=float) for p in players]
    q = [TimeCoefficient.from_config(p.get("q", 0.0)) for p in players]
    A = [np.asarray(p["A"], dtype=float) for p in players]
    b = [TimeCoefficient.from_config(p.get("b", 0.0)) for p in players]
    C = {}
    for key, block in (spec.get("coupling") or {}).items():
        i, j = (int(v) for v in str(key).split(","))
        C[(i, j)] = np.asarray(block, dtype=float)
    return affine_quadratic_game(
        sets,
        Q,
        C,
        q,
        A,
        b,
        name="scripted",
        horizon=int(spec.get("bound_horizon", 10_000)),
        strength=float(spec.get("strength", 0.0)),
    )


def build_graph(spec: dict, n_players: int) -> WeightMatrix:
    kind = spec.get("kind", "ring")
    rule = spec.get("rule", "metropolis")
    if kind == "explicit":
        return build_weight_matrix(None, n_players, "explicit", weights=spec["weights"])
    if kind == "edges":
        return build_weight_matrix(spec["edges"], n_players, rule)
    if kind == "complete" and rule == "uniform-complete":
        return build_weight_matrix(None, n_players, "uniform-complete")
    return build_weight_matrix(topology_edges(kind, n_players), n_players, rule)


def build_schedule(cfg: RunConfig, game: GameSpec) -> Schedule:
    a1, a2, a3 = cfg.exponents()
    r_min = min(S.inner_radius for S in game.sets)
    return Schedule(a1, a2, a3, r_min, cfg.tau, cfg.variant)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    ok: bool
    errors: list[str]
    notes: list[str]

    def __str__(self) -> str:
        lines = ["config OK" if self.ok else "config INVALID"]
        lines += [f"  error: {e}" for e in self.errors]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def validate(cfg: RunConfig) -> ValidationReport:
    """Schema and schedule checks; never runs anything."""
    errors: list[str] = []
    notes: list[str] = []
    if int(cfg.horizon) < 1:
        errors.append("horizon T >= 1")
    if int(cfg.runs) < 1:
        errors.append("runs R >= 1")
    if cfg.assertion_mode not in ("abort", "record"):
        errors.append("assertion_mode must be 'abort' or 'record'")
    if cfg.comparator not in ("oracle", "closed_form"):
        errors.append("comparator must be 'oracle' or 'closed_form'")
    if cfg.comparator == "closed_form" and cfg.game.get("kind") != "cournot":
        errors.append("closed_form comparator exists only for the cournot game")
    if cfg.variant not in ("delay_free", "delayed"):
        errors.append(f"unknown schedule variant {cfg.variant!r}")
    elif cfg.variant == "delayed" and int(cfg.schedule.get("tau", 0)) < 1:
        errors.append("tau >= 1 required when variant = delayed")
    try:
        a1, a2, a3 = cfg.exponents()
    except (KeyError, TypeError, ValueError) as exc:
        errors.append(f"schedule exponents missing or malformed: {exc}")
    else:
        if cfg.variant in ("delay_free", "delayed"):
            errors += schedule_conditions(a1, a2, a3, cfg.variant)
        notes.append(f"exponents (a1, a2, a3) = ({a1:.6g}, {a2:.6g}, {a3:.6g})")
        if cfg.schedule.get("preset") == "corollary2":
            notes.append("corollary2 preset: (3/7, 0, 1/7)")
    try:
        game = build_game(cfg.game)
        W = build_graph(cfg.graph, game.n_players)
        notes.append(f"game {game.name}: N = {game.n_players}, n = {game.n}, m = {game.m}")
        notes.append(f"sigma_m = {W.sigma_m:.6g}")
        if not errors:
            build_schedule(cfg, game)
    except InvalidExponents as exc:
        errors.append(str(exc))
    except Exception as exc:  # report, never raise
        errors.append(f"{type(exc).__name__}: {exc}")
    return ValidationReport(not errors, errors, notes)


def validate_config(path: str | Path) -> ValidationReport:
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        return ValidationReport(False, [str(exc)], [])
    return validate(cfg)
