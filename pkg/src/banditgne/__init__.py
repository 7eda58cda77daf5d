"""Distributed bandit primal-dual mirror descent for online generalized Nash games.

Players learn from one-point value feedback on their own cost and local
constraint, exchange dual variables over a doubly stochastic weight matrix,
and are scored by dynamic regret against the time-varying variational GNE
plus the accumulated coupled-constraint violation.
"""

from .bregman import Mirror, divergence, mirror_step
from .config import PRESETS, RunConfig, load_config, preset_config, validate_config
from .errors import BanditGNEError, InvariantViolation
from .estimator import combined_direction, sample_sphere, smoothed_value
from .experiment import ExperimentResult, run_experiment
from .games import GameSpec, affine_quadratic_game, cournot_closed_form_gne, cournot_game, quadratic_test_game
from .graph import WeightMatrix, build_weight_matrix, mix_duals, topology_edges
from .learner import Run, init_run, run, step_algorithm1, step_algorithm2
from .metrics import constraint_violation, dynamic_regret, metric_series, monte_carlo_mean, path_variation
from .oracle import GneSolution, gne_trajectory, solve_gne
from .rng import player_streams
from .schedules import Schedule, corollary2_exponents, schedule_conditions
from .sets import StrategySet

__version__ = "0.1.0"

__all__ = [
    "BanditGNEError",
    "ExperimentResult",
    "GameSpec",
    "GneSolution",
    "InvariantViolation",
    "Mirror",
    "PRESETS",
    "Run",
    "RunConfig",
    "Schedule",
    "StrategySet",
    "WeightMatrix",
    "affine_quadratic_game",
    "build_weight_matrix",
    "combined_direction",
    "constraint_violation",
    "corollary2_exponents",
    "cournot_closed_form_gne",
    "cournot_game",
    "divergence",
    "dynamic_regret",
    "gne_trajectory",
    "init_run",
    "load_config",
    "metric_series",
    "mirror_step",
    "mix_duals",
    "monte_carlo_mean",
    "path_variation",
    "player_streams",
    "preset_config",
    "quadratic_test_game",
    "run",
    "run_experiment",
    "sample_sphere",
    "schedule_conditions",
    "smoothed_value",
    "solve_gne",
    "step_algorithm1",
    "step_algorithm2",
    "topology_edges",
    "validate_config",
]
