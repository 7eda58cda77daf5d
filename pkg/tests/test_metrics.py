import numpy as np
import pytest

from banditgne.errors import LengthMismatch
from banditgne.games import TimeCoefficient, affine_quadratic_game, cournot_closed_form_gne, cournot_game
from banditgne.graph import build_weight_matrix, topology_edges
from banditgne.learner import run
from banditgne.metrics import (
    constraint_violation,
    constraint_violation_series,
    dynamic_regret,
    metric_series,
    monte_carlo_mean,
    path_variation,
    path_variation_series,
    regret_all,
    windowed_decreasing,
)
from banditgne.rng import player_streams
from banditgne.schedules import Schedule, consensus_envelope


def test_regret_single_round_example():
    # f = (x - 1)^2 up to a constant
    game = affine_quadratic_game(
        [__import__("banditgne").StrategySet.box([-2.0], [2.0])],
        [[[2.0]]], None, [TimeCoefficient(-2.0)], [[[0.0]]], [TimeCoefficient(0.0)],
    )
    assert dynamic_regret(game, [[0.0]], [[1.0]], 0)[-1] == pytest.approx(1.0)


def test_regret_on_equilibrium_is_zero(rng):
    game = cournot_game()
    xs = np.array([cournot_closed_form_gne(t) for t in range(1, 101)])
    np.testing.assert_allclose(regret_all(game, xs, xs), 0.0, atol=1e-9)


def test_violation_examples():
    assert constraint_violation(np.array([[-1.0], [-2.0]])) == 0.0
    assert constraint_violation(np.array([[1.0], [-3.0]]), 2) == 0.0
    assert constraint_violation(np.array([[1.0, -1.0], [2.0, 3.0]])) == pytest.approx(np.sqrt(13))
    series = constraint_violation_series(np.array([[1.0, -1.0], [2.0, 3.0]]))
    np.testing.assert_allclose(series, [1.0, np.sqrt(13)])
    with pytest.raises(LengthMismatch):
        constraint_violation(np.zeros((2, 1)), 3)


def test_path_variation_examples():
    assert path_variation(np.zeros((5, 2))) == 0.0
    assert path_variation(np.array([[0.0, 0.0], [3.0, 4.0]])) == 5.0
    assert path_variation(np.zeros((1, 2)), 0) == 0.0


def test_closed_form_path_settles_to_a_rate():
    # the comparator is periodic, so its variation per round converges to a
    # positive constant instead of vanishing
    xs = np.array([cournot_closed_form_gne(t) for t in range(1, 4002)])
    series = path_variation_series(xs)
    assert np.all(np.diff(series) >= 0)
    per_round = series / np.arange(1, 4001)
    period = int(round(24 * np.pi))
    late = per_round[3000:]
    assert late.max() - late.min() < 0.05 * late.mean()
    assert series[2 * period] - series[period] == pytest.approx(series[3 * period] - series[2 * period], rel=0.05)


def test_monte_carlo_mean_edge_cases():
    a = np.arange(5.0)
    mean, se = monte_carlo_mean([a])
    np.testing.assert_array_equal(mean, a)
    assert np.all(np.isnan(se))
    mean, se = monte_carlo_mean([a, a])
    np.testing.assert_array_equal(se, 0.0)
    with pytest.raises(LengthMismatch):
        monte_carlo_mean([a, a[:3]])


def test_windowed_decreasing():
    assert windowed_decreasing(1 / np.arange(1, 101), 10, 100, 10)
    assert not windowed_decreasing(np.arange(100.0), 10, 100, 10)


def _cournot_runs(T, R, seed=5):
    game = cournot_game()
    W = build_weight_matrix(topology_edges("ring", 20), 20)
    sched = Schedule(0.45, 0.1, 0.11, r_min=15.0)
    return game, W, sched, [run(game, W, sched, T, player_streams(seed, k, 20)) for k in range(R)]


def test_regret_recomputed_independently():
    game, _, _, (state,) = _cournot_runs(50, 1)
    xs = np.array([cournot_closed_form_gne(t) for t in range(1, 52)])
    m = metric_series(game, state.traces, xs)
    labels = np.arange(1, 21)
    for tr in state.traces:
        t, x, xst = tr.t, tr.x, xs[tr.t - 1]
        s = np.sin(t / 12)
        for i in range(20):
            mixed = xst.copy()
            mixed[i] = x[i]
            f_mixed = mixed[i] * (s + 1) - (21 + labels[i] / 9 - 0.5 * labels[i] * s - mixed.sum())
            f_star = xst[i] * (s + 1) - (21 + labels[i] / 9 - 0.5 * labels[i] * s - xst.sum())
            tr_reg = f_mixed - f_star
            prev = m.regret[t - 2, i] if t > 1 else 0.0
            assert m.regret[t - 1, i] - prev == pytest.approx(tr_reg, abs=1e-9)


def test_mean_of_ten_runs_and_offline_envelope():
    game, W, sched, states = _cournot_runs(40, 10)
    xs = np.zeros((41, 20))
    series = [metric_series(game, s.traces, xs, run_id=k) for k, s in enumerate(states)]
    mean, _ = monte_carlo_mean([m.regret_over_t() for m in series])
    by_hand = sum(m.regret for m in series) / 10 / np.arange(1, 41)[:, None]
    np.testing.assert_allclose(mean, by_hand, rtol=1e-12, atol=1e-12)
    for m in series:
        for t in range(1, 41):
            env = consensus_envelope(sched, t, W.sigma_m, 20, game.B_g)
            assert np.all(m.consensus_err[t - 1] <= env)
