import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banditgne.errors import DisconnectedGraph, EmptyGraph, NonStochastic
from banditgne.graph import build_weight_matrix, mix_duals, topology_edges


def test_complete_two_uniform():
    W = build_weight_matrix(None, 2, "uniform-complete")
    np.testing.assert_array_equal(W.weights, [[0.5, 0.5], [0.5, 0.5]])
    assert W.sigma_m == pytest.approx(0.0, abs=1e-15)


def test_explicit_two_player_gap():
    W = build_weight_matrix(None, 2, "explicit", weights=[[0.8, 0.2], [0.2, 0.8]])
    assert W.sigma_m == pytest.approx(0.6, abs=1e-12)


def test_four_cycle_thirds():
    w = np.full((4, 4), 1 / 3)
    w[0, 2] = w[2, 0] = w[1, 3] = w[3, 1] = 0.0
    W = build_weight_matrix(None, 4, "explicit", weights=w)
    assert W.sigma_m == pytest.approx(1 / 3, abs=1e-12)


def test_metropolis_ring_properties():
    W = build_weight_matrix(topology_edges("ring", 20), 20)
    A = W.weights
    np.testing.assert_allclose(A, A.T, atol=0)
    np.testing.assert_allclose(A.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(np.diag(A) > 0)
    assert 0 <= W.sigma_m < 1
    # metropolis on a ring: every neighbor gets 1/3
    assert A[0, 1] == pytest.approx(1 / 3)


def test_rejects_bad_graphs():
    with pytest.raises(DisconnectedGraph):
        build_weight_matrix([(0, 1), (2, 3)], 4)
    with pytest.raises(EmptyGraph):
        build_weight_matrix([], 0)
    with pytest.raises(NonStochastic):
        build_weight_matrix(None, 2, "explicit", weights=[[0.7, 0.2], [0.2, 0.8]])
    with pytest.raises(NonStochastic):
        build_weight_matrix(None, 2, "explicit", weights=[[0.9, 0.1], [0.2, 0.8]])
    with pytest.raises(DisconnectedGraph):
        build_weight_matrix(None, 2, "explicit", weights=np.eye(2))


def test_mix_examples():
    W = build_weight_matrix(None, 2, "explicit", weights=[[0.8, 0.2], [0.2, 0.8]])
    np.testing.assert_allclose(mix_duals(W, [[1, 0], [0, 1]]), [[0.8, 0.2], [0.2, 0.8]], atol=1e-15)
    np.testing.assert_array_equal(mix_duals(W, np.zeros((2, 3))), 0.0)
    v = np.array([[0.3, 2.0]] * 2)
    np.testing.assert_allclose(mix_duals(W, v), v, atol=1e-15)


def _random_connected(n, rng):
    # random spanning tree plus extra edges
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    for _ in range(int(rng.integers(0, n * 2))):
        i, j = rng.choice(n, 2, replace=False)
        edges.add((int(min(i, j)), int(max(i, j))))
    return sorted(edges)


@settings(max_examples=120, deadline=None)
@given(n=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
def test_random_graphs_mixing_properties(n, seed):
    rng = np.random.default_rng(seed)
    W = build_weight_matrix(_random_connected(n, rng), n)
    assert W.sigma_m < 1
    lam = rng.random((n, 3)) * 5
    mixed = mix_duals(W, lam)
    np.testing.assert_allclose(mixed.mean(axis=0), lam.mean(axis=0), atol=1e-12)
    dev_in = np.linalg.norm(lam - lam.mean(axis=0))
    dev_out = np.linalg.norm(mixed - mixed.mean(axis=0))
    assert dev_out <= W.sigma_m * dev_in + 1e-12
