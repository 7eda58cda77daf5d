"""Communication topology and one-round mixing of dual variables."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, DisconnectedGraph, EmptyGraph, NonStochastic

RULES = ("metropolis", "uniform-complete", "explicit")


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric doubly stochastic mixing matrix with its contraction factor.

    ``sigma_m`` is the spectral norm of ``A - (1/N) 1 1^T``; it is computed
    once at construction and never refreshed.
    """

    n_players: int
    weights: np.ndarray
    sigma_m: float = field(default=np.nan)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if np.isnan(self.sigma_m):
            object.__setattr__(self, "sigma_m", spectral_gap_norm(w))

    def neighbors(self, i: int) -> list[int]:
        row = self.weights[i]
        return [j for j in range(self.n_players) if j != i and row[j] > 0]


def spectral_gap_norm(weights: np.ndarray) -> float:
    """Spectral norm of ``A - 11^T/N`` by dense symmetric eigendecomposition."""
    n = weights.shape[0]
    centered = weights - np.full((n, n), 1.0 / n)
    eig = np.linalg.eigvalsh(0.5 * (centered + centered.T))
    return float(np.max(np.abs(eig)))


def _adjacency(edges: Iterable[Sequence[int]], n: int) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for edge in edges:
        i, j = int(edge[0]), int(edge[1])
        if not (0 <= i < n and 0 <= j < n):
            raise DimensionMismatch(f"edge ({i}, {j}) outside [0, {n})")
        if i != j:
            adj[i].add(j)
            adj[j].add(i)
    return adj


def is_connected(adj: Sequence[set[int]]) -> bool:
    n = len(adj)
    seen = {0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for j in adj[k]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == n


def _check_explicit(w: np.ndarray, tol: float = 1e-12) -> None:
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise NonStochastic(f"weight matrix must be square, got shape {w.shape}")
    if np.any(w < 0):
        raise NonStochastic("weight matrix has negative entries")
    if not np.allclose(w, w.T, atol=tol, rtol=0):
        raise NonStochastic("weight matrix is not symmetric")
    if not np.allclose(w.sum(axis=1), 1.0, atol=tol, rtol=0):
        raise NonStochastic("weight matrix rows do not sum to 1")
    if np.any(np.diag(w) <= 0):
        raise NonStochastic("weight matrix needs a positive diagonal")


def build_weight_matrix(
    edges: Iterable[Sequence[int]] | None,
    n_players: int,
    rule: str = "metropolis",
    weights: np.ndarray | None = None,
) -> WeightMatrix:
    """Build a validated mixing matrix.

    Parameters
    ----------
    edges : iterable of pairs, optional
        Undirected edges with 0-based endpoints. Ignored by
        ``uniform-complete``; for ``explicit`` the edges are read off the
        support of ``weights``.
    n_players : int
    rule : {"metropolis", "uniform-complete", "explicit"}
        Metropolis sets ``a_ij = 1 / (1 + max(deg_i, deg_j))`` on edges and
        fills the diagonal so rows sum to one.
    weights : array_like, optional
        The matrix itself when ``rule == "explicit"``.
    """
    if n_players < 1:
        raise EmptyGraph("graph needs at least one node")
    if rule not in RULES:
        raise ValueError(f"unknown weighting rule {rule!r}; expected one of {RULES}")
    n = int(n_players)

    if rule == "uniform-complete":
        return WeightMatrix(n, np.full((n, n), 1.0 / n))

    if rule == "explicit":
        if weights is None:
            raise NonStochastic("explicit rule requires a weight matrix")
        w = np.asarray(weights, dtype=float)
        _check_explicit(w)
        if w.shape[0] != n:
            raise DimensionMismatch(f"weight matrix is {w.shape[0]}x{w.shape[0]}, expected {n}")
        support = [(i, j) for i in range(n) for j in range(i + 1, n) if w[i, j] > 0]
        if not is_connected(_adjacency(support, n)):
            raise DisconnectedGraph("support of the weight matrix is disconnected")
        return WeightMatrix(n, w)

    edge_list = list(edges or [])
    if not edge_list and n > 1:
        raise EmptyGraph("metropolis rule needs at least one edge")
    adj = _adjacency(edge_list, n)
    if not is_connected(adj):
        raise DisconnectedGraph("communication graph is not connected")
    deg = [len(a) for a in adj]
    w = np.zeros((n, n))
    for i in range(n):
        for j in adj[i]:
            w[i, j] = 1.0 / (1.0 + max(deg[i], deg[j]))
    for i in range(n):
        w[i, i] = 1.0 - (w[i].sum() - w[i, i])
    return WeightMatrix(n, w)


def topology_edges(kind: str, n: int) -> list[tuple[int, int]]:
    """Edge lists for the named topologies ``complete``, ``ring`` and ``star``."""
    if kind == "complete":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    if kind == "ring":
        if n == 2:
            return [(0, 1)]
        return [(i, (i + 1) % n) for i in range(n)] if n > 2 else []
    if kind == "star":
        return [(0, j) for j in range(1, n)]
    raise ValueError(f"unknown topology {kind!r}")


def mix_duals(W: WeightMatrix, duals) -> np.ndarray:
    """One consensus round: row ``i`` of the result is ``sum_j a_ij duals[j]``.

    ``duals`` is an ``(N, m)`` array (or a sequence of N length-m vectors).
    """
    lam = np.asarray(duals, dtype=float)
    if lam.ndim == 1:
        lam = lam[:, None]
    if lam.ndim != 2 or lam.shape[0] != W.n_players:
        raise DimensionMismatch(
            f"expected {W.n_players} dual vectors of equal length, got shape {lam.shape}"
        )
    return W.weights @ lam
