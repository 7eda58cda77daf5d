"""Reproducible random streams.

Every (run, player) pair owns an independent Philox stream keyed by the
master seed, so a player's draws never depend on how other players or
other runs are scheduled.
"""

from __future__ import annotations

import numpy as np


def player_stream(seed: int, run_index: int, player: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(run_index), int(player)))
    return np.random.Generator(np.random.Philox(ss))


def player_streams(seed: int, run_index: int, n_players: int) -> list[np.random.Generator]:
    return [player_stream(seed, run_index, i) for i in range(n_players)]


def aux_stream(seed: int, label: int) -> np.random.Generator:
    """Stream for non-player randomness (probe points, test instances)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(2**31 - 1, int(label)))
    return np.random.Generator(np.random.Philox(ss))
