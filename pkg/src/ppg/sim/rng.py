"""
Deterministic random streams for simulation runs.

Every (seed, round, stage) triple owns an independent PCG64 stream spawned
from one SeedSequence, so a round's draws never depend on what earlier
rounds consumed and runs differing only in quorum stay paired.
"""

from enum import IntEnum

import numpy as np

GENERATOR_ID = "numpy.PCG64"


class Stage(IntEnum):
    PARTICIPATION = 0
    VOTES = 1
    VETOES = 2
    SIGMA = 3


class SeededStreams:
    """Factory of per-round generators for one seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def generator(self, round_index: int, stage: Stage) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(int(round_index), int(stage))
        )
        return np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self) -> str:
        return f"SeededStreams(seed={self.seed}, generator={GENERATOR_ID})"
