from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from leo_spectra.utils.errors import SpectraError

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream: the same (seed, stream, substream) always gives the same draws"""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed < _SEED_LIMIT:
            raise SpectraError(
                "Master seed must be a 64-bit unsigned integer",
                details={"master_seed": self.master_seed},
            )
        if self.stream_id < 0:
            raise SpectraError("Stream id must be non-negative", details={"stream_id": self.stream_id})

    def generator(self, *substream: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, *substream))
        return np.random.Generator(np.random.Philox(seq))

    def child(self, stream_id: int) -> RngStream:
        return RngStream(self.master_seed, stream_id)
