"""Counter-based random streams keyed by (master seed, stream id, replicate).

Geometry and passage times draw from different stream ids so that changing
the weight law never perturbs the point configuration.
"""

from __future__ import annotations

import numpy as np

GEOMETRY = 0
WEIGHTS = 1
PROBES = 2


def stream(master_seed: int, stream_id: int, replicate: int = 0) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(stream_id), int(replicate)))
    return np.random.Generator(np.random.Philox(seq))


def seed_record(master_seed: int, stream_id: int, replicate: int = 0) -> dict:
    return {"master_seed": int(master_seed), "stream": int(stream_id), "replicate": int(replicate)}
