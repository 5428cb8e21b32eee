"""Seeding contract.

All randomness goes through :func:`child_rng`. A stream is identified by a
64-bit base seed plus a tuple of nonnegative integer keys (replication index,
dimension, setting, ...). The keys are hashed together with the seed by
numpy's ``SeedSequence`` and drive a ``PCG64`` bit generator, so every stream
is reproducible bit for bit and independent of the order or thread in which
streams are consumed.
"""

import numpy as np

DEFAULT_SEED = 20190415


def child_rng(seed, *keys) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
