"""Seeded, stream-splittable random generators.

All randomness goes through Philox4x64-10, a counter-based generator whose
round constants are fixed by the algorithm (Salmon et al., 2011), so a
``(seed, stream)`` pair names one reproducible stream.
"""
import numpy as np

GENERATOR_NAME = "philox4x64-10"
PHILOX_CONSTANTS = {
    "multipliers": ("0xD2E7470EE14C6C93", "0xCA5A826395121157"),
    "weyl_keys": ("0x9E3779B97F4A7C15", "0xBB67AE8584CAA73B"),
}


def make_rng(seed=None, stream: int = 0) -> np.random.Generator:
    """Generator for substream ``stream`` of ``seed``.

    A ``Generator`` passed as ``seed`` is returned unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        seed = 0
    ss = np.random.SeedSequence([int(seed), int(stream)])
    return np.random.Generator(np.random.Philox(ss))
