"""Small shared helpers: seeded RNG and round-trip float formatting."""

import os

import numpy as np

_DEFAULT_SEED = 20240801


def probe_rng(seed=None):
    """RNG for randomized probes; SFEM_SEED overrides the default seed."""
    if seed is None:
        env = os.environ.get("SFEM_SEED")
        seed = int(env) if env else _DEFAULT_SEED
    return np.random.default_rng(seed)


def fmt17(x):
    """Format a float with 17 significant digits (value round-trips exactly)."""
    return format(float(x), ".17g")
