"""Deterministic counter-based random streams.

Every stochastic routine in the package derives its randomness from
``substream(seed, *path)``, where ``path`` is a tuple of small integers naming
the work unit (pixel index, batch index, ...). Streams for distinct paths are
statistically independent and do not depend on the order in which they are
created, so simulations give bit-identical results whether cells run serially
or in parallel.
"""

import numpy as np


def substream(seed, *path):
    """Return a ``numpy.random.Generator`` for one named work unit.

    Parameters
    ----------
    seed : int
        Master seed (any non-negative integer up to 64 bits).
    *path : int
        Identifier of the work unit, e.g. ``substream(seed, pixel, batch)``.
        The empty path is the root stream.

    Returns
    -------
    numpy.random.Generator
        Philox-backed generator; counter-based, so independent substreams are
        cheap and collision-free.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in path))
    return np.random.Generator(np.random.Philox(ss))
