"""Seeded random streams.

Every top-level call takes either an integer seed or an existing
``numpy.random.Generator``. Integer seeds are turned into a counter-based
Philox stream so outputs are bit-reproducible across platforms.
"""
from __future__ import annotations

import numpy as np


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Return a generator for ``seed``; generators pass through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("a seed is required; silent nondeterminism is not allowed")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def replicate_rng(seed: int, *index: int) -> np.random.Generator:
    """Independent stream for replicate ``index`` of a run seeded with ``seed``.

    The stream depends only on ``(seed, *index)``, never on scheduling order.
    """
    entropy = [int(seed), *(int(i) for i in index)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
