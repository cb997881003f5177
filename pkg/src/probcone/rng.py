"""Deterministic seed derivation for parallel Monte Carlo streams.

Per-path generators are keyed by ``mix_seed(root, index)`` so a path's
stream depends only on (root seed, path index): growing the path count or
changing the worker count never perturbs existing paths.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def mix_seed(root_seed: int, index: int) -> int:
    """Map (root seed, stream index) to a 64-bit child seed (splitmix64 step)."""
    if index < 0:
        raise ValueError("stream index must be non-negative")
    return _finalize((root_seed + (index + 1) * _GAMMA) & _MASK64)


def path_generator(root_seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for one independent stream."""
    return np.random.Generator(np.random.Philox(key=mix_seed(root_seed, index)))
