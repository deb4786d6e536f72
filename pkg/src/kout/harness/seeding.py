"""Per-trial seed derivation.

``trial_seed(root, i)`` feeds ``root + (i + 1) * GOLDEN`` (mod 2**64) through
the splitmix64 finalizer.  Both steps are bijections of 64-bit words for a
fixed root, so distinct trial indices always get distinct seeds.
"""

from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def trial_seed(root_seed: int, trial: int) -> int:
    if trial < 0:
        raise ValueError("trial index must be non-negative")
    return mix64(root_seed + (trial + 1) * GOLDEN)


def trial_seeds(root_seed: int, trials: int) -> np.ndarray:
    """Vectorized ``trial_seed`` for indices ``0 .. trials-1`` (uint64 wraparound is the mod)."""
    with np.errstate(over="ignore"):
        z = np.uint64(root_seed & MASK) + (np.arange(1, trials + 1, dtype=np.uint64) * np.uint64(GOLDEN))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def trial_rng(root_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(root_seed, trial))
