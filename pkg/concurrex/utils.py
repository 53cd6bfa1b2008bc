"""
Utility functions and shared resources.
"""

import secrets
from typing import Optional

import numpy as np
from rich.console import Console
from scipy.stats import unitary_group

# Shared console instance
console = Console()

SEED_MODULUS = 2 ** 64


def resolve_seed(seed: Optional[int]) -> int:
    """Return the given seed, or a fresh 64-bit one to be echoed back."""
    if seed is None:
        return secrets.randbits(64)
    return int(seed) % SEED_MODULUS


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Seeded generator; extra integers select an independent stream."""
    return np.random.default_rng([int(seed) % SEED_MODULUS, *stream])


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary."""
    if dim == 1:
        phase = rng.uniform(0, 2 * np.pi)
        return np.array([[np.exp(1j * phase)]])
    return unitary_group.rvs(dim, random_state=rng)


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian array."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
