"""Seeded random streams, seed mixing and the sampling primitives built on them."""

import math

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(value):
    """One splitmix64 step: advance by the golden gamma, then avalanche.

    splitmix64(0) is the first output of a splitmix64 generator seeded with 0.
    """
    z = (value + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def make_rng(seed):
    """Return an independent PCG64 generator for a 64-bit seed."""
    if not 0 <= int(seed) <= MASK64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def box_muller_normals(rng, count):
    """Draw `count` standard normals with the Box-Muller transform.

    Uniforms are consumed in pairs; each pair yields a cosine and a sine
    normal, interleaved in that order.
    """
    if count <= 0:
        return np.zeros(0, dtype=np.float64)
    pairs = (count + 1) // 2
    uniforms = rng.random(2 * pairs).reshape(pairs, 2)
    u1 = 1.0 - uniforms[:, 0]  # (0, 1], keeps log finite
    theta = 2.0 * math.pi * uniforms[:, 1]
    radius = np.sqrt(-2.0 * np.log(u1))
    normals = np.empty((pairs, 2), dtype=np.float64)
    normals[:, 0] = radius * np.cos(theta)
    normals[:, 1] = radius * np.sin(theta)
    return normals.reshape(-1)[:count]


def sample_without_replacement(rng, population, count):
    """Pick `count` distinct indices from range(population) by partial Fisher-Yates."""
    if not 0 <= count <= population:
        raise ValueError(f"cannot draw {count} of {population} without replacement")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    remaining = population - np.arange(count, dtype=np.int64)
    offsets = np.floor(rng.random(count) * remaining).astype(np.int64)
    offsets = np.minimum(offsets, remaining - 1)
    indices = np.arange(population, dtype=np.int64)
    for i, offset in enumerate(offsets.tolist()):
        if offset:
            j = i + offset
            indices[i], indices[j] = indices[j], indices[i]
    return indices[:count].copy()


def round_half_up(value):
    """Round a non-negative count to the nearest integer, halves away from zero."""
    return int(math.floor(value + 0.5))
