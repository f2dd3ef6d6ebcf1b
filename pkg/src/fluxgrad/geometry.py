"""Sphere and ball geometry: uniform sampling and closed-form measures."""

import math

import numpy as np


def sphere_area(dim: int, radius: float) -> float:
    """Surface area of the (dim-1)-sphere of the given radius in R^dim.

    Uses the Gamma-function closed form 2 pi^(d/2) r^(d-1) / Gamma(d/2).
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    log_a = math.log(2.0) + 0.5 * dim * math.log(math.pi) - math.lgamma(0.5 * dim)
    return math.exp(log_a) * radius ** (dim - 1)


def ball_volume(dim: int, radius: float) -> float:
    """Volume of the solid ball of the given radius in R^dim."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    log_v = 0.5 * dim * math.log(math.pi) - math.lgamma(0.5 * dim + 1.0)
    return math.exp(log_v) * radius**dim


def sphere_directions(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Draw n unit vectors uniformly distributed on the sphere in R^dim.

    Gaussian samples normalized to unit length; rows that underflow to zero
    norm (probability ~0) are redrawn.
    """
    g = rng.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-300):
        bad = norms < 1e-300
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def sphere_points(
    rng: np.random.Generator, n: int, center: np.ndarray, radius: float
) -> np.ndarray:
    """Draw n points uniformly on the sphere surface around center."""
    center = np.asarray(center, dtype=float)
    return center + radius * sphere_directions(rng, n, center.size)


def ball_points(
    rng: np.random.Generator, n: int, center: np.ndarray, radius: float
) -> np.ndarray:
    """Draw n points uniformly in the solid ball around center.

    Uniform direction times radius scaled by U^(1/dim), which is exact in
    any dimension.
    """
    center = np.asarray(center, dtype=float)
    dim = center.size
    dirs = sphere_directions(rng, n, dim)
    r = radius * rng.random(n) ** (1.0 / dim)
    return center + dirs * r[:, None]
