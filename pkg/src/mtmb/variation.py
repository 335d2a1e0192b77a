"""Uniform crossover followed by clipped Gaussian mutation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VariationConfig:
    crossover_rate: float = 0.5
    mutation_rate: float = 1.0
    sigma_frac: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError(f"crossover_rate must be in [0, 1], got {self.crossover_rate}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not 0.0 < self.sigma_frac <= 1.0:
            raise ValueError(f"sigma_frac must be in (0, 1], got {self.sigma_frac}")


def crossover_uniform(parent_a: np.ndarray, parent_b: np.ndarray, cfg: VariationConfig,
                      rng: np.random.Generator) -> np.ndarray:
    """Each coordinate comes from ``parent_b`` with probability ``crossover_rate``."""
    a = np.asarray(parent_a, dtype=float)
    b = np.asarray(parent_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"parent shapes differ: {a.shape} vs {b.shape}")
    take_b = rng.random(a.shape[0]) < cfg.crossover_rate
    return np.where(take_b, b, a)


def mutate_gaussian(c: np.ndarray, lower: np.ndarray, upper: np.ndarray, cfg: VariationConfig,
                    rng: np.random.Generator) -> np.ndarray:
    """Perturb a random subset of coordinates, then clip to the box.

    The subset is never empty: an empty mask is redrawn once, and if it is
    still empty a single coordinate is picked uniformly.
    """
    c = np.asarray(c, dtype=float)
    if np.any(c < lower) or np.any(c > upper):
        raise ValueError(f"command {c.tolist()} outside bounds")
    dim = c.shape[0]
    mask = rng.random(dim) < cfg.mutation_rate
    if not mask.any():
        mask = rng.random(dim) < cfg.mutation_rate
        if not mask.any():
            mask[int(rng.integers(dim))] = True
    noise = rng.normal(0.0, 1.0, dim) * (cfg.sigma_frac * (upper - lower))
    return np.clip(np.where(mask, c + noise, c), lower, upper)


def vary(parent_a: np.ndarray, parent_b: np.ndarray, lower: np.ndarray, upper: np.ndarray,
         cfg: VariationConfig, rng: np.random.Generator) -> np.ndarray:
    return mutate_gaussian(crossover_uniform(parent_a, parent_b, cfg, rng), lower, upper, cfg, rng)
