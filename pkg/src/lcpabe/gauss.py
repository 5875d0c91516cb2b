"""Discrete Gaussian sampling over the integers and related screens."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .zq import IntMatrix, Rng, norm_inf


@dataclass(frozen=True)
class GaussParam:
    """Centered discrete Gaussian with pmf proportional to exp(-z^2 / (2 sigma^2))."""

    sigma: float
    tail_cut: float = 6.0

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.tail_cut > 0:
            raise ValueError(f"tail_cut must be positive, got {self.tail_cut}")

    @property
    def bound(self) -> int:
        return int(math.floor(self.tail_cut * self.sigma))

    @property
    def degenerate(self) -> bool:
        return self.bound == 0


@lru_cache(maxsize=64)
def _cdf_table(sigma: float, tail_cut: float) -> tuple[np.ndarray, np.ndarray]:
    bound = int(math.floor(tail_cut * sigma))
    support = np.arange(-bound, bound + 1, dtype=np.int64)
    weights = np.exp(-(support.astype(np.float64) ** 2) / (2.0 * sigma * sigma))
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return support, cdf


def pmf(p: GaussParam) -> tuple[np.ndarray, np.ndarray]:
    """Support and probabilities of the truncated distribution."""
    support, cdf = _cdf_table(p.sigma, p.tail_cut)
    return support, np.diff(np.concatenate([[0.0], cdf]))


def sample_array(rng: Rng, p: GaussParam, shape) -> np.ndarray:
    if p.degenerate:
        return np.zeros(shape, dtype=np.int64)
    support, cdf = _cdf_table(p.sigma, p.tail_cut)
    u = rng.gen.random(size=shape)
    idx = np.searchsorted(cdf, u, side="right")
    return support[np.minimum(idx, support.size - 1)]


def sample_z(rng: Rng, p: GaussParam) -> int:
    return int(sample_array(rng, p, (1,))[0])


def sample_matrix(rng: Rng, p: GaussParam, rows: int, cols: int) -> IntMatrix:
    return IntMatrix(sample_array(rng, p, (rows, cols)))


@dataclass(frozen=True)
class TailReport:
    samples: int
    violations: int
    threshold: float

    @property
    def fraction(self) -> float:
        return self.violations / self.samples


def check_tail(samples: Sequence[IntMatrix], p: GaussParam) -> TailReport:
    """Count samples whose infinity norm exceeds sqrt(entries) * sigma."""
    if not samples:
        raise ValueError("no samples given")
    violations = 0
    threshold = 0.0
    for s in samples:
        threshold = math.sqrt(s.rows * s.cols) * p.sigma
        if norm_inf(s) > threshold:
            violations += 1
    return TailReport(len(samples), violations, threshold)


def smudging_distance(b: int, sigma: float, trials: int, rng: Rng) -> float:
    """Histogram estimate of the statistical distance between z and z + b.

    One batch of draws is compared against its own shift, so sampling noise
    largely cancels. Values are pooled into bins of width about sigma/8,
    which can only lower the distance and keeps bins well populated.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = GaussParam(sigma)
    z = sample_array(rng, p, (trials,))
    width = max(1, int(sigma // 8))
    lo = int(z.min()) - abs(int(b)) - width
    h1 = np.bincount((z - lo) // width)
    h2 = np.bincount((z + b - lo) // width)
    size = max(h1.size, h2.size)
    h1 = np.pad(h1, (0, size - h1.size))
    h2 = np.pad(h2, (0, size - h2.size))
    return float(0.5 * np.abs(h1 - h2).sum() / trials)
