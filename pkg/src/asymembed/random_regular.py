"""Uniform random regular graphs via the pairing model.

Each draw pairs n*d half-edges uniformly and restarts from scratch whenever
the pairing produces a loop or a parallel edge, so accepted graphs are
exactly uniform over simple d-regular graphs on n labeled vertices.  Streams
are indexed: sample index i uses an independent generator spawned from
(seed, i), so batches parallelize without coordination and a fixed
(config, index) always yields the same graph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph_core import DomainError, Graph

DEFAULT_MAX_REJECTIONS = 100_000


class SamplingBudgetError(RuntimeError):
    """Rejection budget exhausted before an accepted pairing."""

    def __init__(self, attempts: int, config: "SamplerConfig") -> None:
        self.attempts = attempts
        self.config = config
        super().__init__(
            f"no simple pairing in {attempts} attempts (n={config.n}, d={config.d})"
        )


@dataclass(frozen=True)
class SamplerConfig:
    """Validated parameters for the regular-graph sampler."""

    n: int
    d: int
    seed: int
    max_rejections: int = DEFAULT_MAX_REJECTIONS

    def __post_init__(self) -> None:
        if self.d < 3:
            raise DomainError(f"degree must be >= 3, got d={self.d}")
        if self.n <= self.d:
            raise DomainError(f"need n > d, got n={self.n} d={self.d}")
        if (self.n * self.d) % 2 != 0:
            raise DomainError(f"n*d must be even, got n={self.n} d={self.d}")
        if self.max_rejections < 1:
            raise DomainError("max_rejections must be positive")


def _stream(seed: int, index: int) -> np.random.Generator:
    root = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(root))


def sample_regular(config: SamplerConfig, index: int = 0) -> Graph:
    """One uniform simple d-regular graph, from stream ``(seed, index)``."""
    if index < 0:
        raise DomainError(f"index must be >= 0, got {index}")
    rng = _stream(config.seed, index)
    n, d = config.n, config.d
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(config.max_rejections):
        rng.shuffle(stubs)
        us = stubs[0::2]
        vs = stubs[1::2]
        if np.any(us == vs):
            continue
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        edges = frozenset(zip(lo.tolist(), hi.tolist()))
        return Graph(n=n, edges=edges, d=d)
    raise SamplingBudgetError(config.max_rejections, config)


def sample_batch(config: SamplerConfig, count: int, start_index: int = 0) -> list[Graph]:
    """Samples at indices ``start_index .. start_index+count-1`` in order."""
    return [sample_regular(config, start_index + i) for i in range(count)]


def acceptance_rate_estimate(d: int) -> float:
    """Asymptotic probability that one pairing attempt is simple.

    The loop and multi-edge counts converge to independent Poissons with
    means (d-1)/2 and (d-1)^2/4, so the no-defect probability tends to
    exp((1 - d*d) / 4).
    """
    return math.exp((1 - d * d) / 4.0)


def expected_cycle_count(d: int, r: int) -> float:
    """Asymptotic mean number of r-cycles in a random d-regular graph:
    (d-1)^r / (2r)."""
    if r < 3:
        raise DomainError(f"cycle length must be >= 3, got {r}")
    if d < 3:
        raise DomainError(f"degree must be >= 3, got {d}")
    return (d - 1) ** r / (2.0 * r)
