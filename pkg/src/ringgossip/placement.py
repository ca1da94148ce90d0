"""Jammer placement strategies and system-level age objectives."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import analytic
from .model import JammerPlacement, Partition, Rates, partition_from_placement


class PlacementKind(str, enum.Enum):
    EQUIDISTANT = "equidistant"
    ADJACENT = "adjacent"
    RANDOM = "random"


@dataclass(frozen=True)
class PlacementStrategy:
    kind: PlacementKind
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PlacementKind(self.kind))
        if self.kind is PlacementKind.RANDOM and self.seed is None:
            raise ValueError("random placement needs a seed")

    @classmethod
    def equidistant(cls):
        return cls(PlacementKind.EQUIDISTANT)

    @classmethod
    def adjacent(cls):
        return cls(PlacementKind.ADJACENT)

    @classmethod
    def random(cls, seed: int):
        return cls(PlacementKind.RANDOM, seed)


def place(strategy: PlacementStrategy, n: int, n_jammers: int) -> JammerPlacement:
    """Choose which links the jammers cut.

    * equidistant: links ``floor(t n / m)``, giving segments whose sizes
      differ by at most one;
    * adjacent: links ``0 .. m-1``, leaving ``m - 1`` isolated nodes and
      one line of ``n - m + 1`` nodes;
    * random: ``m`` distinct links drawn without replacement by
      ``numpy.random.default_rng(seed).choice`` (PCG64).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n_jammers < 0 or n_jammers > n:
        raise ValueError(f"number of jammers must lie in [0, {n}], got {n_jammers}")
    if n_jammers == 0:
        return JammerPlacement()
    if strategy.kind is PlacementKind.EQUIDISTANT:
        return JammerPlacement((t * n) // n_jammers for t in range(n_jammers))
    if strategy.kind is PlacementKind.ADJACENT:
        return JammerPlacement(range(n_jammers))
    rng = np.random.default_rng(strategy.seed)
    return JammerPlacement(rng.choice(n, size=n_jammers, replace=False).tolist())


def split_total_age(n0: int, m: int, rates: Rates) -> float:
    """Total mini-ring age after one cut splits ``n0`` nodes into ``m`` and ``n0 - m``."""
    if not 1 <= m <= n0 - 1:
        raise ValueError(f"split point m must lie in [1, {n0 - 1}], got {m}")
    return analytic.ring_total_age(m, rates) + analytic.ring_total_age(n0 - m, rates)


def system_age(p: Partition, rates: Rates) -> float:
    """Average per-node age over all ``n`` nodes of a partition."""
    if p.n != rates.n:
        raise ValueError(f"partition covers {p.n} nodes but rates.n={rates.n}")
    return math.fsum(analytic.segment_total_age(s, rates) for s in p.segments) / p.n


def ring_total_age_difference(n0: int, rates: Rates) -> float:
    """Total-age change ``n0 * age(n0) - (n0+1) * age(n0+1)`` between mini-rings.

    Computed from the ring recursion; :func:`ring_total_age_difference_closed_form`
    is the independent check.
    """
    if n0 < 1 or n0 + 1 > rates.n:
        raise ValueError(f"need 1 <= n0 and n0 + 1 <= n, got n0={n0}, n={rates.n}")
    return (n0 * analytic.ring_node_age_recursive(n0, rates)
            - (n0 + 1) * analytic.ring_node_age_recursive(n0 + 1, rates))


def ring_total_age_difference_closed_form(n0: int, rates: Rates) -> float:
    return -rates.ratio * analytic.product_sum(n0, rates.n)
