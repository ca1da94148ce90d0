"""Long-term expected version ages on line and ring segments.

Two independent routes are provided:

* a dynamic program over contiguous node sets.  The age of a set ``S``
  obeys ``age(S) = (lambda_s + sum_i r_i * age(S + i)) / (|S| lambda/n +
  sum_i r_i)`` where ``i`` ranges over the outside neighbours pushing into
  ``S`` at rate ``r_i``.  A contiguous set only has contiguous supersets of
  size ``k + 1`` as parents, so the program runs from ``k = n0`` down to
  ``k = 1`` with no fixed point iteration;
* closed forms for the ring node age and the line corner age, evaluated
  with log-space products and compensated summation.

Every source-rate denominator uses the size ``n`` of the original ring,
not the segment size: jamming inter-node links leaves the source pushes
untouched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import Rates, Segment, SegmentKind


def _check_size(n0: int, rates: Rates) -> None:
    if int(n0) != n0 or n0 < 1:
        raise ValueError(f"segment size must be a positive integer, got {n0}")
    if n0 > rates.n:
        raise ValueError(f"segment size {n0} exceeds ring size n={rates.n}")


@dataclass(frozen=True)
class ContiguousSet:
    """Nodes ``j .. j+k-1`` (1-based) of a segment; rings wrap around."""

    j: int
    k: int
    segment: Segment

    def __post_init__(self):
        n0 = self.segment.size
        if self.j < 1 or self.k < 1 or self.k > n0:
            raise ValueError(f"invalid contiguous set j={self.j}, k={self.k} for {self.segment!r}")
        if self.segment.kind is SegmentKind.LINE and self.j + self.k - 1 > n0:
            raise ValueError(f"set {self.j}..{self.j + self.k - 1} runs off the end of {self.segment!r}")
        if self.segment.kind is SegmentKind.RING and self.j > n0:
            raise ValueError(f"start node {self.j} outside {self.segment!r}")

    def mirrored(self, i: int) -> "ContiguousSet":
        """Mirror image about the gap between nodes ``i`` and ``i + 1``."""
        return ContiguousSet(2 * i - self.j - self.k + 2, self.k, self.segment)


@dataclass(frozen=True)
class AgeVector:
    ages: np.ndarray
    rates: Rates

    @property
    def total(self) -> float:
        return math.fsum(self.ages)

    def __len__(self):
        return len(self.ages)

    def __getitem__(self, i):
        return self.ages[i]


# ---------------------------------------------------------------------------
# Products and sums
# ---------------------------------------------------------------------------

def log_products(j_max: int, n: float) -> np.ndarray:
    """``log prod_{k=1}^{j} 1/(1 + k/n)`` for ``j = 0 .. j_max``."""
    out = np.zeros(j_max + 1)
    if j_max > 0:
        k = np.arange(1, j_max + 1, dtype=float)
        out[1:] = -np.cumsum(np.log1p(k / n))
    return out


def product_term(j: int, rates_or_n) -> float:
    """``prod_{k=1}^{j} 1/(1 + k/n)``; the empty product (``j = 0``) is 1."""
    n = rates_or_n.n if isinstance(rates_or_n, Rates) else rates_or_n
    if j < 0:
        raise ValueError("j must be non-negative")
    return float(math.exp(log_products(j, n)[-1]))


def gaussian_bounds(j: int, n: float) -> tuple[float, float]:
    """Gaussian envelope ``(exp(-j^2/n), exp(-j^2/(4n)))`` of :func:`product_term`."""
    return math.exp(-j * j / n), math.exp(-j * j / (4 * n))


def product_sum(n0: int, n: float) -> float:
    """``sum_{j=1}^{n0} prod_{k=1}^{j} 1/(1 + k/n)``."""
    return math.fsum(np.exp(log_products(n0, n)[1:]))


def _ring_closed_form(n0: int, n: float, scale: float) -> float:
    # scale * [ sum_{j<n0} P_j + (n/n0) P_{n0-1} ],  P_j = prod 1/(1 + k/n)
    logp = log_products(n0 - 1, n)
    terms = np.exp(logp[1:]).tolist()
    terms.append(math.exp(logp[-1]) * (n / n0))
    return scale * math.fsum(terms)


# ---------------------------------------------------------------------------
# Ring segments
# ---------------------------------------------------------------------------

def ring_node_age(n0: int, rates: Rates) -> float:
    """Common age of every node of a mini-ring of ``n0`` nodes (closed form)."""
    _check_size(n0, rates)
    return _ring_closed_form(n0, rates.n, rates.ratio)


@lru_cache(maxsize=256)
def ring_set_ages(n0: int, rates: Rates) -> np.ndarray:
    """Ages of contiguous sets of a mini-ring, indexed by set size ``k - 1``.

    By radial symmetry a ring set's age depends on its size only.  A set of
    ``k < n0`` nodes has two outside neighbours pushing in at ``lambda/2``
    each (for ``k = n0 - 1`` they are the same node, pushing over both
    links), and each parent set has size ``k + 1``.
    """
    _check_size(n0, rates)
    lam_s, lam, n = rates.lambda_s, rates.lambda_, rates.n
    out = np.empty(n0)
    out[n0 - 1] = lam_s / (n0 * lam / n)
    for k in range(n0 - 1, 0, -1):
        out[k - 1] = (lam_s + lam * out[k]) / (k * lam / n + lam)
    out.setflags(write=False)
    return out


def ring_node_age_recursive(n0: int, rates: Rates) -> float:
    return float(ring_set_ages(n0, rates)[0])


def ring_ages(n0: int, rates: Rates) -> AgeVector:
    return AgeVector(np.full(n0, ring_node_age(n0, rates)), rates)


def ring_total_age(n0: int, rates: Rates) -> float:
    return n0 * ring_node_age(n0, rates)


# ---------------------------------------------------------------------------
# Line segments
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def line_set_ages(n0: int, rates: Rates) -> tuple[np.ndarray, ...]:
    """Ages of every contiguous set of a line of ``n0`` nodes.

    Returns a tuple indexed by ``k - 1``; entry ``k - 1`` is an array over
    the start node ``j = 1 .. n0 - k + 1`` (stored at ``j - 1``).

    Sets touching an end of the line have a single outside neighbour and
    use the denominator ``k lambda/n + lambda/2``; interior sets have two
    and use ``k lambda/n + lambda``.
    """
    _check_size(n0, rates)
    lam_s, lam, n = rates.lambda_s, rates.lambda_, rates.n
    half = lam / 2
    levels: list[np.ndarray] = [None] * n0
    levels[n0 - 1] = np.array([lam_s / (n0 * lam / n)])
    for k in range(n0 - 1, 0, -1):
        up = levels[k]  # sets of size k + 1, starts 1 .. n0 - k
        cur = np.empty(n0 - k + 1)
        # S_{j,k} grows to S_{j-1,k+1} (left) and S_{j,k+1} (right)
        cur[0] = (lam_s + half * up[0]) / (k * lam / n + half)
        cur[-1] = (lam_s + half * up[-1]) / (k * lam / n + half)
        if n0 - k + 1 > 2:
            cur[1:-1] = (lam_s + half * (up[:-1] + up[1:])) / (k * lam / n + lam)
        levels[k - 1] = cur
    for lv in levels:
        lv.setflags(write=False)
    return tuple(levels)


def line_ages(n0: int, rates: Rates) -> AgeVector:
    """Per-node ages of a line of ``n0`` nodes, node 1 first."""
    if n0 == 1:
        _check_size(n0, rates)
        return AgeVector(np.array([rates.lambda_s / rates.source_rate]), rates)
    return AgeVector(np.array(_line_node_ages(n0, rates)), rates)


@lru_cache(maxsize=4096)
def _line_node_ages(n0: int, rates: Rates) -> np.ndarray:
    # Same recursion as line_set_ages, keeping only the current level.
    _check_size(n0, rates)
    lam_s, lam, n = rates.lambda_s, rates.lambda_, rates.n
    half = lam / 2
    up = np.array([lam_s / (n0 * lam / n)])
    for k in range(n0 - 1, 0, -1):
        cur = np.empty(n0 - k + 1)
        cur[0] = (lam_s + half * up[0]) / (k * lam / n + half)
        cur[-1] = (lam_s + half * up[-1]) / (k * lam / n + half)
        if n0 - k + 1 > 2:
            cur[1:-1] = (lam_s + half * (up[:-1] + up[1:])) / (k * lam / n + lam)
        up = cur
    up.setflags(write=False)
    return up


def line_corner_age_closed_form(n0: int, rates: Rates) -> float:
    """Corner-node age of a line: the ring closed form with ``n -> n/2``
    and an extra factor 2.

    Sets containing node 1 have only one outside neighbour, so their
    ages form a single chain identical to a ring's at half the source
    rate per node.
    """
    _check_size(n0, rates)
    return _ring_closed_form(n0, rates.n / 2, 2 * rates.ratio)


def line_total_age(n0: int, rates: Rates) -> float:
    return line_ages(n0, rates).total


# ---------------------------------------------------------------------------
# Sets, segments, bounds
# ---------------------------------------------------------------------------

def contiguous_set_age(s: ContiguousSet, rates: Rates) -> float:
    n0 = s.segment.size
    if s.segment.kind is SegmentKind.RING or n0 == 1:
        return float(ring_set_ages(n0, rates)[s.k - 1])
    return float(line_set_ages(n0, rates)[s.k - 1][s.j - 1])


def segment_ages(segment: Segment, rates: Rates) -> AgeVector:
    if segment.kind is SegmentKind.RING or segment.size == 1:
        return ring_ages(segment.size, rates)
    return line_ages(segment.size, rates)


def segment_total_age(segment: Segment, rates: Rates) -> float:
    if segment.kind is SegmentKind.RING or segment.size == 1:
        return ring_total_age(segment.size, rates)
    return line_total_age(segment.size, rates)


def sandwich_check(n0: int, rates: Rates) -> tuple[float, float, float]:
    """``(ring age, worst line age, 2 * ring age)`` for a segment of ``n0`` nodes."""
    r = ring_node_age(n0, rates)
    return r, float(np.max(line_ages(n0, rates).ages)), 2 * r
