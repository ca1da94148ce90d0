"""Domain types: rates, segments, partitions and jammer placements.

Ring nodes are indexed ``0 .. n-1``.  Link ``i`` joins node ``i`` and node
``(i + 1) % n``; a jammer removes one link in both directions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable


class SegmentKind(str, enum.Enum):
    LINE = "line"
    RING = "ring"


@dataclass(frozen=True)
class Rates:
    """Update rates of the gossip system.

    Attributes:
        lambda_s: Poisson rate at which the source gets a new version.
        lambda_: Aggregate rate.  The source pushes to each node at
            ``lambda_ / n``; every node pushes to each neighbour at
            ``lambda_ / 2``.
        n: Size of the original (unjammed) ring.
    """

    lambda_s: float = 1.0
    lambda_: float = 1.0
    n: int = 1

    def __post_init__(self):
        if not self.lambda_s > 0:
            raise ValueError(f"lambda_s must be positive, got {self.lambda_s}")
        if not self.lambda_ > 0:
            raise ValueError(f"lambda_ must be positive, got {self.lambda_}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")

    @property
    def source_rate(self) -> float:
        """Rate of source -> node pushes, per node."""
        return self.lambda_ / self.n

    @property
    def link_rate(self) -> float:
        """Rate of node -> neighbour pushes, per directed link."""
        return self.lambda_ / 2

    @property
    def ratio(self) -> float:
        return self.lambda_s / self.lambda_


@dataclass(frozen=True)
class Segment:
    kind: SegmentKind
    size: int

    def __post_init__(self):
        object.__setattr__(self, "kind", SegmentKind(self.kind))
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"segment size must be a positive integer, got {self.size}")

    @property
    def is_isolated(self) -> bool:
        return self.size == 1

    def age_key(self) -> tuple[str, int]:
        # Line(1) and Ring(1) are the same isolated node.
        if self.size == 1:
            return (SegmentKind.RING.value, 1)
        return (self.kind.value, self.size)

    def __repr__(self):
        return f"{self.kind.value.capitalize()}({self.size})"


def Line(size: int) -> Segment:
    return Segment(SegmentKind.LINE, size)


def Ring(size: int) -> Segment:
    return Segment(SegmentKind.RING, size)


@dataclass(frozen=True, eq=False)
class Partition:
    """A jammed ring split into independent segments.

    Equality ignores segment order: two partitions are equal when their
    (kind, size) multisets agree.
    """

    segments: tuple[Segment, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.segments:
            raise ValueError("a partition needs at least one segment")
        total = sum(s.size for s in self.segments)
        if total != self.n:
            raise ValueError(f"segment sizes sum to {total}, expected n={self.n}")

    def canonical(self) -> tuple[tuple[str, int], ...]:
        return tuple(sorted((s.kind.value, s.size) for s in self.segments))

    def sizes(self) -> list[int]:
        return sorted(s.size for s in self.segments)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n == other.n and self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.n, self.canonical()))

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __repr__(self):
        return f"Partition({list(self.segments)!r}, n={self.n})"


@dataclass(frozen=True)
class JammerPlacement:
    """Set of cut link indices.  Duplicate cuts collapse into one jammer."""

    cut_links: frozenset[int] = field(default_factory=frozenset)

    def __init__(self, cut_links: Iterable[int] = ()):
        links = frozenset(int(c) for c in cut_links)
        if any(c < 0 for c in links):
            raise ValueError("link indices must be non-negative")
        object.__setattr__(self, "cut_links", links)

    @property
    def n_jammers(self) -> int:
        return len(self.cut_links)

    def validate(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        bad = [c for c in self.cut_links if c >= n]
        if bad:
            raise ValueError(f"link indices {sorted(bad)} out of range for n={n}")

    def rotated(self, r: int, n: int) -> "JammerPlacement":
        return JammerPlacement((c + r) % n for c in self.cut_links)


def partition_from_placement(placement: JammerPlacement, n: int) -> Partition:
    """Cut a ring of ``n`` nodes at the placement's links.

    Segments are listed in ring order starting with the nodes after the
    smallest cut index; with no cuts the ring is returned whole.

    >>> partition_from_placement(JammerPlacement({0, 1, 2}), 6)
    Partition([Line(1), Line(1), Line(4)], n=6)
    """
    placement.validate(n)
    cuts = sorted(placement.cut_links)
    if not cuts:
        return Partition((Ring(n),), n)
    gaps = [b - a for a, b in zip(cuts, cuts[1:])]
    gaps.append(cuts[0] + n - cuts[-1])
    return Partition(tuple(Line(g) for g in gaps), n)


def to_miniring_model(p: Partition) -> Partition:
    """Join the endpoints of every segment, keeping sizes."""
    return Partition(tuple(Ring(s.size) for s in p.segments), p.n)


def to_line_model(p: Partition) -> Partition:
    return Partition(tuple(Line(s.size) for s in p.segments), p.n)
