"""Event-driven Monte Carlo simulation of version-age gossip on a partition.

The state is the integer version age of each node.  Three kinds of
Poisson clocks drive it:

* the source gets a new version at rate ``lambda_s``: every age grows by 1;
* the source pushes to node ``i`` at rate ``lambda/n``: ``age[i] = 0``;
* node ``s`` pushes over each live directed link ``s -> d`` at rate
  ``lambda/2``: ``age[d] = min(age[d], age[s])``.

All clocks are merged into one process of total rate ``R``; each event
picks a category in proportion to its rate and then an instance uniformly.
Ages are piecewise constant, so the time average is integrated exactly
between events.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .model import JammerPlacement, Partition, Rates, SegmentKind, partition_from_placement

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Generator(PCG64) via SeedSequence.spawn"

_BATCH = 1 << 14


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``warmup`` defaults to 10% of ``horizon``.  Replication ``r`` draws
    from the ``r``-th child of ``SeedSequence(seed)``.
    """

    rates: Rates
    partition: Partition | JammerPlacement
    horizon: float = 1e4
    warmup: float | None = None
    seed: int = 0
    replications: int = 20

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.warmup is None:
            object.__setattr__(self, "warmup", 0.1 * self.horizon)
        if not 0 <= self.warmup < self.horizon:
            raise ValueError(f"warmup must lie in [0, horizon), got {self.warmup}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if isinstance(self.partition, JammerPlacement):
            self.partition.validate(self.rates.n)
        elif self.partition.n != self.rates.n:
            raise ValueError(f"partition covers {self.partition.n} nodes but rates.n={self.rates.n}")

    def resolved_partition(self) -> Partition:
        if isinstance(self.partition, JammerPlacement):
            return partition_from_placement(self.partition, self.rates.n)
        return self.partition


@dataclass
class SimResult:
    per_node_age: np.ndarray
    system_age: float
    ci_halfwidth: float
    std_error: float
    events_processed: int
    replication_ages: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    @property
    def rel_std_error(self) -> float:
        return self.std_error / self.system_age


class Topology(NamedTuple):
    """Directed live links of a partition laid out on nodes ``0 .. n-1``."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    offsets: tuple[int, ...]


def build_topology(p: Partition) -> Topology:
    """Lay segments out consecutively and list every live directed link.

    A mini-ring of two nodes carries two parallel links between its nodes;
    an isolated node has none.
    """
    src: list[int] = []
    dst: list[int] = []
    offsets = []
    base = 0
    for seg in p.segments:
        offsets.append(base)
        m = seg.size
        for a in range(base, base + m - 1):
            src += [a, a + 1]
            dst += [a + 1, a]
        if seg.kind is SegmentKind.RING and m >= 2:
            first, last = base, base + m - 1
            src += [last, first]
            dst += [first, last]
        base += m
    return Topology(p.n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), tuple(offsets))


class Event(NamedTuple):
    kind: str  # "tick" | "deliver" | "gossip"
    node: int = -1
    src: int = -1


class _Sampler:
    def __init__(self, topo: Topology, rates: Rates):
        self.n = topo.n
        self.n_links = len(topo.src)
        self.lam_s = rates.lambda_s
        self.lam = rates.lambda_
        self.total_rate = rates.lambda_s + rates.lambda_ + self.n_links * rates.link_rate

    def codes(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms on ``[0, R)`` to event codes.

        ``-1`` is a source tick, ``0 .. n-1`` a delivery to that node, and
        ``n + l`` a push over directed link ``l``.
        """
        lam_s, lam, n = self.lam_s, self.lam, self.n
        v = u - lam_s
        node = np.minimum((v * (n / lam)).astype(np.int64), n - 1)
        out = np.where(u < lam_s, -1, node)
        if self.n_links:
            w = v - lam
            link = np.minimum((w * (2 / lam)).astype(np.int64), self.n_links - 1)
            out = np.where(w >= 0, n + link, out)
        return out


def next_event(state: tuple[Topology, Rates], rng: np.random.Generator) -> tuple[float, Event]:
    """Draw the waiting time and identity of the next event."""
    topo, rates = state
    sampler = _Sampler(topo, rates)
    dt = rng.exponential(1.0 / sampler.total_rate)
    code = int(sampler.codes(np.array([rng.random() * sampler.total_rate]))[0])
    if code < 0:
        return dt, Event("tick")
    if code < topo.n:
        return dt, Event("deliver", code)
    link = code - topo.n
    return dt, Event("gossip", int(topo.dst[link]), int(topo.src[link]))


def _replicate(topo: Topology, rates: Rates, horizon: float, warmup: float,
               rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """One replication; returns time-averaged ages over ``(warmup, horizon]``."""
    sampler = _Sampler(topo, rates)
    n = topo.n
    src = topo.src.tolist()
    dst = topo.dst.tolist()
    scale = 1.0 / sampler.total_rate
    R = sampler.total_rate

    ages = [0] * n
    area = [0.0] * n
    last = [warmup] * n  # nothing before warmup is integrated
    t = 0.0
    events = 0
    done = False
    while not done:
        times = t + np.cumsum(rng.exponential(scale, _BATCH))
        codes = sampler.codes(rng.random(_BATCH) * R)
        for tt, c in zip(times.tolist(), codes.tolist()):
            if tt > horizon:
                done = True
                break
            events += 1
            if c < 0:
                for i in range(n):
                    li = last[i]
                    if tt > li:
                        area[i] += ages[i] * (tt - li)
                        last[i] = tt
                    ages[i] += 1
            elif c < n:
                a = ages[c]
                if a:
                    li = last[c]
                    if tt > li:
                        area[c] += a * (tt - li)
                        last[c] = tt
                    ages[c] = 0
            else:
                d = dst[c - n]
                a = ages[src[c - n]]
                b = ages[d]
                if a < b:
                    li = last[d]
                    if tt > li:
                        area[d] += b * (tt - li)
                        last[d] = tt
                    ages[d] = a
        t = times[-1]
    for i in range(n):
        if horizon > last[i]:
            area[i] += ages[i] * (horizon - last[i])
    return np.array(area) / (horizon - warmup), events


def simulate(config: SimConfig) -> SimResult:
    """Run ``config.replications`` independent replications and pool them."""
    partition = config.resolved_partition()
    topo = build_topology(partition)
    seeds = np.random.SeedSequence(config.seed).spawn(config.replications)
    per_rep = []
    events = 0
    for ss in seeds:
        ages, ev = _replicate(topo, config.rates, config.horizon, config.warmup,
                              np.random.Generator(np.random.PCG64(ss)))
        per_rep.append(ages)
        events += ev
    per_rep = np.array(per_rep)
    rep_means = per_rep.mean(axis=1)
    r = config.replications
    se = float(rep_means.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
    per_node = per_rep.mean(axis=0)
    return SimResult(
        per_node_age=per_node,
        system_age=float(per_node.mean()),
        ci_halfwidth=1.96 * se,
        std_error=se,
        events_processed=events,
        replication_ages=per_rep,
        metadata={
            "rng": RNG_ALGORITHM,
            "seed": config.seed,
            "horizon": config.horizon,
            "warmup": config.warmup,
            "replications": r,
            "lambda_s": config.rates.lambda_s,
            "lambda": config.rates.lambda_,
            "n": config.rates.n,
        },
    )


def per_node_std_error(result: SimResult) -> np.ndarray:
    reps = result.replication_ages
    if len(reps) < 2:
        return np.zeros(reps.shape[1])
    return reps.std(axis=0, ddof=1) / math.sqrt(len(reps))


def simulate_to_precision(config: SimConfig, rel_se: float = 0.01, max_rounds: int = 4,
                          nodes=None) -> SimResult:
    """Rerun with a longer horizon until the relative standard error is at most ``rel_se``.

    By default the error of the system age is controlled; with ``nodes``
    (an index or slice into ``per_node_age``) the worst per-node error over
    those nodes is.  The horizon grows by the squared ratio of achieved to
    target error plus 20%; the seed stays fixed.
    """
    def achieved(res):
        if nodes is None:
            return res.rel_std_error
        return float(np.max(per_node_std_error(res)[nodes] / res.per_node_age[nodes]))

    result = simulate(config)
    for _ in range(max_rounds):
        err = achieved(result)
        if err <= rel_se:
            break
        factor = 1.2 * (err / rel_se) ** 2
        logger.debug("rel se %.4f > %.4f, horizon %g -> %g", err, rel_se,
                     config.horizon, config.horizon * factor)
        config = replace(config, horizon=config.horizon * factor, warmup=config.warmup * factor)
        result = simulate(config)
    return result
