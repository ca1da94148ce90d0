import math

import numpy as np
import pytest
from scipy.stats import t as student_t

from ringgossip.analytic import line_ages, ring_node_age, segment_ages
from ringgossip.model import JammerPlacement, Line, Partition, Rates, Ring, to_miniring_model
from ringgossip.placement import system_age
from ringgossip.sim import (
    Event,
    SimConfig,
    _Sampler,
    build_topology,
    next_event,
    per_node_std_error,
    simulate,
    simulate_to_precision,
)


def R(n):
    return Rates(1.0, 1.0, n)


def per_node_se(res):
    return per_node_std_error(res)


# --- topology and sampling --------------------------------------------------

def test_topology_links():
    topo = build_topology(Partition([Line(3), Ring(2), Ring(1), Ring(3)], 9))
    links = sorted(zip(topo.src.tolist(), topo.dst.tolist()))
    assert links == sorted([(0, 1), (1, 0), (1, 2), (2, 1),
                            (3, 4), (4, 3), (4, 3), (3, 4),
                            (6, 7), (7, 6), (7, 8), (8, 7), (8, 6), (6, 8)])
    assert topo.offsets == (0, 3, 5, 6)


def test_next_event_single_node():
    topo = build_topology(Partition([Ring(1)], 1))
    rng = np.random.default_rng(1)
    kinds = {next_event((topo, R(1)), rng)[1].kind for _ in range(300)}
    assert kinds == {"tick", "deliver"}
    assert _Sampler(topo, R(1)).total_rate == 2.0


def test_next_event_all_links_cut():
    p = Partition([Line(1)] * 5, 5)
    topo = build_topology(p)
    rng = np.random.default_rng(2)
    assert all(next_event((topo, R(5)), rng)[1].kind != "gossip" for _ in range(500))


def test_next_event_identifies_link_endpoints():
    topo = build_topology(Partition([Line(2)], 2))
    rng = np.random.default_rng(3)
    seen = set()
    for _ in range(400):
        _, ev = next_event((topo, R(2)), rng)
        if ev.kind == "gossip":
            seen.add((ev.src, ev.node))
    assert seen == {(0, 1), (1, 0)}


def test_event_frequencies_match_rates():
    # n = 4 line: R = 1 + 1 + 6 * 0.5 = 5, categories 0.2 / 0.2 / 0.6
    rates = Rates(1.0, 1.0, 4)
    topo = build_topology(Partition([Line(4)], 4))
    s = _Sampler(topo, rates)
    rng = np.random.default_rng(11)
    codes = s.codes(rng.random(10**6) * s.total_rate)
    freq = np.array([(codes < 0).mean(), ((codes >= 0) & (codes < 4)).mean(), (codes >= 4).mean()])
    np.testing.assert_allclose(freq, [0.2, 0.2, 0.6], rtol=0.01)
    # uniform within each category
    node_counts = np.bincount(codes[(codes >= 0) & (codes < 4)], minlength=4)
    np.testing.assert_allclose(node_counts / node_counts.sum(), 0.25, rtol=0.02)
    link_counts = np.bincount(codes[codes >= 4] - 4, minlength=6)
    np.testing.assert_allclose(link_counts / link_counts.sum(), 1 / 6, rtol=0.02)


def test_waiting_times_exponential():
    rates = Rates(1.0, 1.0, 4)
    topo = build_topology(Partition([Line(4)], 4))
    rng = np.random.default_rng(5)
    dts = [next_event((topo, rates), rng)[0] for _ in range(20000)]
    assert np.mean(dts) == pytest.approx(1 / 5, rel=0.03)


def _reference_run(p, rates, horizon, warmup, seed):
    """Plain one-event-at-a-time loop on top of next_event."""
    topo = build_topology(p)
    rng = np.random.default_rng(seed)
    ages = [0] * p.n
    area = np.zeros(p.n)
    t = 0.0
    while True:
        dt, ev = next_event((topo, rates), rng)
        t1 = min(t + dt, horizon)
        lo = max(t, warmup)
        if t1 > lo:
            area += np.array(ages) * (t1 - lo)
        if t + dt > horizon:
            break
        t += dt
        if ev.kind == "tick":
            ages = [a + 1 for a in ages]
        elif ev.kind == "deliver":
            ages[ev.node] = 0
        else:
            ages[ev.node] = min(ages[ev.node], ages[ev.src])
        assert all(isinstance(a, int) for a in ages)
    return area / (horizon - warmup)


def test_batched_loop_agrees_with_reference_loop():
    p = Partition([Line(3), Ring(3)], 6)
    rates = R(6)
    ref = np.mean([_reference_run(p, rates, 400.0, 40.0, s) for s in range(12)], axis=0)
    res = simulate(SimConfig(rates, p, horizon=4000, seed=9, replications=12))
    exact = np.concatenate([line_ages(3, rates).ages, [ring_node_age(3, rates)] * 3])
    np.testing.assert_allclose(ref, exact, rtol=0.1)
    np.testing.assert_allclose(res.per_node_age, exact, rtol=0.05)


# --- against the analytic engine -------------------------------------------

def test_isolated_nodes():
    rates = R(4)
    res = simulate(SimConfig(rates, Partition([Ring(1)] * 4, 4), horizon=25000, seed=1, replications=20))
    assert abs(res.system_age - 4.0) <= 3 * res.std_error
    assert res.rel_std_error < 0.02


def test_full_ring():
    rates = R(16)
    res = simulate(SimConfig(rates, Partition([Ring(16)], 16), horizon=5000, seed=2, replications=20))
    assert abs(res.system_age - ring_node_age(16, rates)) <= 3 * res.std_error


def test_two_lines_ordering_and_sandwich():
    rates = R(8)
    p = Partition([Line(4), Line(4)], 8)
    res = simulate(SimConfig(rates, p, horizon=20000, seed=3, replications=20))
    se = per_node_se(res)
    a = res.per_node_age
    for seg in (a[:4], a[4:]):
        assert seg[0] + 3 * se.max() >= seg[1]
        assert seg[3] + 3 * se.max() >= seg[2]
    lo = system_age(to_miniring_model(p), rates)
    assert lo - 3 * res.std_error <= res.system_age <= 2 * lo + 3 * res.std_error
    assert abs(res.system_age - system_age(p, rates)) <= 3 * res.std_error


def test_placement_input_resolves_to_lines():
    rates = R(8)
    cfg = SimConfig(rates, JammerPlacement({0, 4}), horizon=100, seed=0, replications=2)
    assert cfg.resolved_partition() == Partition([Line(4), Line(4)], 8)
    assert simulate(cfg).per_node_age.shape == (8,)


FAMILY_ALPHA = 1e-3
SHAPES = [(kind, k, n) for n in (32, 64) for k in (1, 2, 3, 5, 8, 16, 32) for kind in (Line, Ring)]
ALL_SHAPES = [(kind, k, n) for n in (32, 64) for k in range(1, 33) for kind in (Line, Ring)]


def _check_segment(kind, k, n):
    rates = R(n)
    seg = kind(k)
    rest = [] if k == n else [Ring(n - k)]
    p = Partition([seg] + rest, n)
    exact = segment_ages(seg, rates).ages
    seed = 1000 * n + 2 * k + (kind is Ring)
    res = simulate_to_precision(
        SimConfig(rates, p, horizon=40 * n, seed=seed, replications=20),
        rel_se=0.009, nodes=slice(0, k))
    sim = res.per_node_age[:k]
    se = per_node_se(res)[:k]
    seg_se = res.replication_ages[:, :k].mean(axis=1).std(ddof=1) / math.sqrt(20)
    assert np.all(se <= 0.01 * exact)
    # SEs come from 20 replications, so compare against Student-t quantiles
    # with a 0.1% false-alarm rate per cell; per node, Bonferroni over k nodes
    dof = res.replication_ages.shape[0] - 1
    assert abs(sim.mean() - exact.mean()) <= student_t.ppf(1 - FAMILY_ALPHA / 2, dof) * seg_se
    assert np.all(np.abs(sim - exact) <= student_t.ppf(1 - FAMILY_ALPHA / (2 * k), dof) * se)


@pytest.mark.parametrize("kind, k, n", SHAPES)
def test_segment_unbiased(kind, k, n):
    _check_segment(kind, k, n)


@pytest.mark.slow
@pytest.mark.parametrize("kind, k, n", [s for s in ALL_SHAPES if s not in SHAPES])
def test_segment_unbiased_full_grid(kind, k, n):
    _check_segment(kind, k, n)


def test_adding_cut_does_not_lower_age():
    rates = R(24)
    base = JammerPlacement({0, 12})
    more = JammerPlacement({0, 6, 12})
    kw = dict(horizon=8000, seed=4, replications=20)
    a = simulate(SimConfig(rates, base, **kw))
    b = simulate(SimConfig(rates, more, **kw))
    diff = b.replication_ages.mean(axis=1) - a.replication_ages.mean(axis=1)
    se = diff.std(ddof=1) / math.sqrt(len(diff))
    assert diff.mean() >= -3 * se


# --- contract -----------------------------------------------------------------

def test_deterministic():
    cfg = SimConfig(R(10), Partition([Line(6), Ring(4)], 10), horizon=500, seed=42, replications=3)
    a, b = simulate(cfg), simulate(cfg)
    assert a.per_node_age.tobytes() == b.per_node_age.tobytes()
    assert a.system_age == b.system_age and a.ci_halfwidth == b.ci_halfwidth
    assert a.events_processed == b.events_processed
    c = simulate(SimConfig(R(10), cfg.partition, horizon=500, seed=43, replications=3))
    assert c.system_age != a.system_age


def test_result_fields():
    res = simulate(SimConfig(R(6), Partition([Ring(6)], 6), horizon=300, seed=1, replications=4))
    assert res.system_age == pytest.approx(res.per_node_age.mean())
    assert res.ci_halfwidth == pytest.approx(1.96 * res.std_error) and res.ci_halfwidth >= 0
    assert res.events_processed > 0
    assert "PCG64" in res.metadata["rng"]
    one = simulate(SimConfig(R(6), Partition([Ring(6)], 6), horizon=300, seed=1, replications=1))
    assert one.ci_halfwidth == 0.0


def test_default_warmup():
    assert SimConfig(R(3), Partition([Ring(3)], 3), horizon=50).warmup == 5.0


@pytest.mark.parametrize("kwargs", [dict(horizon=0), dict(horizon=10, warmup=10), dict(replications=0)])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        SimConfig(R(3), Partition([Ring(3)], 3), **kwargs)


def test_config_rejects_mismatched_partition():
    with pytest.raises(ValueError):
        SimConfig(R(4), Partition([Ring(3)], 3))
    with pytest.raises(ValueError):
        SimConfig(R(4), JammerPlacement({4}))


def test_simulate_to_precision_extends_horizon():
    cfg = SimConfig(R(8), Partition([Ring(1)] * 8, 8), horizon=200, seed=5, replications=10)
    res = simulate_to_precision(cfg, rel_se=0.03)
    assert res.rel_std_error <= 0.03
    assert res.metadata["horizon"] > 200
