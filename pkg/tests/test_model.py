import pytest
from hypothesis import given, strategies as st

from ringgossip.model import (
    JammerPlacement,
    Line,
    Partition,
    Rates,
    Ring,
    partition_from_placement,
    to_miniring_model,
)


def test_rates_derived():
    r = Rates(2.0, 3.0, 6)
    assert r.source_rate == 0.5
    assert r.link_rate == 1.5
    assert r.ratio == pytest.approx(2 / 3)


@pytest.mark.parametrize("kwargs", [dict(lambda_s=0), dict(lambda_=-1), dict(n=0), dict(n=2.5)])
def test_rates_rejects(kwargs):
    with pytest.raises(ValueError):
        Rates(**kwargs)


@pytest.mark.parametrize("n, cuts, expected", [
    (8, {0, 4}, [Line(4), Line(4)]),
    (8, set(), [Ring(8)]),
    (6, {0, 1, 2}, [Line(1), Line(1), Line(4)]),
])
def test_partition_from_placement(n, cuts, expected):
    p = partition_from_placement(JammerPlacement(cuts), n)
    assert list(p.segments) == expected


def test_partition_segment_order_follows_ring():
    p = partition_from_placement(JammerPlacement([5, 1]), 8)
    # nodes 2..5 then 6,7,0,1
    assert [s.size for s in p.segments] == [4, 4]
    p = partition_from_placement(JammerPlacement([1, 2]), 8)
    assert [s.size for s in p.segments] == [1, 7]


def test_partition_rejects_bad_input():
    with pytest.raises(ValueError):
        partition_from_placement(JammerPlacement({8}), 8)
    with pytest.raises(ValueError):
        partition_from_placement(JammerPlacement(), 0)
    with pytest.raises(ValueError):
        Partition([Line(3)], 4)


def test_duplicate_cuts_merge():
    assert JammerPlacement([3, 3, 1]).n_jammers == 2


def test_every_link_cut_gives_isolated_nodes():
    p = partition_from_placement(JammerPlacement(range(5)), 5)
    assert p.sizes() == [1] * 5


def test_partition_equality_is_order_free():
    assert Partition([Line(5), Line(3)], 8) == Partition([Line(3), Line(5)], 8)
    assert Partition([Line(5), Line(3)], 8) != Partition([Ring(5), Ring(3)], 8)


@pytest.mark.parametrize("before, after", [
    ([Line(4), Line(4)], [Ring(4), Ring(4)]),
    ([Line(1)], [Ring(1)]),
    ([Line(5), Line(3)], [Ring(5), Ring(3)]),
])
def test_to_miniring_model(before, after):
    n = sum(s.size for s in before)
    p = to_miniring_model(Partition(before, n))
    assert list(p.segments) == after
    assert to_miniring_model(p) == p


def test_isolated_segments_share_age_key():
    assert Line(1).age_key() == Ring(1).age_key()
    assert Line(2).age_key() != Ring(2).age_key()


@given(st.integers(1, 60).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.integers(0, n - 1), min_size=1), st.integers(0, n - 1))))
def test_partition_rotation_equivariant(args):
    n, cuts, r = args
    pl = JammerPlacement(cuts)
    p = partition_from_placement(pl, n)
    q = partition_from_placement(pl.rotated(r, n), n)
    assert p.sizes() == q.sizes()
    assert len(p) == len(cuts)
    assert sum(p.sizes()) == n
    assert all(s.kind.value == "line" for s in p)
