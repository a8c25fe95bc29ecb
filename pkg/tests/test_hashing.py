import pytest

from s2net.hashing import FlowTuple, hash_unit_interval, stable_hash64
from s2net.routing import key_hash


def test_stable_hash_regressions():
    # pinned so a silent generator change cannot slip through
    assert stable_hash64(b"abc") == 3780618806051146870
    assert FlowTuple(src=1, dst=2, sport=1000, dport=80,
                     proto=6).hash64() == 14677530117141451328


def test_key_hash_pinned():
    assert key_hash("standard-test-key", 1) == pytest.approx(
        0.2783702711277053, abs=0)
    assert key_hash("standard-test-key", 2) == pytest.approx(
        0.946493217901689, abs=0)


def test_key_hash_properties():
    for r in range(1, 8):
        v = key_hash(b"some-key", r)
        assert 0.0 <= v < 1.0
        assert v == key_hash(b"some-key", r)
    assert key_hash("k", 1) != key_hash("k", 2)
    with pytest.raises(ValueError):
        key_hash("k", 0)


def test_hash_unit_interval_spread():
    vals = {hash_unit_interval(bytes([i]), seed=0) for i in range(64)}
    assert len(vals) == 64


def test_flow_tuple_identity():
    a = FlowTuple(src=10, dst=20, sport=5000, dport=80)
    b = FlowTuple(src=10, dst=20, sport=5000, dport=80)
    c = FlowTuple(src=10, dst=20, sport=5001, dport=80)
    assert a == b and a.hash64() == b.hash64()
    assert a.hash64() != c.hash64()
