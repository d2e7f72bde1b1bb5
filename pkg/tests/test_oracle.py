import pytest
from hypothesis import given, strategies as st

from filterlab.oracle import (
    TruncSet, TruncatedUniverse, oracle_cn, oracle_measure, oracle_pseudointersection,
)


def periodic(bits: str) -> TruncSet:
    return TruncSet(tuple(b == "1" for b in bits), "periodic")


def test_universe_limits():
    TruncatedUniverse(24)
    with pytest.raises(ValueError):
        TruncatedUniverse(25)
    with pytest.raises(ValueError):
        oracle_measure([5, 5, 5, 5, 5])


def test_evens_is_valid_for_evens():
    r = oracle_pseudointersection([periodic("10")], [[0, 1]], 2)
    assert r.hypotheses_hold and r.is_valid([True, False])
    assert not r.is_valid([True, True])


def test_evens_and_odds_have_no_pseudointersection():
    r = oracle_pseudointersection([periodic("10"), periodic("01")], [[0, 1]], 2)
    assert not r.hypotheses_hold
    assert len(r.valid_masks) == 0


def test_constant_tails():
    full = TruncSet((False, False), "full")
    r = oracle_pseudointersection([full], [[0, 1]], 2)
    assert r.hypotheses_hold and len(r.valid_masks) == 3


def test_cn_scan():
    # blocks [0], [1, 2], [3, 4, 5]; limit value 0
    assert oracle_cn([0, 1, 0, 1, 1, 0], 0, 0, 0, [1, 2, 3])
    assert not oracle_cn([0, 1, 1, 1, 1, 0], 0, 0, 0, [1, 2, 3])
    assert oracle_cn([0, 1, 1, 1, 1, 0], 0, 0, 2, [1, 2, 3])
    assert not oracle_cn([0], 1, 0, 5, [1])
    with pytest.raises(ValueError):
        oracle_cn([0, 0, 0], 0, 0, 0, [1])


@given(st.lists(st.integers(1, 4), min_size=1, max_size=5))
def test_measure_is_product_of_block_factors(sizes):
    from fractions import Fraction
    expected = Fraction(1)
    for s in sizes:
        expected *= 1 - Fraction(1, 2 ** s)
    assert oracle_measure(sizes) == expected


@given(st.text("01", min_size=2, max_size=8), st.text("01", min_size=2, max_size=8))
def test_valid_candidates_are_almost_contained(g, blockbits):
    N = min(len(g), len(blockbits))
    g, blockbits = g[:N], blockbits[:N]
    pts = [p for p in range(N) if blockbits[p] == "1"]
    if not pts:
        return
    r = oracle_pseudointersection([periodic(g)], [pts], N)
    for m in r.valid_masks:
        chosen = [p for j, p in enumerate(r.points) if m >> j & 1]
        assert chosen and all(g[p] == "1" for p in chosen)
