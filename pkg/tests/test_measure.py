from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from filterlab.measure import (
    DyadicInterval, block_family_measure, choose_null_meager_partition, factors_below,
    is_null_certificate, monte_carlo_measure, partial_product, tail_sum_bound,
)
from filterlab.oracle import oracle_measure
from filterlab.partition import BlockPartition

P = BlockPartition.parse


def test_unit_blocks_halve_each_factor():
    for m in range(1, 21):
        assert partial_product(P("const:1"), 0, m) == Fraction(1, 2 ** m)


def test_linear_sizes_enclose_the_infinite_product():
    I = block_family_measure(P("n+1"), 0, 60)
    assert I.width < Fraction(1, 10 ** 9)
    # independent value of prod_{j>=1} (1 - 2^-j) from the q-Pochhammer symbol
    with mpmath.workdps(60):
        ref = mpmath.qp(mpmath.mpf(1) / 2)
        lo, hi = (Fraction(mpmath.nstr(ref + d, 55)) for d in (-mpmath.mpf(10) ** -50, mpmath.mpf(10) ** -50))
    assert I.lower <= hi and lo <= I.upper


def test_tail_bounds():
    # sizes 6, 7, ... from block 5 on: sum 2^-6 + 2^-7 + ... = 2^-5
    assert tail_sum_bound(P("n+1"), 5) == Fraction(1, 32)
    assert tail_sum_bound(P("const:2"), 5) is None
    assert tail_sum_bound(P("log2+2"), 5) is None


def test_null_certificates():
    v = is_null_certificate(P("log2+2"))
    assert v.proved_ and v.certificate["factors"] == 394
    assert partial_product(P("log2+2"), 0, 394) < Fraction(1, 100) <= partial_product(P("log2+2"), 0, 393)
    assert is_null_certificate(P("const:3")).proved_
    v = is_null_certificate(P("n+1"))
    assert v.refuted_ and v.certificate["lower_bound"]["decimal"] == "0.25"


def test_chosen_partition_is_null_and_unbounded():
    Q = choose_null_meager_partition()
    assert Q.unbounded and is_null_certificate(Q).proved_
    assert Q.sizes(7) == [1, 2, 2, 3, 3, 3, 3]


def test_factors_below_is_minimal():
    n = factors_below(P("const:3"), 0, Fraction(1, 100))
    assert partial_product(P("const:3"), 0, n) < Fraction(1, 100) <= partial_product(P("const:3"), 0, n - 1)


def test_dyadic_interval_validation():
    with pytest.raises(ValueError):
        DyadicInterval(Fraction(1, 3), Fraction(1, 2))
    with pytest.raises(ValueError):
        DyadicInterval(Fraction(1, 2), Fraction(1, 4))


@pytest.mark.parametrize("sizes,expected", [((2,), Fraction(3, 4)), ((1, 2), Fraction(3, 8)),
                                            ((1, 1, 1), Fraction(1, 8))])
def test_oracle_examples(sizes, expected):
    assert oracle_measure(sizes) == expected


@given(st.sampled_from(["const:1", "const:2", "n+1", "log2+2", "2;pow2+0", "1/3;const:2"]),
       st.integers(0, 4), st.integers(1, 6))
def test_partial_products_match_the_oracle(text, n, factors):
    Q = P(text)
    sizes = [Q.size(n + j) for j in range(factors)]
    if sum(sizes) > 24:
        return
    assert partial_product(Q, n, factors) == oracle_measure(sizes)


@given(st.sampled_from(["n+1", "n+3", "1/2/3;n+2"]), st.integers(0, 5), st.integers(1, 40))
def test_enclosures_contain_later_partial_products(text, n, factors):
    Q = P(text)
    I = block_family_measure(Q, n, factors)
    assert I.contains(partial_product(Q, n, factors + 30))


@given(st.integers(0, 3), st.integers(1, 80))
def test_huge_blocks_stay_enclosed(n, factors):
    # blocks of 2^k points: only the first few factors are multiplied out
    Q = P("2;pow2+0")
    I = block_family_measure(Q, n, factors)
    k = min(factors, 6)
    lo = partial_product(Q, n, k) * (1 - tail_sum_bound(Q, n + k))
    assert I.lower <= partial_product(Q, n, k) and lo <= I.upper
    if factors >= 8:
        assert I.width < Fraction(1, 2 ** 60)


@given(st.integers(0, 2 ** 32))
def test_monte_carlo_single_block(seed):
    est = monte_carlo_measure(P("const:2"), 0, 1, 2000, seed)
    assert abs(est.estimate - 0.75) <= 5 * est.stderr + 1e-9


def test_monte_carlo_is_reproducible():
    a = monte_carlo_measure(P("n+1"), 0, 10, 5000, 7)
    b = monte_carlo_measure(P("n+1"), 0, 10, 5000, 7)
    assert a == b
