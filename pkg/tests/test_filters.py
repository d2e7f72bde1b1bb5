from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from filterlab.expr import ParseError, parse_filter, parse_set
from filterlab.filters import (
    Frechet, FubiniFrFr, NotInCoideal, Summable, coideal_member, filter_member,
    find_meagerness_witness, is_xi_meager, pushforward, restrict, verify_filter_verdict,
    verify_meagerness_witness,
)
from filterlab.partition import BlockPartition
from filterlab.sets import Cofinite, Finite, PairedRowRule, empty, evens, odds, omega

from .strategies import set_descriptions

harmonic = Summable("harmonic")


def test_frechet_membership():
    assert filter_member(Frechet(), Cofinite((5,))).proved_
    assert filter_member(Frechet(), evens()).refuted_


def test_density_filter_contains_all_but_first():
    F = parse_filter("density(blocks=dyadic)")
    v = filter_member(F, parse_set("blocks(sizes=dyadic,rule=allbutfirst(1))"))
    assert v.proved_ and v.certificate["limit"] == 1


def test_geometric_weights():
    v = filter_member(Summable("geometric"), evens())
    # independent check: odd-indexed terms 1/2 + 1/8 + ... = (1/2) / (1 - 1/4)
    assert v.proved_ and v.certificate["value"] == Fraction(1, 2) / (1 - Fraction(1, 4))
    assert not Summable("geometric").proper


def test_harmonic_weights():
    assert filter_member(harmonic, evens()).refuted_
    assert coideal_member(harmonic, evens()).proved_
    assert coideal_member(harmonic, Finite(tuple(range(50)))).refuted_


def test_coideal_examples():
    assert coideal_member(Frechet(), odds()).proved_
    v = coideal_member(FubiniFrFr(), parse_set("rows:first(1)"))
    assert v.refuted_
    B = v.certificate["blocking_set"]
    assert filter_member(FubiniFrFr(), B).proved_
    assert not any(B.member((n, 0)) for n in range(50))


def test_pushforward_examples():
    assert pushforward(Frechet(), BlockPartition.parse("n+1")) == Frechet()
    first = parse_filter("gen(blocks(sizes=n+1,rule=first(1)))")
    assert filter_member(pushforward(first, BlockPartition.parse("n+1")), omega()).proved_
    # a base meeting only even-indexed blocks pushes forward onto a filter holding the evens
    P = BlockPartition.parse("const:2")
    G = pushforward(parse_filter("gen(pre(evens,sizes=const:2))"), P)
    assert filter_member(G, evens()).proved_
    assert filter_member(G, odds()).refuted_


def test_restriction():
    assert restrict(Frechet(), evens()).render() == "restrict(frechet,blocks(sizes=const:2,rule=first(1)))"
    R = restrict(harmonic, evens())
    assert filter_member(R, empty()).refuted_
    with pytest.raises(NotInCoideal):
        restrict(Frechet(), Finite((0, 1, 2)))


def test_meagerness_witnesses():
    v = find_meagerness_witness(Frechet(), 100)
    assert v.proved_ and v.certificate["witness"]["intervals"][:3] == [[0, 1], [1, 2], [2, 3]]
    assert verify_meagerness_witness(Frechet(), v)
    v = find_meagerness_witness(harmonic, 10_000)
    assert v.proved_ and verify_meagerness_witness(harmonic, v)
    assert all(float(w) > 1 for w in v.certificate["witness"]["interval_weights"])
    F = parse_filter("gen(evens)")
    v = find_meagerness_witness(F, 10)
    ivs = v.certificate["witness"]["intervals"]
    assert ivs[0] == [0, 1] and all(b - a == 2 for a, b in ivs[1:])
    assert verify_meagerness_witness(F, v)


def test_xi_meager():
    assert is_xi_meager(Frechet(), BlockPartition.parse("n+1")).proved_
    assert is_xi_meager(parse_filter("density(blocks=dyadic)"), BlockPartition.dyadic()).proved_


def test_filter_parse_errors():
    with pytest.raises(ParseError, match="<<HERE>>bogus"):
        parse_filter("bogus")
    with pytest.raises(ParseError, match="position 10"):
        parse_set("and(evens,")


@given(set_descriptions)
def test_frechet_verdicts_verify(A):
    v = filter_member(Frechet(), A)
    assert verify_filter_verdict(Frechet(), A, v)


@given(set_descriptions)
def test_frechet_filter_and_coideal_are_dual(A):
    # A is in the co-ideal iff its complement is not in the filter
    from filterlab.sets import Not
    a, b = coideal_member(Frechet(), A), filter_member(Frechet(), Not(A))
    if not (a.unknown_ or b.unknown_):
        assert a.proved_ == b.refuted_


@given(set_descriptions)
def test_filter_members_are_in_the_coideal(A):
    for F in (Frechet(), harmonic, parse_filter("density(blocks=dyadic)")):
        if filter_member(F, A).proved_:
            assert not coideal_member(F, A).refuted_


@given(st.integers(0, 6), st.integers(0, 40))
def test_fubini_rows(shift_from, bound):
    A = PairedRowRule(Cofinite(tuple(range(bound))), False, shift_from, ())
    assert filter_member(FubiniFrFr(), A).proved_
