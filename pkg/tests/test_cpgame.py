import json
import random

import pytest
from hypothesis import given, strategies as st

from filterlab.convergence import INF_POINT
from filterlab.cpgame import (
    BasicOpenSet, ContinuousWitness, InvalidMove, NotContinuous, avoidance_move, cn_member,
    decomposition_index, play_game, scripted_adversary, seeded_adversary, verify_transcript,
)
from filterlab.oracle import oracle_cn
from filterlab.partition import BlockPartition
from filterlab.sets import Cofinite, empty, evens, omega

linear = BlockPartition.parse("n+1")


def test_constant_function_is_in_every_piece():
    f = ContinuousWitness((), 0, omega())
    assert cn_member(f, 0, linear).proved_
    assert decomposition_index(f, linear)[0] == 0


def test_disagreeing_tail_is_never_in():
    # f(inf) = 0 and f = 1 on every point from block 3 on
    f = ContinuousWitness(tuple((k, 0) for k in range(linear.start(3))), 0, empty())
    assert all(cn_member(f, n, linear).refuted_ for n in range(6))


def test_flipping_one_block():
    g = ContinuousWitness(tuple((k, 1) for k in linear.block(4)), 0, omega())
    assert cn_member(g, 4, linear).refuted_
    assert cn_member(g, 5, linear).proved_
    assert decomposition_index(g, linear)[0] == 5


def test_disagreement_on_first_blocks():
    f = ContinuousWitness((), 0, Cofinite(tuple(range(linear.start(5)))))
    n, v = decomposition_index(f, linear)
    assert n == 5 and v.proved_


def test_discontinuous_functions_are_rejected():
    with pytest.raises(NotContinuous):
        decomposition_index(ContinuousWitness((), 0, evens()), linear)


def test_avoidance_examples():
    V, w, m = avoidance_move(BasicOpenSet(((INF_POINT, 0),)), 0, linear)
    assert m == 0 and V.as_dict() == {0: 1, INF_POINT: 0}
    assert w(0) == 1 and all(w(k) == 0 for k in range(1, 30))
    U = BasicOpenSet(tuple((k, 1) for k in range(6)))
    V, w, m = avoidance_move(U, 1, linear)
    assert m == 3 and cn_member(w, 1, linear).refuted_


def test_contradictory_constraints():
    with pytest.raises(ValueError):
        BasicOpenSet(((1, 0), (1, 1)))


def test_one_round_game():
    T = play_game(scripted_adversary([BasicOpenSet(((INF_POINT, 0),))]), 1, linear)
    assert T.final_checks == ["refuted"]
    assert verify_transcript(T.dumps()).proved_


def test_five_round_seeded_game():
    T = play_game(seeded_adversary(11), 5, linear, seed=11)
    assert T.final_checks == ["refuted"] * 5
    assert all(r["certificate"]["status"] == "refuted" for r in T.rounds)


def test_adversary_cannot_drop_constraints():
    moves = [BasicOpenSet(((INF_POINT, 0),)), BasicOpenSet(((INF_POINT, 1),))]
    with pytest.raises(InvalidMove):
        play_game(scripted_adversary(moves), 2, linear)


def test_tampered_transcripts_fail():
    text = play_game(seeded_adversary(2), 3, linear, seed=2).dumps()
    data = json.loads(text)
    data["rounds"][1]["block"] += 1
    forged = json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
    assert verify_transcript(forged).refuted_
    data = json.loads(text)
    data["schema"] = "other"
    assert verify_transcript(json.dumps(data)).refuted_


def _random_member(rng: random.Random, V: BasicOpenSet, spread: int) -> ContinuousWitness:
    d = V.as_dict()
    v = d.get(INF_POINT, 0)
    exc = {p: b for p, b in d.items() if p != INF_POINT}
    for _ in range(rng.randint(0, 8)):
        exc.setdefault(rng.randrange(spread), rng.randint(0, 1))
    return ContinuousWitness(tuple(exc.items()), v, Cofinite(tuple(sorted(exc))))


@given(st.integers(0, 2 ** 32), st.integers(0, 6))
def test_avoidance_move_misses_the_piece(seed, n):
    rng = random.Random(seed)
    U = BasicOpenSet(tuple({rng.randrange(60): rng.randint(0, 1) for _ in range(rng.randint(0, 6))}.items()))
    V, w, m = avoidance_move(U, n, linear)
    assert V.refines(U) is None and m >= n
    for _ in range(50):
        g = _random_member(rng, V, 80)
        assert cn_member(g, n, linear).refuted_


@given(st.integers(0, 2 ** 32), st.integers(0, 5))
def test_cn_member_matches_the_scan(seed, n):
    rng = random.Random(seed)
    w = _random_member(rng, BasicOpenSet(((INF_POINT, rng.randint(0, 1)),)), 20)
    sizes = linear.sizes(8)
    values = [w(k) for k in range(sum(sizes))]
    assert cn_member(w, n, linear).proved_ == oracle_cn(values, w.value, w.value, n, sizes)


@given(st.integers(0, 2 ** 32))
def test_decomposition_index_is_least(seed):
    rng = random.Random(seed)
    w = _random_member(rng, BasicOpenSet(((INF_POINT, rng.randint(0, 1)),)), 40)
    n, v = decomposition_index(w, linear)
    assert v.proved_ and cn_member(w, n, linear).proved_
    assert n == 0 or cn_member(w, n - 1, linear).refuted_
