"""Nowhere density of the sets

    C_n = {f : for every m >= n some k in block m has f(x_k) = f(inf)}

in C_p(X, 2) for a filter space X = ω ∪ {inf} and a sequence x_k converging
to inf along a xi-meager filter.  Functions are given by finite exceptions
plus a filter-set tail; the engine answers any basic open set with a
refinement that misses C_n.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .convergence import INF_POINT, FilterSpace, Identity, Point, parse_sequence
from .filters import Induced, filter_member
from .partition import BlockPartition
from .sets import (
    And, Cofinite, Finite, IndexSet, Not, Or, SetDescription, blocks_hit_from, form_of,
    hit_threshold, omega,
)
from .verdict import Verdict, jsonable

SCHEMA = "filterlab.cpgame.transcript/1"


def _key(p: Point):
    return (1, 0) if p == INF_POINT else (0, p)


@dataclass(frozen=True)
class BasicOpenSet:
    """{f : f(p) = b for every (p, b) in constraints}."""

    constraints: tuple[tuple[Point, int], ...] = ()

    def __post_init__(self):
        seen = {}
        for p, b in self.constraints:
            if b not in (0, 1):
                raise ValueError("constraint values are bits")
            if p in seen and seen[p] != b:
                raise ValueError(f"contradictory constraints at {p}")
            seen[p] = b
        object.__setattr__(self, "constraints", tuple(sorted(seen.items(), key=lambda t: _key(t[0]))))

    def as_dict(self) -> dict:
        return dict(self.constraints)

    @property
    def points(self) -> set:
        return {p for p, _ in self.constraints if p != INF_POINT}

    def refines(self, other: "BasicOpenSet") -> Optional[tuple[Point, int]]:
        """None when self ⊆ other; else a constraint of other that self breaks."""
        mine = self.as_dict()
        for p, b in other.constraints:
            if mine.get(p) != b:
                return (p, b)
        return None

    def extend(self, more: dict) -> "BasicOpenSet":
        return BasicOpenSet(tuple(self.as_dict().items()) + tuple(more.items()))

    def to_json(self) -> list:
        return [[p, b] for p, b in self.constraints]

    @classmethod
    def from_json(cls, data) -> "BasicOpenSet":
        return cls(tuple((p if p == INF_POINT else int(p), int(b)) for p, b in data))


@dataclass(frozen=True)
class ContinuousWitness:
    """f(p) = exceptions[p] on the listed points, f = value on tail ∪ {inf},
    f = 1 - value elsewhere.  Continuous when tail is in the neighborhood
    filter."""

    exceptions: tuple[tuple[int, int], ...] = ()
    value: int = 0
    tail: SetDescription = field(default_factory=omega)

    def __post_init__(self):
        object.__setattr__(self, "exceptions", tuple(sorted(dict(self.exceptions).items())))

    def __call__(self, p: Point) -> int:
        if p == INF_POINT:
            return self.value
        e = dict(self.exceptions)
        if p in e:
            return e[p]
        return self.value if self.tail.member(p) else 1 - self.value

    def agreement(self) -> SetDescription:
        """{p in ω : f(p) = f(inf)}."""
        pts = tuple(p for p, _ in self.exceptions)
        same = tuple(p for p, b in self.exceptions if b == self.value)
        return Or((And((self.tail, Not(Finite(pts)))), Finite(same)))

    def continuity(self, space: FilterSpace) -> Verdict:
        return filter_member(space.neighborhood_filter, self.tail)

    def to_json(self) -> dict:
        return {"exceptions": [list(e) for e in self.exceptions], "value": self.value,
                "tail": self.tail.render()}


def witness_of(U: BasicOpenSet) -> ContinuousWitness:
    """Some continuous function in U: U's values on its points, constant
    U(inf) (default 0) everywhere else."""
    d = U.as_dict()
    v = d.get(INF_POINT, 0)
    return ContinuousWitness(tuple((p, b) for p, b in d.items() if p != INF_POINT), v,
                             Cofinite(tuple(sorted(U.points))))


def cn_member(f: ContinuousWitness, n: int, P: BlockPartition, seq=None, horizon: int = 10_000) -> Verdict:
    """Is f ∈ C_n?  Exact when the agreement indices have a closed form;
    otherwise blocks inside the horizon are scanned (which can only refute)."""
    seq = seq or Identity()
    agree = IndexSet(seq, f.agreement())
    v = blocks_hit_from(agree, P, n)
    if not v.unknown_:
        return Verdict(v.status, {"n": n, **v.certificate}, v.horizon)
    m = n
    while P.start(m) < horizon:
        if not any(f(seq(k)) == f.value for k in P.block(m)):
            return Verdict.refuted(n=n, block=m, note="every point of the block disagrees with the limit")
        m += 1
    return Verdict.unknown(horizon, n=n)


class NotContinuous(ValueError):
    pass


def decomposition_index(f: ContinuousWitness, P: BlockPartition, seq=None,
                        space: Optional[FilterSpace] = None) -> tuple[int, Verdict]:
    """The least n with f ∈ C_n: the agreement index set is in the
    convergence filter, hence meets all blocks from some point on."""
    seq = seq or Identity()
    space = space or FilterSpace()
    agree = IndexSet(seq, f.agreement())
    member = filter_member(Induced(seq, space.neighborhood_filter), agree)
    if member.refuted_:
        raise NotContinuous("the agreement set is not in the filter: f is not continuous at inf "
                            "with this value")
    if not member.proved_:
        return -1, Verdict.unknown(0, reason="filter membership of the agreement set is undecided")
    try:
        t = hit_threshold(agree, P)
    except LookupError as e:
        return -1, Verdict.unknown(0, reason=str(e))
    if t is None:
        raise ValueError("the agreement set misses infinitely many blocks; the filter is not "
                         "meager for this partition")
    return t, Verdict.proved(n=t, agreement_member=member.certificate)


def avoidance_move(U: BasicOpenSet, n: int, P: BlockPartition, seq=None, horizon: int = 10 ** 6):
    """V ⊆ U missing C_n: flip a whole block m >= n of sequence points, away
    from U's constrained points, to the value opposite f(inf)."""
    seq = seq or Identity()
    w0 = witness_of(U)
    v = w0.value
    U1 = U.extend({INF_POINT: v})
    dom = U1.points
    m = n
    while True:
        if P.start(m) >= horizon:
            raise RuntimeError("no block disjoint from the constrained points within the horizon")
        pts = [seq(k) for k in P.block(m)]
        if INF_POINT not in pts and not dom.intersection(pts):
            break
        m += 1
    V = U1.extend({p: 1 - v for p in pts})
    return V, witness_of(V), m


class InvalidMove(ValueError):
    def __init__(self, round_: int, constraint):
        super().__init__(f"round {round_}: adversary move drops or contradicts {constraint}")
        self.round, self.constraint = round_, constraint


def seeded_adversary(seed: int, spread: int = 60) -> Callable[[int, BasicOpenSet], BasicOpenSet]:
    rng = random.Random(seed)

    def move(r: int, prev: BasicOpenSet) -> BasicOpenSet:
        d = prev.as_dict()
        if INF_POINT not in d and rng.random() < 0.5:
            d[INF_POINT] = rng.randint(0, 1)
        for _ in range(rng.randint(0, 3)):
            p = rng.randrange(spread * (r + 1))
            d.setdefault(p, rng.randint(0, 1))
        return BasicOpenSet(tuple(d.items()))

    return move


def scripted_adversary(moves: Sequence[BasicOpenSet]):
    def move(r: int, prev: BasicOpenSet) -> BasicOpenSet:
        return moves[r]
    return move


@dataclass
class GameTranscript:
    sizes: str
    sequence: str
    seed: Optional[int]
    rounds: list = field(default_factory=list)
    final_witness: Optional[dict] = None
    final_checks: list = field(default_factory=list)

    def to_json(self) -> dict:
        return jsonable({"schema": SCHEMA, "sizes": self.sizes, "sequence": self.sequence,
                         "seed": self.seed, "rounds": self.rounds,
                         "final_witness": self.final_witness, "final_checks": self.final_checks})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")) + "\n"


def play_game(adversary, rounds: int, P: BlockPartition, seq=None, seed: Optional[int] = None,
              horizon: int = 10 ** 6) -> GameTranscript:
    """Round r: the adversary refines the engine's last move, the engine
    answers with a refinement missing C_r."""
    seq = seq or Identity()
    T = GameTranscript(P.render(), seq.render(), seed)
    prev = BasicOpenSet()
    w = witness_of(prev)
    for r in range(rounds):
        U = adversary(r, prev)
        bad = U.refines(prev)
        if bad is not None:
            raise InvalidMove(r, bad)
        V, w, m = avoidance_move(U, r, P, seq, horizon)
        check = cn_member(w, r, P, seq)
        T.rounds.append({"round": r, "adversary": U.to_json(), "engine": V.to_json(), "avoided": r,
                         "block": m, "witness": w.to_json(), "certificate": check.to_json()})
        prev = V
    T.final_witness = w.to_json()
    T.final_checks = [cn_member(w, r, P, seq).status.value for r in range(rounds)]
    return T


class TranscriptMismatch(ValueError):
    pass


def verify_transcript(text: str) -> Verdict:
    """Replay a transcript and compare byte for byte; also re-check
    refinement and every certificate.  The adversary is regenerated from
    the recorded seed, or taken from the recorded moves when there is none."""
    data = json.loads(text)
    if data.get("schema") != SCHEMA:
        return Verdict.refuted(reason=f"unknown schema {data.get('schema')!r}")
    P = BlockPartition.parse(data["sizes"])
    seq = parse_sequence(data["sequence"])
    moves = [BasicOpenSet.from_json(r["adversary"]) for r in data["rounds"]]
    seed = data.get("seed")
    # a recorded seed must regenerate the adversary's moves
    adversary = scripted_adversary(moves) if seed is None else seeded_adversary(seed)
    try:
        T = play_game(adversary, len(moves), P, seq, seed)
    except InvalidMove as e:
        return Verdict.refuted(reason=str(e), round=e.round)
    replay = T.dumps()
    if replay != text:
        a, b = replay.splitlines(), text.splitlines()
        line = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), min(len(a), len(b)))
        return Verdict.refuted(reason="replay differs", line=line + 1)
    for r in T.rounds:
        U, V = BasicOpenSet.from_json(r["adversary"]), BasicOpenSet.from_json(r["engine"])
        if V.refines(U) is not None:
            return Verdict.refuted(reason="engine move does not refine", round=r["round"])
        if r["certificate"]["status"] != "refuted":
            return Verdict.refuted(reason="engine witness not outside C_r", round=r["round"])
    if any(s != "refuted" for s in T.final_checks):
        return Verdict.refuted(reason="final witness lies in some C_r")
    return Verdict.proved(rounds=len(T.rounds), bytes=len(text))
