"""Spaces X = ω ∪ {inf} whose neighborhoods of inf are F ∪ {inf} for F in a
filter, sequences in them, and filter convergence.

Points are naturals or the string ``"inf"``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from . import forms
from .filters import (
    BlockDensity, FilterPresentation, Frechet, Induced, Summable, canonical_generators,
    filter_member,
)
from .forms import PPForm
from .partition import BlockPartition
from .pseudo import BoundedBlockInstance, InvalidInstance, lemma1_pseudointersection, verify_pseudointersection
from .sets import (
    BlockRule, Cofinite, Finite, IndexSet, Interval, Not, Or, Selector, SetDescription, form_of,
    is_cofinite, is_infinite, next_member, omega,
)
from .verdict import Verdict

Point = Union[int, str]
INF_POINT = "inf"


# -- sequences ----------------------------------------------------------------
@dataclass(frozen=True)
class Identity:
    """x_k = k."""

    is_identity = True

    def __call__(self, k: int) -> Point:
        return k

    def index_form(self, target: SetDescription):
        return form_of(target)

    def render(self) -> str:
        return "identity"


@dataclass(frozen=True)
class Constant:
    point: Point = 0

    def __call__(self, k: int) -> Point:
        return self.point

    def index_form(self, target: SetDescription):
        return PPForm.const(self.point != INF_POINT and target.member(self.point))

    def render(self) -> str:
        return f"const({self.point})"


@dataclass(frozen=True, eq=True)
class Theorem1Sequence:
    """Block by block: the least unused point of N_0, N_1, ... for the first
    |block| slots (as far as the network goes), then the least unused natural
    for the remaining slots.  Materialized lazily."""

    network: tuple[SetDescription, ...]
    partition: BlockPartition
    search_limit: int = 10 ** 7
    _state: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "network", tuple(self.network))
        self._state.update(points=[], used=set(), cursor=[0] * len(self.network), fresh=0,
                           picks={}, blocks=0)

    def _grow(self, upto_block: int):
        st = self._state
        pts, used = st["points"], st["used"]
        while st["blocks"] <= upto_block:
            m = st["blocks"]
            size = self.partition.size(m)
            for i in range(min(size, len(self.network))):
                c = st["cursor"][i]
                while True:
                    p = next_member(self.network[i], c, c + self.search_limit)
                    if p is None:
                        raise CollisionExhausted(m, i)
                    if p not in used:
                        break
                    c = p + 1
                st["cursor"][i] = p + 1
                used.add(p)
                st["picks"][(i, m)] = len(pts)
                pts.append(p)
            for _ in range(size - min(size, len(self.network))):
                while st["fresh"] in used:
                    st["fresh"] += 1
                used.add(st["fresh"])
                pts.append(st["fresh"])
            st["blocks"] += 1

    def __call__(self, k: int) -> Point:
        if k >= len(self._state["points"]):
            self._grow(self.partition.block_of(k))
        return self._state["points"][k]

    def prefix(self, count: int) -> list[int]:
        if count:
            self(count - 1)
        return self._state["points"][:count]

    def pick(self, i: int, m: int) -> Optional[int]:
        """The index k in block m at which a point of N_i was placed."""
        self._grow(m)
        return self._state["picks"].get((i, m))

    def render(self) -> str:
        return f"theorem1([{','.join(N.render() for N in self.network)}],{self.partition.render()})"


class CollisionExhausted(RuntimeError):
    def __init__(self, block: int, i: int):
        super().__init__(f"no unused point of N_{i} for block {block} within the search limit")
        self.block, self.i = block, i


SEQUENCES = {"identity": Identity}


def parse_sequence(text: str):
    text = text.strip()
    if text == "identity":
        return Identity()
    if text.startswith("const(") and text.endswith(")"):
        arg = text[6:-1].strip()
        return Constant(INF_POINT if arg == "inf" else int(arg))
    raise ValueError(f"unknown sequence {text!r} (identity or const(p))")


# -- spaces -------------------------------------------------------------------
@dataclass(frozen=True)
class FilterSpace:
    """ω ∪ {inf}: points of ω are isolated, neighborhoods of inf are
    F ∪ {inf} with F in the filter."""

    neighborhood_filter: FilterPresentation = field(default_factory=Frechet)

    def __post_init__(self):
        F = self.neighborhood_filter
        if F.universe != "omega":
            raise ValueError("the neighborhood filter must live on omega")
        if isinstance(F, Summable) and not F.proper:
            raise ValueError("the neighborhood filter is not proper")
        free = filter_member(F, Cofinite((0,)))
        if free.refuted_:
            raise ValueError("the neighborhood filter is not free")

    def basic_neighborhoods(self, point: Point, count: int) -> list[SetDescription]:
        """The ω-parts of the first ``count`` basic neighborhoods of a point."""
        if point == INF_POINT:
            return canonical_generators(self.neighborhood_filter, count)
        return [Finite((point,))]


@dataclass(frozen=True)
class INetworkPresentation:
    sets: tuple[SetDescription, ...]
    anchor: Point = INF_POINT

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        for i, N in enumerate(self.sets):
            if not is_infinite(N).proved_:
                raise ValueError(f"network set {i} is not certified infinite")


def validate_network(net: INetworkPresentation, space: FilterSpace, budget: int = 20) -> Verdict:
    """Does every one of the first ``budget`` basic neighborhoods of the
    anchor contain some N_i?"""
    found = []
    for j, O in enumerate(space.basic_neighborhoods(net.anchor, budget)):
        hit, undecided = None, False
        for i, N in enumerate(net.sets):
            v = is_cofinite(Or((Not(N), O)))
            if v.proved_ and v.certificate["bound"] == 0:
                hit = i
                break
            if v.unknown_:
                undecided = True
        if hit is None:
            if undecided:
                return Verdict.unknown(budget, neighborhood=j)
            return Verdict.refuted(neighborhood=O, index=j, note="no network set inside")
        found.append([j, hit])
    return Verdict.proved(contained=found, budget=budget)


# -- reports ------------------------------------------------------------------
@dataclass
class ConvergenceReport:
    sequence: object
    limit: Point
    filter: FilterPresentation
    prefix: list
    hitting: dict
    verdict: Verdict
    network_check: Optional[Verdict] = None

    def to_json(self) -> dict:
        from .verdict import jsonable
        return jsonable({
            "sequence": self.sequence.render(), "limit": self.limit, "filter": self.filter,
            "prefix": self.prefix, "hitting": self.hitting, "verdict": self.verdict.to_json(),
            "network_check": None if self.network_check is None else self.network_check.to_json(),
        })


def theorem1_sequence(net: INetworkPresentation, P: BlockPartition, horizon: int = 10_000,
                      space: Optional[FilterSpace] = None) -> ConvergenceReport:
    """An injective sequence whose blocks meet N_0, ..., N_{|block|-1}, with
    the resulting meagerness certificate checked on the blocks inside the
    horizon."""
    if not P.unbounded:
        raise ValueError("block sizes must tend to infinity")
    seq = Theorem1Sequence(net.sets, P)
    space = space or FilterSpace()
    last_block = P.block_of(horizon - 1) if horizon else -1
    try:
        seq._grow(last_block)
    except CollisionExhausted as e:
        return ConvergenceReport(seq, net.anchor, Induced(seq, space.neighborhood_filter), [],
                                 {}, Verdict.unknown(horizon, stuck_block=e.block, network_index=e.i))
    pts = seq.prefix(P.start(last_block + 1))
    injective = len(set(pts)) == len(pts)
    starts, checked = [], 0
    for i, N in enumerate(net.sets):
        s = P.first_block_with_size_above(i)
        starts.append(s)
        for m in range(s, last_block + 1):
            k = seq.pick(i, m)
            if k is None or not (P.start(m) <= k < P.start(m + 1)) or not N.member(pts[k]):
                return ConvergenceReport(seq, net.anchor, Induced(seq, space.neighborhood_filter), pts[:50],
                                         {}, Verdict.refuted(network_index=i, block=m))
            checked += 1
    hitting = {"start_block": starts, "blocks_checked": last_block + 1, "obligations": checked,
               "partition": P.render(),
               "argument": "block m holds a point of N_i whenever |block m| > i"}
    cert = {"injective_prefix": injective, "prefix_length": len(pts),
            "injectivity_rule": "every chosen point is unused when chosen"}
    verdict = Verdict.proved(**cert) if injective else Verdict.refuted(**cert)
    return ConvergenceReport(seq, net.anchor, Induced(seq, space.neighborhood_filter), pts[:50],
                             hitting, verdict, validate_network(net, space))


def f_converges(seq, limit: Point, F: FilterPresentation, space: FilterSpace,
                generator_budget: int = 20) -> Verdict:
    """Check {k : x_k ∈ O} ∈ F for the first basic neighborhoods O of limit."""
    certs = []
    for j, O in enumerate(space.basic_neighborhoods(limit, generator_budget)):
        v = filter_member(F, IndexSet(seq, O))
        if v.refuted_:
            return Verdict.refuted(neighborhood=O, index=j, certificate=v.certificate)
        if v.unknown_:
            return Verdict.unknown(generator_budget, neighborhood=O, index=j)
        certs.append(v.certificate)
    return Verdict.proved(neighborhoods=len(certs), certificates=certs)


@dataclass
class SubsequenceReport:
    indices: SetDescription
    certificate: object
    neighborhoods: list
    exceptions: list
    verdict: Verdict

    def to_json(self) -> dict:
        from .verdict import jsonable
        return jsonable({"indices": self.indices, "pseudointersection": self.certificate.to_json(),
                         "neighborhoods": self.neighborhoods, "exceptions": self.exceptions,
                         "verdict": self.verdict.to_json()})


class NotApplicable(ValueError):
    pass


def convergent_subsequence(seq, F: FilterPresentation, P: BlockPartition, space: FilterSpace,
                           limit: Point = INF_POINT, budget: int = 20,
                           horizon: int = 10_000) -> SubsequenceReport:
    """A classically convergent subsequence from a meagerness witness P with
    bounded block sizes, via the bounded-block pseudointersection."""
    if not P.bounded:
        raise NotApplicable("the witness has unbounded block sizes; no infinite set of "
                            "indices with bounded blocks exists")
    nbhds = space.basic_neighborhoods(limit, budget)
    gens = []
    for O in nbhds:
        v = filter_member(F, IndexSet(seq, O))
        if not v.proved_:
            raise ValueError(f"{O.render()} does not give a certified member of the filter")
        gens.append(IndexSet(seq, O))
    bound = max(P.prefix + (P.c,))
    inst = BoundedBlockInstance(omega(), P, bound, tuple(gens))
    cert = lemma1_pseudointersection(inst)
    verdict = verify_pseudointersection(cert, gens, horizon)
    return SubsequenceReport(cert.A, cert, [O.render() for O in nbhds],
                             [list(e) for e in cert.exceptions], verdict)


# -- the density example -------------------------------------------------------
@dataclass
class DiagonalRefutation:
    F: SetDescription
    removed: list  # (candidate index, block, point)
    density: Verdict
    verdict: Verdict

    def to_json(self) -> dict:
        from .verdict import jsonable
        return jsonable({"F": self.F, "removed": [list(r) for r in self.removed],
                         "density": self.density.to_json(), "verdict": self.verdict.to_json()})


def density_diagonal_refuter(candidates: list[SetDescription], budget: int = 10 ** 6,
                             partition: Optional[BlockPartition] = None) -> DiagonalRefutation:
    """A member F of the block density filter containing none of the
    candidates: candidate i loses one of its points in a block of index at
    least i, with a different block for every candidate."""
    P = partition or BlockPartition.dyadic()
    removed, m = [], 0
    for i, A in enumerate(candidates):
        m = max(m, i)
        p = next_member(A, P.start(m), P.start(m) + budget) if form_of(A) is None else next_member(A, P.start(m))
        if p is None:
            F = BlockRule(P, Selector("removed", removed=tuple(r[2] for r in removed)))
            return DiagonalRefutation(F, removed, Verdict.unknown(budget),
                                      Verdict.unknown(budget, candidate=i, note="no point past the schedule"))
        b = P.block_of(p)
        removed.append((i, b, p))
        m = b + 1
    F = BlockRule(P, Selector("removed", removed=tuple(r[2] for r in removed)))
    density = filter_member(BlockDensity(P), F)
    per_block = {}
    for _, b, _ in removed:
        per_block[b] = per_block.get(b, 0) + 1
    ok = all(A.member(p) and not F.member(p) for (i, _, p), A in zip(removed, candidates))
    cert = {"excluded": [[i, p] for i, _, p in removed], "max_removed_per_block": max(per_block.values(), default=0),
            "block_density_bound": "(|B_n| - 1)/|B_n|"}
    verdict = Verdict.proved(**cert) if ok and density.proved_ else Verdict.refuted(**cert)
    return DiagonalRefutation(F, removed, density, verdict)
