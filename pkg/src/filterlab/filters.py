"""Filter presentations on ω (and ω×ω) with certificate-producing membership,
co-ideal tests, pushforward, restriction and meagerness witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import forms, weights
from .forms import INF, PPForm, WForm
from .partition import BlockPartition
from .sets import (
    And, Cofinite, Finite, Interval, Not, Or, PairedRowRule, Preimage, SetDescription,
    Shifted, block_count, finite_elements, form_of, hit_threshold, is_cofinite,
    is_infinite, is_subset_mod_finite, next_member,
)
from .verdict import Verdict


class UniverseMismatch(ValueError):
    pass


class NotInCoideal(ValueError):
    def __init__(self, verdict: Verdict):
        super().__init__(f"set is not in the co-ideal: {verdict.certificate}")
        self.verdict = verdict


class FilterPresentation:
    universe = "omega"

    def render(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Frechet(FilterPresentation):
    def render(self) -> str:
        return "frechet"


@dataclass(frozen=True)
class Generated(FilterPresentation):
    """Filter generated by finitely many sets together with the cofinite sets."""

    base: tuple[SetDescription, ...] = ()
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        if self.validate:
            v = is_infinite(self.core)
            if not v.proved_:
                raise ValueError(f"base sets do not have infinite intersection: {v.status.value}")

    @property
    def core(self) -> SetDescription:
        """The intersection of the base, the least member up to finite sets."""
        if not self.base:
            return Cofinite(())
        return self.base[0] if len(self.base) == 1 else And(self.base)

    def render(self) -> str:
        return f"gen({','.join(b.render() for b in self.base)})"


@dataclass(frozen=True)
class BlockDensity(FilterPresentation):
    """{A : |A ∩ B_n| / |B_n| -> 1} for the blocks B_n of an unbounded partition."""

    partition: BlockPartition = field(default_factory=BlockPartition.dyadic)

    def render(self) -> str:
        p = self.partition
        return "density(blocks=dyadic)" if p == BlockPartition.dyadic() else f"density(blocks={p.render()})"


@dataclass(frozen=True)
class Summable(FilterPresentation):
    """{A : sum_{n not in A} w_n < inf}."""

    rule: str = "harmonic"

    def __post_init__(self):
        if self.rule not in weights.WEIGHTS:
            raise ValueError(f"unknown weight rule {self.rule!r}")

    @property
    def proper(self) -> bool:
        return weights.total_diverges(self.rule)

    def render(self) -> str:
        return f"summable(w={self.rule})"


@dataclass(frozen=True)
class FubiniFrFr(FilterPresentation):
    universe = "pairs"

    def render(self) -> str:
        return "fubini"


@dataclass(frozen=True)
class Pushforward(FilterPresentation):
    inner: FilterPresentation = None
    partition: BlockPartition = None

    def render(self) -> str:
        return f"push({self.inner.render()},{self.partition.render()})"


@dataclass(frozen=True)
class Restriction(FilterPresentation):
    inner: FilterPresentation = None
    on: SetDescription = None

    def __post_init__(self):
        object.__setattr__(self, "universe", self.inner.universe)

    def render(self) -> str:
        return f"restrict({self.inner.render()},{self.on.render()})"


@dataclass(frozen=True)
class Induced(FilterPresentation):
    """{A : {k : x_k in G} ⊆ A for some G in the space filter}: the filter of
    index sets of neighborhoods of inf along a sequence."""

    seq: object = None
    space_filter: FilterPresentation = None

    def render(self) -> str:
        return f"induced({self.seq.render()},{self.space_filter.render()})"


def _check(F: FilterPresentation, A: SetDescription):
    if F.universe != A.universe:
        raise UniverseMismatch(f"{A.universe} set queried against a filter on {F.universe}")


# -- density analysis ---------------------------------------------------------
def _density(f, P: BlockPartition) -> Optional[dict]:
    """Eventual per-block density of a form against the blocks of P:
    {'limit': Fraction, 'from_block': m, 'missing_max': k or None}."""
    if f is None:
        return None
    if isinstance(f, WForm):
        if f.partition != P:
            return None
        ends = [a for a, b in f.windows if b == INF]
        if ends:
            a = ends[0]
            missing = a - forms.win_count(tuple(w for w in f.windows if w[1] != INF), a)
            return {"limit": Fraction(1), "from_block": f.n0, "missing_max": int(missing)}
        return {"limit": Fraction(0), "from_block": f.n0, "present_max": int(sum(b - a for a, b in f.windows))}
    last = f.last
    m = P.block_of(last.start) + 1
    if P.bounded:
        m = max(m, len(P.prefix))
        counts = {block_count_form(f, P, j) for j in range(m, m + last.period)}
        if len(counts) == 1:
            cnt = next(iter(counts))
            return {"limit": Fraction(cnt, P.c), "from_block": m, "missing_max": P.c - cnt}
        return {"limit": None, "from_block": m, "oscillates": sorted(counts)}
    d = Fraction(sum(last.bits), last.period)
    out = {"limit": d, "from_block": m}
    if d == 1:
        out["missing_max"] = 0
    return out


def block_count_form(f, P, n):
    return forms.block_count(f, P, n)


# -- weight analysis ----------------------------------------------------------
def _union_parts(S: SetDescription) -> list[SetDescription]:
    """S as a union of parts, pushing complements through intersections."""
    if isinstance(S, Or):
        return [q for p in S.parts for q in _union_parts(p)]
    if isinstance(S, Not):
        if isinstance(S.part, And):
            return [q for p in S.part.parts for q in _union_parts(Not(p))]
        if isinstance(S.part, Not):
            return _union_parts(S.part.part)
    return [S]


def _weight_verdict(rule: str, S: SetDescription, want_finite: bool, role: str) -> Verdict:
    k = weights.sum_kind(rule, S)
    if k is None:
        # weight sums are subadditive: a union of finite-weight parts has finite weight
        parts = _union_parts(S)
        kinds = [weights.sum_kind(rule, p) for p in parts] if len(parts) > 1 else [None]
        if all(x is not None and x["finite"] for x in kinds):
            cert = {"class": "summable", "weights": rule, role: S, "argument": "union of finite-weight parts",
                    "parts": [{"set": p, **{a: b for a, b in x.items() if a != "finite"}}
                              for p, x in zip(parts, kinds)], "sum_finite": True}
            return Verdict.proved(**cert) if want_finite else Verdict.refuted(**cert)
        return Verdict.unknown(0, reason="no closed form for the weight sum")
    cert = {"class": "summable", "weights": rule, role: S, **{a: b for a, b in k.items() if a != "finite"}}
    cert["sum_finite"] = k["finite"]
    return Verdict.proved(**cert) if k["finite"] == want_finite else Verdict.refuted(**cert)


# -- Fubini -------------------------------------------------------------------
def _rows_tail_start(A: PairedRowRule) -> int:
    return max([A.rows_from] + [i + 1 for i, _ in A.overrides])


def _fubini_member(A: SetDescription) -> Verdict:
    if not isinstance(A, PairedRowRule):
        return Verdict.unknown(0, reason="Fubini membership needs a row presentation")
    N = _rows_tail_start(A)
    v = is_cofinite(A.row)
    if v.proved_:
        return Verdict.proved(**{"class": "fubini", "row_from": N, "row_bound": v.certificate["bound"],
                                 "shift": A.shift})
    if v.refuted_:
        return Verdict.refuted(**{"class": "fubini", "non_cofinite_rows_from": N, "row_witness": v.certificate})
    return v


def fubini_blocking_set(A: PairedRowRule) -> PairedRowRule:
    """For A whose generic row is finite: B = {(n, m) : m > max row_n(A)} on
    the rows past every override, a member of Fr⊗Fr disjoint from A."""
    N = _rows_tail_start(A)
    elems = finite_elements(A.row)
    top = max(elems) if elems else -1
    return PairedRowRule(Cofinite(tuple(range(top + 1))), A.shift, N, ())


def _fubini_coideal(A: SetDescription) -> Verdict:
    if not isinstance(A, PairedRowRule):
        return Verdict.unknown(0, reason="Fubini co-ideal test needs a row presentation")
    v = is_infinite(A.row)
    N = _rows_tail_start(A)
    if v.proved_:
        return Verdict.proved(**{"class": "fubini", "infinite_rows_from": N})
    if v.refuted_:
        B = fubini_blocking_set(A)
        return Verdict.refuted(**{"class": "fubini", "blocking_set": B, "blocking_member": _fubini_member(B)})
    return v


# -- membership ---------------------------------------------------------------
def filter_member(F: FilterPresentation, A: SetDescription) -> Verdict:
    """Decide A ∈ F with a certificate (Unknown when no closed form applies)."""
    _check(F, A)
    if isinstance(F, Frechet):
        v = is_cofinite(A)
        return Verdict(v.status, {"class": "frechet", **v.certificate}, v.horizon)
    if isinstance(F, Generated):
        v = is_subset_mod_finite(F.core, A)
        if v.proved_:
            return Verdict.proved(**{"class": "generated", "base": F.core, "bound": v.certificate["bound"]})
        return Verdict(v.status, {"class": "generated", "base": F.core, "escapes": v.certificate}, v.horizon)
    if isinstance(F, BlockDensity):
        d = _density(form_of(A), F.partition)
        if d is None or d["limit"] is None:
            return Verdict.unknown(0, reason="no closed-form block density", detail=d)
        cert = {"class": "density", "partition": F.partition.render(), **d}
        return Verdict.proved(**cert) if d["limit"] == 1 else Verdict.refuted(**cert)
    if isinstance(F, Summable):
        return _weight_verdict(F.rule, Not(A), True, "complement")
    if isinstance(F, FubiniFrFr):
        return _fubini_member(A)
    if isinstance(F, Pushforward):
        v = filter_member(F.inner, Preimage(A, F.partition))
        return Verdict(v.status, {"class": "pushforward", "preimage": Preimage(A, F.partition),
                                  "inner": v.certificate}, v.horizon)
    if isinstance(F, Restriction):
        v = filter_member(F.inner, Or((A, Not(F.on))))
        return Verdict(v.status, {"class": "restriction", "inner": v.certificate}, v.horizon)
    if isinstance(F, Induced):
        return _induced_member(F, A)
    raise TypeError(F)


def _induced_member(F: Induced, A: SetDescription) -> Verdict:
    from .sets import IndexSet

    if getattr(F.seq, "is_identity", False):
        return filter_member(F.space_filter, A)
    if isinstance(A, IndexSet) and A.seq == F.seq:
        v = filter_member(F.space_filter, A.target)
        if v.proved_:
            return Verdict.proved(**{"class": "induced", "neighborhood": A.target, "space": v.certificate})
    return Verdict.unknown(0, reason="index sets of this sequence have no closed form")


def coideal_member(F: FilterPresentation, A: SetDescription) -> Verdict:
    """Decide A ∈ F⁺.  Refuted certificates name a member of F disjoint from A."""
    _check(F, A)
    if isinstance(F, Frechet):
        v = is_infinite(A)
        if v.refuted_:
            return Verdict.refuted(**{"class": "frechet", "blocking_set": Not(A)})
        return Verdict(v.status, {"class": "frechet", **v.certificate}, v.horizon)
    if isinstance(F, Generated):
        meet = And((A, F.core))
        v = is_infinite(meet)
        if v.refuted_:
            return Verdict.refuted(**{"class": "generated", "blocking_set": And((F.core, Not(A)))})
        return Verdict(v.status, {"class": "generated", "meet": v.certificate}, v.horizon)
    if isinstance(F, BlockDensity):
        d = _density(form_of(A), F.partition)
        if d is None or d["limit"] is None:
            return Verdict.unknown(0, reason="no closed-form block density")
        if d["limit"] > 0:
            return Verdict.proved(**{"class": "density", "density_limit": d["limit"]})
        return Verdict.refuted(**{"class": "density", "blocking_set": Not(A)})
    if isinstance(F, Summable):
        v = _weight_verdict(F.rule, A, False, "set")
        if v.refuted_:
            return Verdict.refuted(**{**v.certificate, "blocking_set": Not(A)})
        return v
    if isinstance(F, FubiniFrFr):
        return _fubini_coideal(A)
    if isinstance(F, Pushforward):
        v = coideal_member(F.inner, Preimage(A, F.partition))
        return Verdict(v.status, {"class": "pushforward", "inner": v.certificate}, v.horizon)
    if isinstance(F, Restriction):
        v = coideal_member(F.inner, And((A, F.on)))
        return Verdict(v.status, {"class": "restriction", "inner": v.certificate}, v.horizon)
    if isinstance(F, Induced):
        if getattr(F.seq, "is_identity", False):
            return coideal_member(F.space_filter, A)
        return Verdict.unknown(0, reason="index sets of this sequence have no closed form")
    raise TypeError(F)


def pushforward(F: FilterPresentation, xi: BlockPartition) -> FilterPresentation:
    """xi(F) = {B : xi^{-1}(B) ∈ F}, the filter generated by the images."""
    if F.universe != "omega":
        raise UniverseMismatch("pushforward needs a filter on omega")
    if isinstance(F, Frechet):
        return Frechet()
    return Pushforward(F, xi)


def restrict(F: FilterPresentation, A: SetDescription) -> FilterPresentation:
    """F|A = {G ∩ A : G ∈ F}; requires A ∈ F⁺."""
    v = coideal_member(F, A)
    if not v.proved_:
        raise NotInCoideal(v)
    return Restriction(F, A)


def canonical_generators(F: FilterPresentation, count: int) -> list[SetDescription]:
    """A decreasing enumeration G_0 ⊇ G_1 ⊇ ... of members of F.  For countably
    generated filters (Frechet, Generated) it is a base; for the others it is a
    representative sample used by convergence checks."""
    if isinstance(F, Frechet):
        return [Interval(i, None) for i in range(count)]
    if isinstance(F, Generated):
        return [And((F.core, Interval(i, None))) if i else F.core for i in range(count)]
    if isinstance(F, BlockDensity):
        from .sets import BlockRule, Selector
        return [BlockRule(F.partition, Selector("allbutfirst", i)) for i in range(count)]
    if isinstance(F, Summable):
        from .sets import BlockRule, Selector
        # drop an ever larger but finite-weight part: the first i points
        return [Interval(i, None) for i in range(count)]
    if isinstance(F, Induced):
        from .sets import IndexSet
        if getattr(F.seq, "is_identity", False):
            return canonical_generators(F.space_filter, count)
        return [IndexSet(F.seq, G) for G in canonical_generators(F.space_filter, count)]
    raise ValueError(f"no canonical generators for {F.render()}")


# -- meagerness witnesses -----------------------------------------------------
@dataclass(frozen=True)
class MeagernessWitness:
    partition: BlockPartition
    intervals: tuple[tuple[int, int], ...]
    start_index: tuple[int, ...]  # generator i is hit by every interval j >= start_index[i]
    hits: tuple[tuple[int, ...], ...]  # hits[i][j - start_index[i]] = a point of G_i in interval j
    interval_weights: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "partition": self.partition.render(),
            "intervals": [list(iv) for iv in self.intervals],
            "start_index": list(self.start_index),
            "hits": [list(h) for h in self.hits],
            "interval_weights": list(self.interval_weights),
        }


def _partition_from_intervals(intervals) -> BlockPartition:
    sizes = tuple(b - a for a, b in intervals)
    return BlockPartition(sizes, "const", sizes[-1] if sizes else 1)


def find_meagerness_witness(F: FilterPresentation, horizon: int, min_intervals: int = 5,
                            table_generators: int = 20) -> Verdict:
    """Greedy interval construction: interval j is [M_{j-1}, M_j) with M_j the
    least point such that G_0..G_j all meet it.  The returned partition is
    exact up to the horizon (its constant tail beyond is not claimed)."""
    if isinstance(F, Summable):
        return _summable_witness(F, horizon, min_intervals)
    if isinstance(F, BlockDensity):
        P = F.partition
        m = P.block_of(horizon) if horizon > 0 else 0
        ivs = tuple((P.start(j), P.start(j + 1)) for j in range(m))
        return Verdict.proved(**{"class": "density", "witness": MeagernessWitness(
            P, ivs, (), ()).to_json(), "argument": "members have block density -> 1, so they "
            "meet all but finitely many blocks"})
    try:
        gens = canonical_generators(F, 1)
    except ValueError as e:
        return Verdict.unknown(0, reason=str(e))
    intervals: list[tuple[int, int]] = []
    hits: list[list[int]] = []
    gen_cache: list[SetDescription] = []
    start = 0
    j = 0
    while True:
        if len(gen_cache) <= j:
            gen_cache = canonical_generators(F, max(2 * len(gen_cache), j + 1))
        M = start
        row_hits = []
        ok = True
        for i in range(j + 1):
            p = next_member(gen_cache[i], start, horizon)
            if p is None or p >= horizon:
                ok = False
                break
            row_hits.append(p)
            M = max(M, p + 1)
        if not ok:
            break
        intervals.append((start, M))
        for i in range(min(j + 1, table_generators)):
            if i == len(hits):
                hits.append([])
            hits[i].append(row_hits[i])
        start = M
        j += 1
    if len(intervals) < min_intervals:
        return Verdict.unknown(horizon, intervals=[list(iv) for iv in intervals])
    W = MeagernessWitness(_partition_from_intervals(intervals), tuple(intervals),
                          tuple(range(len(hits))), tuple(tuple(h) for h in hits))
    return Verdict.proved(**{"class": F.render(), "witness": W.to_json(), "horizon": horizon})


def _summable_witness(F: Summable, horizon: int, min_intervals: int) -> Verdict:
    if not F.proper:
        return Verdict.refuted(reason="improper filter (total weight converges)")
    from .sets import Cofinite as _Omega

    omega = _Omega(())
    intervals, ws = [], []
    start = 0
    while True:
        # least M with weight of [start, M) > 1; exponential then binary search
        hi = start + 1
        while hi <= horizon and not weights.segment_sum(F.rule, omega, start, hi).exceeds(1):
            hi = start + 2 * (hi - start)
        if hi > horizon and not weights.segment_sum(F.rule, omega, start, horizon).exceeds(1):
            break
        hi = min(hi, horizon)
        lo = start
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if weights.segment_sum(F.rule, omega, start, mid).exceeds(1):
                hi = mid
            else:
                lo = mid
        intervals.append((start, hi))
        ws.append(str(weights.segment_sum(F.rule, omega, start, hi).lo))
        start = hi
    if len(intervals) < min_intervals:
        return Verdict.unknown(horizon, intervals=intervals)
    W = MeagernessWitness(_partition_from_intervals(intervals), tuple(intervals), (), (), tuple(ws))
    return Verdict.proved(**{"class": "summable", "witness": W.to_json(),
                             "argument": "each interval has weight > 1, so a member with complement "
                             "weight s misses at most s intervals"})


def verify_meagerness_witness(F: FilterPresentation, verdict: Verdict) -> bool:
    """Re-check the stored hitting table by block counts."""
    if not verdict.proved_:
        return False
    w = verdict.certificate["witness"]
    ivs = [tuple(iv) for iv in w["intervals"]]
    if any(ivs[i][1] != ivs[i + 1][0] for i in range(len(ivs) - 1)) or (ivs and ivs[0][0] != 0):
        return False
    if isinstance(F, Summable):
        return all(weights.segment_sum(F.rule, Cofinite(()), a, b).exceeds(1) for a, b in ivs)
    if isinstance(F, BlockDensity):
        return True
    P = _partition_from_intervals(ivs)
    gens = canonical_generators(F, len(w["hits"]))
    for i, row in enumerate(w["hits"]):
        s = w["start_index"][i]
        for j, p in enumerate(row):
            a, b = ivs[s + j]
            if not (a <= p < b and gens[i].member(p)):
                return False
            if block_count(gens[i], P, s + j) == 0:
                return False
    return True


def is_xi_meager(F: FilterPresentation, P: BlockPartition) -> Verdict:
    """Certificate that every member of F meets all but finitely many blocks
    of P (i.e. P(F) is the Frechet filter): per-generator start indices."""
    if isinstance(F, Frechet):
        return Verdict.proved(**{"class": "frechet", "start_index": 0})
    if isinstance(F, Generated):
        try:
            t = hit_threshold(F.core, P)
        except LookupError as e:
            return Verdict.unknown(0, reason=str(e))
        if t is None:
            return Verdict.refuted(**{"class": "generated", "reason": "base misses infinitely many blocks"})
        return Verdict.proved(**{"class": "generated", "start_index": t})
    if isinstance(F, BlockDensity) and F.partition == P:
        return Verdict.proved(**{"class": "density", "start_index": 0,
                                 "argument": "density -> 1 forces eventual hits"})
    if isinstance(F, Induced) and getattr(F.seq, "is_identity", False):
        return is_xi_meager(F.space_filter, P)
    return Verdict.unknown(0, reason="no xi-meagerness rule for this presentation")


# -- certificate verification ---------------------------------------------------
def verify_filter_verdict(F: FilterPresentation, A: SetDescription, verdict: Verdict,
                          horizon: int = 2000) -> bool:
    """Re-evaluate the defining condition on the certificate data by literal
    membership up to the horizon."""
    c = verdict.certificate
    if verdict.unknown_:
        return True
    cls = c.get("class")
    if isinstance(F, Frechet) or (isinstance(F, Generated) and verdict.proved_):
        base = F.core if isinstance(F, Generated) else Cofinite(())
        if verdict.proved_:
            return all(A.member(k) for k in range(c["bound"], horizon) if base.member(k))
        esc = c.get("escapes", c)
        if esc.get("scheme") == "progression":
            pts = range(esc["first"], horizon, esc["step"])
            return all(not A.member(k) for k in pts)
        if esc.get("scheme") == "block-position":
            P = BlockPartition.parse(esc["partition"])
            n = esc["from_block"]
            while P.start(n) + esc["position"] < horizon:
                if A.member(P.start(n) + esc["position"]):
                    return False
                n += 1
            return True
        return False
    if isinstance(F, Generated):
        esc = c["escapes"]
        core = F.core
        if esc.get("scheme") == "progression":
            pts = [k for k in range(esc["first"], horizon, esc["step"])]
            return all(not Or((Not(core), A)).member(k) for k in pts)
        return True
    if isinstance(F, BlockDensity):
        P = F.partition
        n = c["from_block"]
        ok = True
        while P.start(n + 1) <= horizon:
            size = P.size(n)
            cnt = sum(1 for k in P.block(n) if A.member(k))
            if c["limit"] == 1:
                ok &= size - cnt <= c["missing_max"]
            elif "present_max" in c:
                ok &= cnt <= c["present_max"]
            n += 1
        return ok
    if isinstance(F, Summable):
        S = Not(A)
        partial = sum((weights.weight(F.rule, k) for k in range(horizon) if S.member(k)), Fraction(0))
        if c["sum_finite"]:
            bound = c.get("value", c.get("bound"))
            return partial <= Fraction(str(bound)) if not isinstance(bound, Fraction) else partial <= bound
        return True
    if isinstance(F, FubiniFrFr):
        if verdict.proved_:
            N, b = c["row_from"], c["row_bound"]
            side = max(2, int(math.isqrt(horizon)))
            return all(A.member((n, m)) for n in range(N, N + side)
                       for m in range(b + (n if c["shift"] else 0), b + (n if c["shift"] else 0) + side))
        return True
    return True
