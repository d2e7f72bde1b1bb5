"""Pseudointersections: the bounded-block recursion, the submeasure segment
construction for F_sigma filters, and the Fr⊗Fr chain without a positive
pseudointersection."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import forms, weights
from .filters import FubiniFrFr, Summable, coideal_member, filter_member
from .forms import PPForm
from .partition import BlockPartition
from .sets import (
    And, Cofinite, Finite, Interval, Not, Or, PairedRowRule, Periodic, Preimage,
    SetDescription, _stable_block, finite_elements, form_of, is_cofinite, is_infinite,
    is_subset_mod_finite, omega, periodic_of,
)
from .verdict import Verdict


class InvalidInstance(ValueError):
    def __init__(self, msg: str, **detail):
        super().__init__(msg)
        self.detail = detail


@dataclass(frozen=True)
class PseudointersectionCertificate:
    """A together with the exception sets A \\ G, one per generator.

    Exception sets are stored explicitly (``exceptions``) together with a
    bound: A \\ G ⊆ [0, bound)."""

    A: SetDescription
    exceptions: tuple[tuple[int, ...], ...]
    bounds: tuple[int, ...]
    trace: tuple[dict, ...] = ()
    extra: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        from .verdict import jsonable
        return jsonable({"A": self.A, "exceptions": [list(e) for e in self.exceptions],
                         "exception_bounds": list(self.bounds), "trace": list(self.trace),
                         **self.extra})


def _exceptions(A: SetDescription, G: SetDescription, limit: int = 1_000_000):
    diff = And((A, Not(G)))
    f = form_of(diff)
    if f is None:
        raise ValueError("exception set has no closed form")
    if f.is_infinite():
        raise ValueError(f"A is not almost contained in {G.render()}")
    pts = finite_elements(diff) if isinstance(f, PPForm) and f.last.start <= limit else None
    if pts is None:
        raise ValueError("exception set too large to list")
    return tuple(pts), (pts[-1] + 1 if pts else 0)


# -- bounded blocks -----------------------------------------------------------
@dataclass(frozen=True)
class BoundedBlockInstance:
    """Blocks C_i = xi^{-1}(i) ∩ carrier for i in index_set, each of size at
    most ``bound``, and generators of a filter on their union."""

    index_set: SetDescription
    partition: BlockPartition
    bound: int
    generators: tuple[SetDescription, ...]
    carrier: SetDescription = field(default_factory=omega)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def union(self) -> SetDescription:
        return And((Preimage(self.index_set, self.partition), self.carrier))

    def blocks(self, count: int) -> list[tuple[int, tuple[int, ...]]]:
        """The first ``count`` nonempty blocks as (index, points)."""
        out, i = [], 0
        while len(out) < count:
            if self.index_set.member(i):
                pts = tuple(k for k in self.partition.block(i) if self.carrier.member(k))
                if pts:
                    out.append((i, pts))
            i += 1
            if i > 100 * count + 10_000:
                break
        return out


def _pp(A: SetDescription) -> PPForm:
    f = form_of(A)
    if not isinstance(f, PPForm):
        raise InvalidInstance("set has no periodic closed form against this partition", set=A)
    return f


def count_below(S: PPForm, P: BlockPartition, k: int) -> PPForm:
    """{i : |S ∩ xi^{-1}(i)| < k} as a form over block indices (P bounded)."""
    m_s, cycle = _stable_block(S, P)
    segs = [(i, (forms.block_count(S, P, i) < k,)) for i in range(m_s)]
    segs.append((m_s, tuple(forms.block_count(S, P, m_s + j) < k for j in range(cycle))))
    return PPForm.from_segments(segs)


FULL_SEARCH_GENERATORS = 8


def _intersections(gens):
    """Candidate finite intersections in a fixed order: the empty one first,
    then by size and list position.  Past FULL_SEARCH_GENERATORS generators
    only singletons and prefixes are tried; the last candidate is always the
    intersection of all of them."""
    g = len(gens)
    if g <= FULL_SEARCH_GENERATORS:
        for r in range(g + 1):
            yield from itertools.combinations(range(g), r)
        return
    yield ()
    for j in range(g):
        yield (j,)
    for r in range(2, g + 1):
        yield tuple(range(r))


def _meet(sets) -> SetDescription:
    sets = tuple(sets)
    if not sets:
        return omega()
    return sets[0] if len(sets) == 1 else And(sets)


def _index_list(f: PPForm, limit: int = 20) -> list[int]:
    out, k = [], f.next_point(0, True)
    while k is not None and len(out) < limit:
        out.append(k)
        k = f.next_point(k + 1, True)
    return out


def validate_instance(inst: BoundedBlockInstance) -> PPForm:
    """Check the hypotheses and return the index set with empty blocks
    removed.  Raises InvalidInstance naming the violation."""
    P = inst.partition
    if not P.bounded:
        raise InvalidInstance("block sizes are unbounded", partition=P.render())
    I = _pp(inst.index_set)
    carrier = _pp(inst.carrier)
    oversize = I.combine(count_below(carrier, P, inst.bound + 1).negate(), lambda a, b: a and b)
    if oversize.next_point(0) is not None:
        raise InvalidInstance("a block exceeds the size bound", block=oversize.next_point(0))
    empty = I.combine(count_below(carrier, P, 1), lambda a, b: a and b)
    if empty.is_infinite():
        raise InvalidInstance("infinitely many empty blocks", blocks=_index_list(empty))
    I = I.combine(empty.negate(), lambda a, b: a and b)
    if not I.is_infinite():
        raise InvalidInstance("only finitely many blocks")
    # missing blocks only grow as sets shrink, so the intersection of all
    # generators decides every finite intersection at once
    for T in ([(j,) for j in range(len(inst.generators))] + [tuple(range(len(inst.generators)))]):
        S = _pp(_meet((inst.carrier,) + tuple(inst.generators[j] for j in T)))
        missed = I.combine(count_below(S, P, 1), lambda a, b: a and b)
        if missed.is_infinite():
            raise InvalidInstance("a filter set misses infinitely many blocks",
                                  generators=list(T), blocks=_index_list(missed))
    return I


def lemma1_pseudointersection(inst: BoundedBlockInstance) -> PseudointersectionCertificate:
    """Infinite pseudointersection of a filter whose sets meet all but
    finitely many blocks of size at most n, by induction on n."""
    I = validate_instance(inst)
    P, gens = inst.partition, inst.generators
    chosen: list[SetDescription] = [inst.carrier]
    n = inst.bound
    trace = []
    while n > 1:
        S_all = _pp(_meet(chosen + list(gens)))
        if not I.combine(count_below(S_all, P, n), lambda a, b: a and b).is_infinite():
            break  # every filter set contains all but finitely many blocks whole
        for T in _intersections(gens):
            H = _meet(chosen + [gens[j] for j in T])
            S = _pp(H)
            J = I.combine(count_below(S, P, n), lambda a, b: a and b)
            if J.is_infinite():
                # recurse on the blocks C_i ∩ H, i in J, which have size < n
                nonempty = count_below(S, P, 1).negate()
                I = J.combine(nonempty, lambda a, b: a and b)
                chosen += [gens[j] for j in T]
                trace.append({"bound": n, "chosen": list(T), "J": periodic_of(J).render()})
                n -= 1
                break
        else:
            break
    trace.append({"bound": n, "chosen": None, "J": None})
    parts = [] if I.is_cofinite() and I.cofinite_bound() == 0 else [Preimage(periodic_of(I), P)]
    parts += [c for c in chosen if c != omega()]
    A = _meet(parts)
    exc = [_exceptions(A, G) for G in gens]
    return PseudointersectionCertificate(
        A, tuple(e for e, _ in exc), tuple(b for _, b in exc), tuple(trace),
        {"depth": len(trace) - 1, "initial_bound": inst.bound})


# -- F_sigma segment construction ---------------------------------------------
class SegmentSearchExhausted(RuntimeError):
    def __init__(self, partial: dict):
        super().__init__("segment search exceeded the horizon")
        self.partial = partial


def _and_parts(A: SetDescription) -> list[SetDescription]:
    if isinstance(A, And):
        return [q for p in A.parts for q in _and_parts(p)]
    return [A]


def _exceeds(rule: str, A: SetDescription, a: int, b: int, k: int) -> bool:
    e = weights.segment_sum(rule, A, a, b)
    r = e.exceeds(k)
    if r is None:
        s = sum((weights.weight(rule, j) for j in range(a, b) if A.member(j)), Fraction(0))
        return s > k
    return r


def _min_segment_end(rule: str, A: SetDescription, a: int, k: int, horizon: int) -> Optional[int]:
    """Least M with phi([a, M) ∩ A) > k, or None if M > horizon."""
    step, lo = 1, a
    while True:
        hi = a + step
        if hi > horizon:
            hi = horizon
            if not _exceeds(rule, A, a, hi, k):
                return None
            break
        if _exceeds(rule, A, a, hi, k):
            break
        lo, step = hi, step * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _exceeds(rule, A, a, mid, k):
            hi = mid
        else:
            lo = mid
    return hi


def laf_pseudointersection(rule: str, chain: list[SetDescription], horizon: int = 10 ** 15,
                           require: str = "filter") -> PseudointersectionCertificate:
    """A = ∪_k [n_k, n_{k+1}) ∩ A_k ∪ ([n_{K+1}, inf) ∩ A_K), where n_{k+1} is
    least with phi([n_k, n_{k+1}) ∩ A_k) > k.

    ``require="filter"`` checks every A_k is in the summable filter;
    ``require="coideal"`` only asks phi(A_k) = inf, which is all the segment
    search uses (the result is then almost contained in each A_k but the
    chain need not lie in the filter)."""
    F = Summable(rule)
    if not chain:
        raise ValueError("empty chain")
    if require not in ("filter", "coideal"):
        raise ValueError("require must be 'filter' or 'coideal'")
    check = filter_member if require == "filter" else coideal_member
    for k, Ak in enumerate(chain):
        v = check(F, Ak)
        if not v.proved_:
            where = "in" if require == "filter" else "in the co-ideal of"
            raise ValueError(f"chain set {k} is not certified {where} {F.render()}: {v.status.value}")
    for k in range(len(chain) - 1):
        if set(_and_parts(chain[k])) <= set(_and_parts(chain[k + 1])):
            continue  # the next set intersects this one with more sets
        v = is_cofinite(Or((Not(chain[k + 1]), chain[k])))
        if not (v.proved_ and v.certificate["bound"] == 0):
            raise ValueError(f"chain is not decreasing at {k}")
    ns = [0]
    lower = []
    for k, Ak in enumerate(chain):
        M = _min_segment_end(rule, Ak, ns[-1], k, horizon)
        if M is None:
            raise SegmentSearchExhausted({"n": ns, "stuck_at": k, "horizon": horizon})
        e = weights.segment_sum(rule, Ak, ns[-1], M)
        lower.append(_lower_str(e))
        ns.append(M)
    parts = [And((Interval(ns[k], ns[k + 1]), Ak)) for k, Ak in enumerate(chain)]
    parts.append(And((Interval(ns[-1], None), chain[-1])))
    A = Or(tuple(parts))
    tail = coideal_member(F, chain[-1])
    exc = []
    for k, Ak in enumerate(chain):
        diff = And((A, Not(Ak)))
        pts = [j for j in range(ns[k]) if diff.member(j)] if ns[k] <= 2_000_000 else None
        if pts is None:
            pts = finite_elements(diff)
        exc.append(tuple(pts))
    return PseudointersectionCertificate(
        A, tuple(exc), tuple(ns[: len(chain)]),
        tuple({"k": k, "segment": [ns[k], ns[k + 1]], "phi_lower": lower[k], "exceeds": k}
              for k in range(len(chain))),
        {"weights": rule, "n": ns, "tail_divergence": tail.to_json()})


def _lower_str(e: weights.SumEnclosure, digits: int = 25) -> str:
    """A decimal lower bound for the enclosed sum, rounded down."""
    if e.exact is not None:
        x = e.exact
    else:
        man, exp = e.lo.man_exp
        x = Fraction(int(man)) * (Fraction(2) ** int(exp))
    q = 10 ** digits
    v = Fraction(math.floor(x * q), q)
    whole, frac = divmod(v.numerator * (q // v.denominator), q)
    return f"{whole}.{frac:0{digits}d}".rstrip("0").rstrip(".")


# -- Fr⊗Fr ---------------------------------------------------------------------
def fubini_chain(k: int) -> PairedRowRule:
    """A_k = {(n, m) : n >= k}."""
    return PairedRowRule(omega(), False, k, ())


class PreconditionFailed(ValueError):
    def __init__(self, msg: str, k: Optional[int] = None):
        super().__init__(msg)
        self.k = k


@dataclass(frozen=True)
class FubiniRefutation:
    candidate: PairedRowRule
    blocking_set: PairedRowRule
    row_maxima: tuple[tuple[int, int], ...]  # (row, max) for the explicit rows
    generic_row_max: int
    member_verdict: Verdict
    coideal_verdict: Verdict

    def to_json(self) -> dict:
        from .verdict import jsonable
        return jsonable({"candidate": self.candidate, "blocking_set": self.blocking_set,
                         "row_maxima": [list(r) for r in self.row_maxima],
                         "generic_row_max": self.generic_row_max,
                         "blocking_member": self.member_verdict.to_json(),
                         "candidate_coideal": self.coideal_verdict.to_json()})


def _row_max(row: Optional[SetDescription]) -> Optional[int]:
    """max of a row, -1 for an empty row, None for an infinite one."""
    if row is None:
        return -1
    v = is_infinite(row)
    if v.proved_:
        return None
    if not v.refuted_:
        raise PreconditionFailed("row finiteness is undecidable for this description")
    pts = finite_elements(row)
    return pts[-1] if pts else -1


def fubini_refute(D: SetDescription, check_up_to: int = 50) -> FubiniRefutation:
    """For a pseudointersection D of the chain, every row of D is finite; the
    set of points to the right of each row is in Fr⊗Fr and misses D."""
    if not isinstance(D, PairedRowRule):
        raise PreconditionFailed("candidates must be given row by row")
    N = max([D.rows_from] + [i + 1 for i, _ in D.overrides])
    explicit = {n: _row_max(D.row_set(n)) for n in range(N)}
    generic = _row_max(D.row)
    bad = [n for n, m in explicit.items() if m is None]
    if generic is None:
        bad.append(N)
    if bad:
        raise PreconditionFailed(f"row {min(bad)} is infinite, so D is not almost contained in A_{min(bad) + 1}",
                                 k=min(bad) + 1)
    if generic < 0:
        # finitely many finite rows
        raise PreconditionFailed("D is finite; a pseudointersection must be infinite")
    over = tuple((n, Cofinite(tuple(range(m + 1)))) for n, m in explicit.items())
    B = PairedRowRule(Cofinite(tuple(range(generic + 1))), D.shift, N, over)
    mv = filter_member(FubiniFrFr(), B)
    cv = Verdict.refuted(**{"class": "fubini", "blocking_set": B, "blocking_member": mv})
    return FubiniRefutation(D, B, tuple(explicit.items()), generic, mv, cv)


def fubini_non_pplus_witness() -> tuple[Callable[[int], PairedRowRule], Callable[..., FubiniRefutation]]:
    """The chain A_k = {(n, m) : n >= k} in Fr⊗Fr and its refuter."""
    return fubini_chain, fubini_refute


def verify_fubini_refutation(r: FubiniRefutation, horizon: int = 60) -> bool:
    if not r.member_verdict.proved_:
        return False
    if filter_member(FubiniFrFr(), r.blocking_set).status != r.member_verdict.status:
        return False
    for n in range(horizon):
        for m in range(horizon):
            if r.candidate.member((n, m)) and r.blocking_set.member((n, m)):
                return False
    return True


# -- verification -------------------------------------------------------------
def verify_pseudointersection(cert: PseudointersectionCertificate, generators, horizon: int = 10_000,
                              min_elements: int = 2) -> Verdict:
    """Re-check infinitude of A and each stored exception set below horizon."""
    A = cert.A
    inf = is_infinite(A)
    if not inf.proved_:
        return Verdict.refuted(reason="A is not certified infinite", detail=inf.to_json())
    members = [k for k in range(horizon) if A.member(k)]
    if len(members) < min_elements:
        return Verdict.refuted(reason=f"fewer than {min_elements} elements below the horizon")
    for j, G in enumerate(generators):
        v = is_subset_mod_finite(A, G)
        if v.refuted_:
            return Verdict.refuted(reason="exceptions infinite", generator=j, witness=v.certificate)
        stored = set(cert.exceptions[j])
        actual = {k for k in members if not G.member(k)}
        bad = sorted(stored.symmetric_difference(actual) - {k for k in stored if k >= horizon})
        if bad:
            k = bad[0]
            return Verdict.refuted(reason="exception set mismatch", generator=j, at=k,
                                   missing=k in actual)
    return Verdict.proved(elements_seen=len(members), generators=len(generators), horizon=horizon)
