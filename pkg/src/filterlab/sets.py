"""Finitely presented subsets of ω (and of ω×ω) with exact decisions.

Every description has a literal ``member`` that evaluates the definition
pointwise.  Closed-form questions (cofiniteness, infinitude, block counts,
eventual block hitting) go through the normal forms in ``forms``; when the
form is unavailable the answer is Unknown rather than a guess.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

from . import forms
from .forms import INF, PPForm, Piece, WForm
from .partition import BlockPartition
from .verdict import Verdict

ENUMERATION_LIMIT = 1_000_000


def pair(n: int, m: int) -> int:
    """Cantor pairing of (row n, column m)."""
    return (n + m) * (n + m + 1) // 2 + m


def unpair(k: int) -> tuple[int, int]:
    w = (math.isqrt(8 * k + 1) - 1) // 2
    m = k - w * (w + 1) // 2
    return w - m, m


class SetDescription:
    """Base class; subclasses are frozen dataclasses."""

    universe = "omega"

    def member(self, k) -> bool:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def __and__(self, other: "SetDescription") -> "SetDescription":
        return And((self, other))

    def __or__(self, other: "SetDescription") -> "SetDescription":
        return Or((self, other))

    def __invert__(self) -> "SetDescription":
        return Not(self)

    def __str__(self) -> str:
        return self.render()


def _ints(xs) -> tuple[int, ...]:
    return tuple(sorted(set(int(x) for x in xs)))


@dataclass(frozen=True, eq=True)
class Finite(SetDescription):
    elements: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", _ints(self.elements))

    def member(self, k) -> bool:
        return k in self.elements

    def render(self) -> str:
        return f"finite([{','.join(map(str, self.elements))}])"


@dataclass(frozen=True)
class Cofinite(SetDescription):
    complement: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "complement", _ints(self.complement))

    def member(self, k) -> bool:
        return k not in self.complement

    def render(self) -> str:
        return f"cofinite(drop=[{','.join(map(str, self.complement))}])"


@dataclass(frozen=True)
class Truncated(SetDescription):
    """Explicit bits over [0, len(bits)), then all-in (full) or all-out."""

    bits: str = ""
    tail_full: bool = False

    def __post_init__(self):
        if set(self.bits) - {"0", "1"}:
            raise ValueError("bits must be a 0/1 string")

    def member(self, k) -> bool:
        if k < len(self.bits):
            return self.bits[k] == "1"
        return self.tail_full

    def render(self) -> str:
        return f"trunc(bits={self.bits or 'e'},tail={'full' if self.tail_full else 'empty'})"


@dataclass(frozen=True)
class Interval(SetDescription):
    lo: int = 0
    hi: Optional[int] = None  # None = unbounded

    def member(self, k) -> bool:
        return k >= self.lo and (self.hi is None or k < self.hi)

    def render(self) -> str:
        return f"interval({self.lo},{'inf' if self.hi is None else self.hi})"


@dataclass(frozen=True)
class Periodic(SetDescription):
    """Explicit bits over [0, len(head)), then ``cycle`` repeated forever."""

    head: str = ""
    cycle: str = "0"

    def __post_init__(self):
        if set(self.head + self.cycle) - {"0", "1"} or not self.cycle:
            raise ValueError("head and a nonempty cycle must be 0/1 strings")

    def member(self, k) -> bool:
        if k < len(self.head):
            return self.head[k] == "1"
        return self.cycle[(k - len(self.head)) % len(self.cycle)] == "1"

    def render(self) -> str:
        return f"periodic(head={self.head or 'e'},cycle={self.cycle})"


def periodic_of(f: PPForm) -> Periodic:
    """The Periodic description of a piecewise periodic form."""
    last = f.last
    head = "".join("1" if f.member(k) else "0" for k in range(last.start))
    return Periodic(head, "".join("1" if b else "0" for b in last.bits))


SELECTORS = ("all", "none", "first", "allbutfirst", "removed")


@dataclass(frozen=True)
class Selector:
    kind: str = "all"
    t: int = 0
    removed: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in SELECTORS:
            raise ValueError(f"unknown selector {self.kind!r}")
        object.__setattr__(self, "removed", _ints(self.removed))

    def windows(self) -> Optional[forms.Windows]:
        return {
            "all": forms.FULL_WINDOWS,
            "none": (),
            "first": forms.win_normalize([(0, self.t)]),
            "allbutfirst": forms.win_normalize([(self.t, INF)]),
        }.get(self.kind)

    def render(self) -> str:
        if self.kind in ("first", "allbutfirst"):
            return f"{self.kind}({self.t})"
        if self.kind == "removed":
            return f"removed([{','.join(map(str, self.removed))}])"
        return self.kind


@dataclass(frozen=True)
class BlockRule(SetDescription):
    partition: BlockPartition = field(default_factory=lambda: BlockPartition.constant(1))
    selector: Selector = field(default_factory=Selector)

    def member(self, k) -> bool:
        sel = self.selector
        if sel.kind == "removed":
            return k not in sel.removed
        n = self.partition.block_of(k)
        pos = k - self.partition.start(n)
        if sel.kind == "all":
            return True
        if sel.kind == "none":
            return False
        if sel.kind == "first":
            return pos < sel.t
        return pos >= sel.t

    def render(self) -> str:
        return f"blocks(sizes={self.partition.render()},rule={self.selector.render()})"


@dataclass(frozen=True)
class Not(SetDescription):
    part: SetDescription = None

    def __post_init__(self):
        object.__setattr__(self, "universe", self.part.universe)

    def member(self, k) -> bool:
        return not self.part.member(k)

    def render(self) -> str:
        return f"not({self.part.render()})"


def _check_universe(parts) -> str:
    us = {p.universe for p in parts}
    if len(us) > 1:
        raise ValueError("cannot combine subsets of omega with subsets of omega x omega")
    return us.pop() if us else "omega"


@dataclass(frozen=True)
class And(SetDescription):
    parts: tuple[SetDescription, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "universe", _check_universe(self.parts))

    def member(self, k) -> bool:
        return all(p.member(k) for p in self.parts)

    def render(self) -> str:
        return f"and({','.join(p.render() for p in self.parts)})"


@dataclass(frozen=True)
class Or(SetDescription):
    parts: tuple[SetDescription, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "universe", _check_universe(self.parts))

    def member(self, k) -> bool:
        return any(p.member(k) for p in self.parts)

    def render(self) -> str:
        return f"or({','.join(p.render() for p in self.parts)})"


@dataclass(frozen=True)
class Preimage(SetDescription):
    """xi^{-1}(target) for a set of block indices."""

    target: SetDescription = None
    partition: BlockPartition = None

    def member(self, k) -> bool:
        return self.target.member(self.partition.block_of(k))

    def render(self) -> str:
        return f"pre({self.target.render()},sizes={self.partition.render()})"


@dataclass(frozen=True)
class IndexSet(SetDescription):
    """{k : x_k in target} for a sequence x in omega ∪ {inf}."""

    seq: object = None
    target: SetDescription = None

    def member(self, k) -> bool:
        x = self.seq(k)
        return x != "inf" and self.target.member(x)

    def render(self) -> str:
        return f"index({self.seq.render()},{self.target.render()})"


@dataclass(frozen=True)
class PairedRowRule(SetDescription):
    """A subset of ω×ω given row by row.

    Rows below ``rows_from`` are empty; row n >= rows_from is ``row`` (moved
    right by n when ``shift``) unless an override supplies it explicitly.
    Points may be queried as (n, m) pairs or as Cantor codes.
    """

    row: SetDescription = None
    shift: bool = False
    rows_from: int = 0
    overrides: tuple[tuple[int, SetDescription], ...] = ()

    universe = "pairs"

    def __post_init__(self):
        object.__setattr__(self, "overrides", tuple(sorted(self.overrides, key=lambda t: t[0])))
        if self.row.universe != "omega" or any(r.universe != "omega" for _, r in self.overrides):
            raise ValueError("rows must be subsets of omega")

    def row_set(self, n: int) -> Optional[SetDescription]:
        """Row n as a subset of ω; None for an empty row."""
        for i, r in self.overrides:
            if i == n:
                return r
        if n < self.rows_from:
            return None
        if self.shift and n:
            return Shifted(self.row, n)
        return self.row

    def member(self, k) -> bool:
        n, m = k if isinstance(k, tuple) else unpair(k)
        r = self.row_set(n)
        return r is not None and r.member(m)

    def render(self) -> str:
        over = ",".join(f"at({i},{r.render()})" for i, r in self.overrides)
        return (f"rows({self.row.render()},shift={int(self.shift)},"
                f"from={self.rows_from},over=[{over}])")


@dataclass(frozen=True)
class Shifted(SetDescription):
    """{m + by : m in base}; used for rows of PairedRowRule."""

    base: SetDescription = None
    by: int = 0

    def member(self, k) -> bool:
        return k >= self.by and self.base.member(k - self.by)

    def render(self) -> str:
        return f"shift({self.base.render()},{self.by})"


# -- handy constructors -------------------------------------------------------
def omega() -> SetDescription:
    return Cofinite(())


def empty() -> SetDescription:
    return Finite(())


def evens() -> SetDescription:
    return BlockRule(BlockPartition.constant(2), Selector("first", 1))


def odds() -> SetDescription:
    return BlockRule(BlockPartition.constant(2), Selector("allbutfirst", 1))


def first_points(t: int) -> SetDescription:
    return Interval(0, t)


# -- normal forms -------------------------------------------------------------
def _const_partition_pp(P: BlockPartition, w: forms.Windows) -> PPForm:
    segs: list[tuple[int, tuple[bool, ...]]] = []
    for n, size in enumerate(P.prefix):
        s = P.start(n)
        for off, bit in forms.win_segments(w, size):
            segs.append((s + off, (bit,)))
    segs.append((P.start(len(P.prefix)), tuple(forms.win_member(w, x) for x in range(P.c))))
    return PPForm.from_segments(segs)


def _preimage_form(fb, P: BlockPartition):
    if not isinstance(fb, PPForm):
        return None
    L = len(P.prefix)
    segs: list[tuple[int, tuple[bool, ...]]] = []
    for j, piece in enumerate(fb.pieces):
        b, e = piece.start, fb.end(j)
        if piece.period == 1:
            segs.append((P.start(b), piece.bits))
            continue
        split = e if P.unbounded else min(e, max(b, L))
        if split == INF or split - b > forms.MAX_MATERIALIZED_BLOCKS:
            return None
        for i in range(b, split):
            segs.append((P.start(i), (piece.at(i),)))
        if split < e:
            c = P.c
            segs.append((P.start(split), tuple(piece.at(split + x // c) for x in range(piece.period * c))))
    return PPForm.from_segments(segs)


@lru_cache(maxsize=8192)
def form_of(A: SetDescription) -> Optional[forms.Form]:
    """The exact normal form of A, or None when no closed form is known."""
    if A.universe != "omega":
        return None
    try:
        if isinstance(A, Finite):
            return PPForm.from_points(A.elements, True)
        if isinstance(A, Cofinite):
            return PPForm.from_points(A.complement, False)
        if isinstance(A, Truncated):
            segs = [(i, (b == "1",)) for i, b in enumerate(A.bits)]
            segs.append((len(A.bits), (A.tail_full,)))
            return PPForm.from_segments(segs)
        if isinstance(A, Periodic):
            segs = [(i, (b == "1",)) for i, b in enumerate(A.head)]
            segs.append((len(A.head), tuple(b == "1" for b in A.cycle)))
            return PPForm.from_segments(segs)
        if isinstance(A, Interval):
            return PPForm.interval(A.lo, INF if A.hi is None else A.hi)
        if isinstance(A, BlockRule):
            sel = A.selector
            if sel.kind == "removed":
                return PPForm.from_points(sel.removed, False)
            w = sel.windows()
            if w == () or w == forms.FULL_WINDOWS:
                return PPForm.const(bool(w))
            if A.partition.bounded:
                return _const_partition_pp(A.partition, w)
            return WForm(A.partition, 0, PPForm.const(False), w)
        if isinstance(A, Not):
            return forms.negate(form_of(A.part))
        if isinstance(A, (And, Or)):
            op = (lambda x, y: x and y) if isinstance(A, And) else (lambda x, y: x or y)
            f = form_of(A.parts[0]) if A.parts else PPForm.const(isinstance(A, And))
            for p in A.parts[1:]:
                f = forms.combine(f, form_of(p), op)
            return f
        if isinstance(A, Preimage):
            return _preimage_form(form_of(A.target), A.partition)
        if isinstance(A, Shifted):
            fb = form_of(A.base)
            if isinstance(fb, PPForm):
                segs = [(0, (False,))] if A.by else []
                segs += [(p.start + A.by, p.bits) for p in fb.pieces]
                return PPForm.from_segments(segs)
            return None
        if isinstance(A, IndexSet):
            index_form = getattr(A.seq, "index_form", None)
            return index_form(A.target) if index_form else None
    except forms.FormTooLarge:
        return None
    return None


# -- operations ---------------------------------------------------------------
def member(A: SetDescription, n) -> bool:
    return A.member(n)


def block_count(A: SetDescription, P: BlockPartition, n: int) -> int:
    """|A ∩ xi^{-1}(n)|, exactly."""
    f = form_of(A)
    if f is not None:
        c = forms.block_count(f, P, n)
        if c is not None:
            return c
    blk = P.block(n)
    if len(blk) > ENUMERATION_LIMIT:
        raise ValueError(f"block {n} too large to enumerate without a closed form")
    return sum(1 for k in blk if A.member(k))


def _pair_is_cofinite(A: SetDescription) -> Verdict:
    if isinstance(A, PairedRowRule):
        if A.rows_from > 0 and not any(i == 0 for i, _ in A.overrides):
            return Verdict.refuted(scheme="empty-row", row=0)
        v = is_cofinite(A.row)
        if v.refuted_ or (v.proved_ and (v.certificate["bound"] > 0 or A.shift)):
            n = max([A.rows_from] + [i + 1 for i, _ in A.overrides])
            return Verdict.refuted(scheme="every-row-misses", from_row=n)
    return Verdict.unknown(0, reason="no closed form for this subset of omega x omega")


def is_cofinite(A: SetDescription) -> Verdict:
    """Proved(bound=b) with [b, inf) ⊆ A, or Refuted with an infinite family
    of non-members, or Unknown when no closed form is available."""
    if A.universe == "pairs":
        return _pair_is_cofinite(A)
    f = form_of(A)
    if f is None:
        return Verdict.unknown(0, reason="no closed form")
    if isinstance(f, PPForm):
        if f.is_cofinite():
            return Verdict.proved(bound=f.cofinite_bound())
        last = f.last
        x = next(i for i, b in enumerate(last.bits) if not b)
        return Verdict.refuted(scheme="progression", first=last.start + x, step=last.period)
    if f.is_cofinite():
        k = f.head.last_point_below(f.cut, False)
        return Verdict.proved(bound=0 if k is None else k + 1)
    p = forms.win_first_gap(f.windows)
    n1 = f.partition.first_block_with_size_above(p, f.n0)
    return Verdict.refuted(scheme="block-position", partition=f.partition.render(),
                           position=p, from_block=n1)


def is_infinite(A: SetDescription) -> Verdict:
    """Proved with a family of members, or Refuted(bound=b): A ⊆ [0, b)."""
    v = is_cofinite(Not(A))
    if v.proved_:
        return Verdict.refuted(bound=v.certificate["bound"])
    if v.refuted_:
        return Verdict.proved(**v.certificate)
    return v


def is_subset_mod_finite(A: SetDescription, B: SetDescription) -> Verdict:
    """A ⊆* B, decided as cofiniteness of (not A) or B."""
    return is_cofinite(Or((Not(A), B)))


def finite_elements(A: SetDescription) -> list[int]:
    """The members of a set whose form certifies finiteness."""
    f = form_of(A)
    if isinstance(f, PPForm):
        return f.elements()
    if isinstance(f, WForm) and not f.windows:
        return f.head.elements() if not f.head.is_infinite() else [
            k for k in range(f.cut) if f.head.member(k)]
    raise ValueError("finiteness not certified")


def next_member(A: SetDescription, k: int, horizon: Optional[int] = None) -> Optional[int]:
    """Least member >= k; uses the closed form when present, else scans up to
    the horizon (returning None when nothing is found)."""
    f = form_of(A)
    if f is not None:
        return f.next_point(k, True)
    if horizon is None:
        raise ValueError("no closed form; a horizon is required")
    for j in range(k, horizon):
        if A.member(j):
            return j
    return None


def verify_cofinite(A: SetDescription, verdict: Verdict, horizon: int) -> bool:
    """Re-check a cofiniteness verdict by literal membership up to horizon."""
    cert = verdict.certificate
    if verdict.proved_:
        return all(A.member(k) for k in range(cert["bound"], horizon))
    if verdict.refuted_:
        if cert.get("scheme") == "progression":
            pts = range(cert["first"], horizon, cert["step"])
        elif cert.get("scheme") == "block-position":
            P = BlockPartition.parse(cert["partition"])
            pts = []
            n = cert["from_block"]
            while P.start(n) < horizon:
                pts.append(P.start(n) + cert["position"])
                n += 1
            pts = [p for p in pts if p < horizon]
        else:
            return False
        return len(pts) > 0 and not any(A.member(k) for k in pts)
    return False


# -- block hitting ------------------------------------------------------------
def _stable_block(f, P: BlockPartition) -> Optional[tuple[int, int]]:
    """(m_stable, cycle): from block m_stable on, the count in block m is
    either monotone in m (cycle 0) or periodic with the given cycle."""
    L = len(P.prefix)
    if isinstance(f, WForm):
        if f.partition != P:
            return None
        return max(f.n0, L), 0
    last = f.last
    m_e = P.block_of(last.start) + 1
    if P.bounded:
        return max(m_e, L), last.period
    return max(m_e, L, P.first_block_with_size_above(last.period - 1)), 0


def hit_threshold(A: SetDescription, P: BlockPartition, scan_limit: int = 200_000):
    """Least n such that A meets every block m >= n, or None when A misses
    infinitely many blocks.  Raises LookupError without a closed form."""
    f = form_of(A)
    st = None if f is None else _stable_block(f, P)
    if st is None:
        raise LookupError("no closed form for block hitting")
    m_stable, cycle = st
    if cycle:
        if any(block_count(A, P, m) == 0 for m in range(m_stable, m_stable + cycle)):
            return None
    else:
        if forms.block_count(f, P, m_stable) == 0:
            # count is nondecreasing from here; find where it turns positive
            if isinstance(f, WForm):
                if not f.windows:
                    return None
                m_stable = P.first_block_with_size_above(f.windows[0][0], m_stable)
            else:
                if f.last.empty:
                    return None
                m_stable = P.first_block_with_size_above(f.last.period - 1, m_stable)
    if m_stable > scan_limit:
        raise LookupError("threshold search exceeds scan limit")
    for m in range(m_stable - 1, -1, -1):
        if block_count(A, P, m) == 0:
            return m + 1
    return 0


def blocks_hit_from(A: SetDescription, P: BlockPartition, n: int) -> Verdict:
    """Does A meet xi^{-1}(m) for every m >= n?"""
    try:
        t = hit_threshold(A, P)
    except LookupError as e:
        return Verdict.unknown(0, reason=str(e))
    if t is None:
        f = form_of(A)
        m = n
        while block_count(A, P, m) != 0:
            m += 1
        return Verdict.refuted(block=m, note="misses infinitely many blocks")
    if t <= n:
        return Verdict.proved(threshold=t, from_block=n)
    return Verdict.refuted(block=t - 1)
