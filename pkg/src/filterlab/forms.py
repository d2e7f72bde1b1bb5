"""Exact normal forms for the describable subsets of ω.

Two forms cover every closed-form case:

* ``PPForm``: piecewise periodic.  ω is cut at finitely many breakpoints and
  each piece repeats a bit pattern.  Finite/cofinite sets, intervals and
  block rules over constant-size partitions all land here.
* ``WForm``: block windows over an unbounded partition.  From block ``n0`` on,
  the set picks the same positions (a union of windows ``[a, b)`` with ``b``
  possibly infinite) inside every block; below ``s_{n0}`` a ``PPForm`` head
  is authoritative.

Both support exact boolean combination where the result stays representable;
otherwise callers get ``None`` and must answer Unknown.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

from .partition import BlockPartition

INF = math.inf
MAX_PERIOD = 1 << 16
MAX_MATERIALIZED_BLOCKS = 200_000


class FormTooLarge(Exception):
    pass


def _reduce_bits(bits: tuple[bool, ...]) -> tuple[bool, ...]:
    n = len(bits)
    for d in range(1, n + 1):
        if n % d == 0 and all(bits[i] == bits[i % d] for i in range(n)):
            return bits[:d]
    return bits


@dataclass(frozen=True)
class Piece:
    start: int
    period: int
    bits: tuple[bool, ...]

    def at(self, k: int) -> bool:
        return self.bits[(k - self.start) % self.period]

    @property
    def empty(self) -> bool:
        return not any(self.bits)

    @property
    def full(self) -> bool:
        return all(self.bits)


def _piece(start: int, bits) -> Piece:
    bits = _reduce_bits(tuple(bool(b) for b in bits))
    return Piece(start, len(bits), bits)


@dataclass(frozen=True)
class PPForm:
    pieces: tuple[Piece, ...]

    # -- construction -------------------------------------------------------
    @staticmethod
    def const(value: bool) -> "PPForm":
        return PPForm((Piece(0, 1, (bool(value),)),))

    @staticmethod
    def from_segments(segs: list[tuple[int, tuple[bool, ...]]]) -> "PPForm":
        """Build from (start, bits) pairs; starts strictly increasing from 0."""
        pieces = [_piece(s, b) for s, b in segs]
        return PPForm(tuple(pieces)).normalized()

    @staticmethod
    def from_points(points, value: bool = True) -> "PPForm":
        pts = sorted(set(int(p) for p in points))
        segs: list[tuple[int, tuple[bool, ...]]] = []
        cur = 0
        for p in pts:
            if p > cur:
                segs.append((cur, (not value,)))
            segs.append((p, (value,)))
            cur = p + 1
        segs.append((cur, (not value,)))
        if segs[0][0] != 0:
            segs.insert(0, (0, (not value,)))
        return PPForm.from_segments(segs)

    @staticmethod
    def interval(lo: int, hi) -> "PPForm":
        segs = []
        if lo > 0:
            segs.append((0, (False,)))
        if hi == INF or hi is None:
            segs.append((lo, (True,)))
        elif hi > lo:
            segs.append((lo, (True,)))
            segs.append((hi, (False,)))
        else:
            return PPForm.const(False)
        return PPForm.from_segments(segs)

    def normalized(self) -> "PPForm":
        out: list[Piece] = []
        for p in self.pieces:
            if out:
                q = out[-1]
                if q.period == p.period and all(
                    q.at(p.start + x) == p.at(p.start + x) for x in range(p.period)
                ):
                    continue
            out.append(p)
        return PPForm(tuple(out))

    # -- access -------------------------------------------------------------
    @property
    def starts(self) -> list[int]:
        return [p.start for p in self.pieces]

    def _idx(self, k: int) -> int:
        return bisect_right(self.starts, k) - 1

    def end(self, j: int):
        return self.pieces[j + 1].start if j + 1 < len(self.pieces) else INF

    def member(self, k: int) -> bool:
        return self.pieces[self._idx(k)].at(k)

    @property
    def last(self) -> Piece:
        return self.pieces[-1]

    def splice(self, cut: int, tail: list[Piece]) -> "PPForm":
        """Keep this form below ``cut`` and continue with ``tail`` (whose first
        piece starts at ``cut``)."""
        kept = [p for p in self.pieces if p.start < cut]
        return PPForm(tuple(kept + list(tail))).normalized()

    # -- algebra ------------------------------------------------------------
    def negate(self) -> "PPForm":
        return PPForm(tuple(Piece(p.start, p.period, tuple(not b for b in p.bits))
                            for p in self.pieces))

    def combine(self, other: "PPForm", op: Callable[[bool, bool], bool]) -> "PPForm":
        cuts = sorted(set(self.starts) | set(other.starts))
        segs = []
        for b in cuts:
            pf = self.pieces[self._idx(b)]
            pg = other.pieces[other._idx(b)]
            L = math.lcm(pf.period, pg.period)
            if L > MAX_PERIOD:
                raise FormTooLarge(f"period {L}")
            segs.append((b, tuple(op(pf.at(b + x), pg.at(b + x)) for x in range(L))))
        return PPForm.from_segments(segs)

    # -- queries ------------------------------------------------------------
    def is_infinite(self) -> bool:
        return not self.last.empty

    def is_cofinite(self) -> bool:
        return self.last.full

    def progressions(self, a: int = 0, b=INF, value: bool = True) -> Iterator[tuple[int, int, float]]:
        """Arithmetic progressions (first, step, count) partitioning the
        points k in [a, b) with member(k) == value."""
        for j, p in enumerate(self.pieces):
            lo, hi = max(a, p.start), min(b, self.end(j))
            if lo >= hi:
                continue
            for x, bit in enumerate(p.bits):
                if bit != value:
                    continue
                k0 = lo + ((p.start + x - lo) % p.period)
                if k0 >= hi:
                    continue
                cnt = INF if hi == INF else (hi - 1 - k0) // p.period + 1
                yield k0, p.period, cnt

    def count(self, a: int, b: int, value: bool = True) -> int:
        return sum(int(c) for _, _, c in self.progressions(a, b, value))

    def last_point_below(self, cut: int, value: bool) -> Optional[int]:
        """Largest k < cut with member(k) == value."""
        best = None
        for first, step, cnt in self.progressions(0, cut, value):
            k = first + step * (cnt - 1)
            if best is None or k > best:
                best = k
        return best

    def cofinite_bound(self) -> int:
        """Least b with [b, inf) inside the set (requires is_cofinite)."""
        assert self.is_cofinite()
        k = self.last_point_below(self.last.start, False)
        return 0 if k is None else k + 1

    def next_point(self, k: int, value: bool = True) -> Optional[int]:
        j = self._idx(k)
        while j < len(self.pieces):
            p = self.pieces[j]
            lo, hi = max(k, p.start), self.end(j)
            best = None
            for x, bit in enumerate(p.bits):
                if bit == value:
                    c = lo + ((p.start + x - lo) % p.period)
                    if c < hi and (best is None or c < best):
                        best = c
            if best is not None:
                return best
            j += 1
        return None

    def elements(self, limit: int = 1_000_000) -> list[int]:
        """All members of a finite set."""
        if self.is_infinite():
            raise ValueError("set is infinite")
        out = []
        for first, step, cnt in self.progressions(0, self.last.start):
            if len(out) + cnt > limit:
                raise FormTooLarge("too many elements")
            out.extend(range(first, first + step * int(cnt), step))
        return sorted(out)


# -- windows ------------------------------------------------------------------
Windows = tuple[tuple[int, float], ...]
FULL_WINDOWS: Windows = ((0, INF),)


def win_member(w: Windows, pos: int) -> bool:
    return any(a <= pos < b for a, b in w)


def win_normalize(w) -> Windows:
    segs = sorted((a, b) for a, b in w if b > a)
    out: list[list] = []
    for a, b in segs:
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((int(a), b if b == INF else int(b)) for a, b in out)


def win_op(w1: Windows, w2: Windows, op) -> Windows:
    cuts = sorted({0} | {x for a, b in w1 + w2 for x in (a, b) if x != INF})
    res = []
    for i, c in enumerate(cuts):
        nxt = cuts[i + 1] if i + 1 < len(cuts) else INF
        if op(win_member(w1, c), win_member(w2, c)):
            res.append((c, nxt))
    return win_normalize(res)


def win_complement(w: Windows) -> Windows:
    return win_op(w, (), lambda x, _: not x)


def win_count(w: Windows, size: int) -> int:
    return sum(max(0, min(b, size) - a) for a, b in w if a < size)


def win_first_gap(w: Windows) -> Optional[int]:
    """Least position not covered, or None when w covers every position."""
    pos = 0
    for a, b in w:
        if a > pos:
            return pos
        pos = max(pos, b)
    return None if pos == INF else int(pos)


def win_segments(w: Windows, size: int) -> list[tuple[int, bool]]:
    """Elementary (offset, in-set) segments of one block of the given size."""
    cuts = sorted({0} | {min(x, size) for a, b in w for x in (a, b) if x != INF and x < size})
    return [(c, win_member(w, c)) for c in cuts if c < size]


@dataclass(frozen=True)
class WForm:
    partition: BlockPartition
    n0: int
    head: PPForm
    windows: Windows

    @property
    def cut(self) -> int:
        return self.partition.start(self.n0)

    def member(self, k: int) -> bool:
        if k < self.cut:
            return self.head.member(k)
        n = self.partition.block_of(k)
        return win_member(self.windows, k - self.partition.start(n))

    def block_count(self, n: int) -> int:
        P = self.partition
        if n >= self.n0:
            return win_count(self.windows, P.size(n))
        return self.head.count(P.start(n), P.start(n + 1))

    def materialize(self, m: int) -> PPForm:
        """A PPForm agreeing with this set on [0, s_m); m >= n0."""
        m = max(m, self.n0)
        if m - self.n0 > MAX_MATERIALIZED_BLOCKS:
            raise FormTooLarge("too many blocks to materialize")
        P = self.partition
        tail: list[Piece] = []
        s = P.start(self.n0)
        for n in range(self.n0, m):
            size = P.size(n)
            for off, bit in win_segments(self.windows, size):
                tail.append(Piece(s + off, 1, (bit,)))
            s += size
        tail.append(Piece(s, 1, (False,)))
        return self.head.splice(self.cut, tail)

    def negate(self) -> "WForm":
        return WForm(self.partition, self.n0, self.head.negate(), win_complement(self.windows))

    def is_infinite(self) -> bool:
        return bool(self.windows)

    def is_cofinite(self) -> bool:
        return self.windows == FULL_WINDOWS

    def next_point(self, k: int, value: bool = True) -> Optional[int]:
        if k < self.cut:
            c = self.head.next_point(k, value)
            if c is not None and c < self.cut:
                return c
            k = self.cut
        w = self.windows if value else win_complement(self.windows)
        if not w:
            return None
        P = self.partition
        n = P.block_of(k)
        while True:
            s, size = P.start(n), P.size(n)
            for a, b in w:
                pos = max(a, k - s)
                if pos < min(b, size):
                    return s + pos
            n += 1


Form = Union[PPForm, WForm]


def flatten(w: WForm) -> Form:
    """Return a PPForm when the windows are trivial, else w unchanged."""
    if w.windows == () or w.windows == FULL_WINDOWS:
        return w.head.splice(w.cut, [Piece(w.cut, 1, (bool(w.windows),))])
    return w


def lift(pp: PPForm, P: BlockPartition) -> Optional[WForm]:
    """View an eventually-constant PPForm as a window form over P."""
    last = pp.last
    if not (last.empty or last.full):
        return None
    n = P.block_of(last.start)
    n0 = n if P.start(n) == last.start else n + 1
    return WForm(P, n0, pp, FULL_WINDOWS if last.full else ())


def negate(f: Optional[Form]) -> Optional[Form]:
    return None if f is None else f.negate()


def combine(f: Optional[Form], g: Optional[Form], op) -> Optional[Form]:
    if f is None or g is None:
        return None
    try:
        if isinstance(f, PPForm) and isinstance(g, PPForm):
            return f.combine(g, op)
        if isinstance(f, PPForm):
            f = lift(f, g.partition)
        elif isinstance(g, PPForm):
            g = lift(g, f.partition)
        if f is None or g is None or f.partition != g.partition:
            return None
        n0 = max(f.n0, g.n0)
        head = f.materialize(n0).combine(g.materialize(n0), op)
        return flatten(WForm(f.partition, n0, head, win_op(f.windows, g.windows, op)))
    except FormTooLarge:
        return None


def block_count(f: Form, P: BlockPartition, n: int) -> Optional[int]:
    if isinstance(f, WForm):
        if f.partition == P:
            return f.block_count(n)
        return None
    return f.count(P.start(n), P.start(n + 1))
