"""Brute-force oracles on small universes.

Nothing here calls the normal-form machinery: sets are explicit bit lists
over [0, N) with a declared tail, and every question is answered by
enumerating the definition.

Tails: ``"empty"`` and ``"full"`` extend by a constant; ``"periodic"``
repeats the N bits forever.  For periodic data a difference A \\ G is
finite exactly when it is empty on one period.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

TAILS = ("empty", "full", "periodic")
MAX_POINTS = 16
MAX_MEASURE_POINTS = 24


@dataclass(frozen=True)
class TruncatedUniverse:
    N: int

    def __post_init__(self):
        if not 0 < self.N <= MAX_MEASURE_POINTS:
            raise ValueError(f"universe size must be in 1..{MAX_MEASURE_POINTS}")


@dataclass(frozen=True)
class TruncSet:
    bits: tuple[bool, ...]
    tail: str = "periodic"

    def __post_init__(self):
        if self.tail not in TAILS:
            raise ValueError(self.tail)

    def at(self, k: int) -> bool:
        N = len(self.bits)
        if k < N:
            return self.bits[k]
        if self.tail == "periodic":
            return self.bits[k % N]
        return self.tail == "full"

    def infinite(self) -> bool:
        return self.tail == "full" or (self.tail == "periodic" and any(self.bits))


def _almost_subset(a: TruncSet, g: TruncSet) -> bool:
    """a \\ g finite, by cases on the tails."""
    if not a.infinite():
        return True
    if a.tail == "full":
        if g.tail == "full":
            return True
        if g.tail == "empty":
            return False
        return all(g.bits)
    # a periodic
    if g.tail == "full":
        return True
    if g.tail == "empty":
        return False
    return all(g.bits[k] for k in range(len(a.bits)) if a.bits[k])


@dataclass
class PseudoOracleResult:
    hypotheses_hold: bool
    points: tuple[int, ...]  # the points of the block union, in order
    valid_masks: np.ndarray  # masks over ``points`` of every valid candidate

    def is_valid(self, pattern: Sequence[bool]) -> bool:
        """Is the periodic set with this one-period pattern among the valid ones?"""
        if any(pattern[k] for k in range(len(pattern)) if k not in self.points):
            return False
        m = sum(1 << j for j, p in enumerate(self.points) if pattern[p])
        return bool(np.any(self.valid_masks == m))


def oracle_pseudointersection(generators: Sequence[TruncSet], blocks: Sequence[Sequence[int]],
                              N: int) -> PseudoOracleResult:
    """Enumerate every nonempty union of per-block choices (repeated with
    period N) and keep those almost contained in every generator.  Also
    decide the hypotheses: each finite intersection of generators meets every
    block of the period."""
    pts = tuple(sorted(p for b in blocks for p in b))
    if len(pts) > MAX_POINTS:
        raise ValueError(f"at most {MAX_POINTS} points")
    # blocks repeat forever, so "all but finitely many" means every block of
    # the period, seen through the eventual behaviour of each generator
    def eventually(g: TruncSet, p: int) -> bool:
        return g.bits[p] if g.tail == "periodic" else g.tail == "full"

    ok = True
    for r in range(len(generators) + 1):
        for T in itertools.combinations(generators, r):
            for b in blocks:
                if not any(all(eventually(g, p) for g in T) for p in b):
                    ok = False
    masks = np.arange(1, 1 << len(pts), dtype=np.int64)
    keep = np.ones(len(masks), dtype=bool)
    for g in generators:
        bad = 0
        for j, p in enumerate(pts):
            a = TruncSet(tuple(q == p for q in range(N)), "periodic")
            if not _almost_subset(a, g):
                bad |= 1 << j
        keep &= (masks & bad) == 0
    return PseudoOracleResult(ok, pts, masks[keep])


def oracle_measure(sizes: Sequence[int]) -> Fraction:
    """Fraction of subsets of the block union meeting every block."""
    total = sum(sizes)
    if total > MAX_MEASURE_POINTS:
        raise ValueError(f"at most {MAX_MEASURE_POINTS} points")
    masks = np.arange(1 << total, dtype=np.int64)
    ok = np.ones(len(masks), dtype=bool)
    start = 0
    for s in sizes:
        block = ((1 << s) - 1) << start
        ok &= (masks & block) != 0
        start += s
    return Fraction(int(ok.sum()), 1 << total)


def oracle_cn(values: Sequence[int], tail_value: int, limit_value: int, n: int,
              block_sizes: Sequence[int]) -> bool:
    """f ∈ C_n by direct scan: values[k] = f(x_k) for k < len(values), then
    f(x_k) = tail_value; blocks beyond the listed sizes lie in the tail (and
    there are always such blocks)."""
    if sum(block_sizes) < len(values):
        raise ValueError("listed blocks must cover the listed values")

    def f(k):
        return values[k] if k < len(values) else tail_value

    start = 0
    for m, s in enumerate(block_sizes):
        if m >= n and not any(f(k) == limit_value for k in range(start, start + s)):
            return False
        start += s
    return tail_value == limit_value
