"""Haar measure of the block-hitting families
F_n = {A ⊆ ω : A ∩ xi^{-1}(k) ≠ ∅ for all k >= n}.

mu(F_n) = prod_{k >= n} (1 - 2^{-|xi^{-1}(k)|}).  Partial products are exact
dyadic rationals; the tail is enclosed with 1 - sum x_k <= prod (1 - x_k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .partition import BlockPartition
from .verdict import Verdict


@dataclass(frozen=True)
class DyadicInterval:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        for x in (self.lower, self.upper):
            d = x.denominator
            if d & (d - 1):
                raise ValueError(f"{x} is not dyadic")
        if not (0 <= self.lower <= self.upper <= 1):
            raise ValueError("need 0 <= lower <= upper <= 1")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper

    def to_json(self) -> dict:
        def enc(x: Fraction) -> dict:
            return {"numerator": str(x.numerator), "denominator": str(x.denominator),
                    "decimal": f"{float(x):.17g}"}
        return {"lower": enc(self.lower), "upper": enc(self.upper), "width": f"{float(self.width):.3e}"}


EXACT_SIZE_CAP = 4096


def partial_product(P: BlockPartition, n: int, factors: int) -> Fraction:
    """prod_{k=n}^{n+factors-1} (2^{s_k} - 1) / 2^{s_k}, exactly."""
    num, exp = 1, 0
    for k in range(n, n + factors):
        s = P.size(k)
        num *= (1 << s) - 1
        exp += s
    return Fraction(num, 1 << exp)


def tail_sum_bound(P: BlockPartition, m: int) -> Optional[Fraction]:
    """A dyadic upper bound on sum_{k >= m} 2^{-s_k}, or None if it diverges."""
    L = len(P.prefix)
    head = sum((Fraction(1, 1 << P.prefix[k]) for k in range(m, L)), Fraction(0))
    m = max(m, L)
    if P.tail in ("const", "log2"):
        return None
    if P.tail == "linear":
        return head + Fraction(2, 1 << (m + P.c))
    # pow2: terms 2^{-2^{k+c}} at most halve each step
    return head + Fraction(2, 1 << (1 << (m + P.c)))


def block_family_measure(P: BlockPartition, n: int, factors: int) -> DyadicInterval:
    """Enclosure of mu(F_n) using the first ``factors`` factors exactly."""
    if factors < 1:
        raise ValueError("factors must be >= 1")
    # factors from blocks past EXACT_SIZE_CAP points are within 2^-4096 of 1;
    # they are left to the tail bound instead of being multiplied out
    while factors > 1 and P.size(n + factors - 1) > EXACT_SIZE_CAP:
        factors -= 1
    upper = partial_product(P, n, factors)
    t = tail_sum_bound(P, n + factors)
    lower = upper * (1 - t) if t is not None and t < 1 else Fraction(0)
    return DyadicInterval(lower, upper)


def factors_below(P: BlockPartition, n: int, eps: Fraction, max_factors: int = 1_000_000) -> Optional[int]:
    """Least factor count whose exact partial product is < eps."""
    num, exp = 1, 0
    for j in range(max_factors):
        s = P.size(n + j)
        num *= (1 << s) - 1
        exp += s
        if Fraction(num, 1 << exp) < eps:
            return j + 1
    return None


def is_null_certificate(P: BlockPartition, eps: Fraction = Fraction(1, 100)) -> Verdict:
    """Proved iff sum 2^{-s_k} diverges (every F_n is null, so the union is)."""
    if P.tail == "const":
        cert = {"tail_rule": P.render(), "argument": f"each tail term equals 2^-{P.c}; the series diverges"}
    elif P.tail == "log2":
        cert = {"tail_rule": P.render(),
                "argument": f"2^-ceil(log2(k+{P.c})) > 1/(2(k+{P.c})); harmonic comparison diverges"}
    else:
        m = 0
        while tail_sum_bound(P, m) >= 1:
            m += 1
        enc = block_family_measure(P, 0, max(m, 1))
        return Verdict.refuted(tail_rule=P.render(), tail_sum_bound=tail_sum_bound(P, max(m, 1)),
                               lower_bound=enc.to_json()["lower"], factors=max(m, 1))
    k = factors_below(P, 0, eps)
    cert["partial_product_below"] = str(eps)
    cert["factors"] = k
    cert["value"] = f"{float(partial_product(P, 0, k)):.6g}" if k else None
    return Verdict.proved(**cert)


def choose_null_meager_partition() -> BlockPartition:
    """Sizes ceil(log2(n + 2)): unbounded, and sum 2^{-size} diverges."""
    P = BlockPartition.log2(2)
    assert P.unbounded and is_null_certificate(P).proved_
    return P


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    samples: int
    hits: int

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr, "samples": self.samples, "hits": self.hits}


def monte_carlo_measure(P: BlockPartition, n: int, factors: int, samples: int, seed: int,
                        chunk: int = 100_000) -> MonteCarloEstimate:
    """Fraction of uniform random subsets of blocks n..n+factors-1 that meet
    every block; deterministic for a given seed."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sizes = [P.size(k) for k in range(n, n + factors)]
    bounds = np.cumsum([0] + sizes)
    rng = np.random.default_rng(seed)
    hits = 0
    left = samples
    while left:
        m = min(chunk, left)
        bits = rng.random((m, int(bounds[-1]))) < 0.5
        ok = np.ones(m, dtype=bool)
        for a, b in zip(bounds[:-1], bounds[1:]):
            ok &= bits[:, a:b].any(axis=1)
        hits += int(ok.sum())
        left -= m
    p = hits / samples
    return MonteCarloEstimate(p, math.sqrt(max(p * (1 - p), 0.0) / samples), samples, hits)
