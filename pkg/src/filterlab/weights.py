"""Weight rules for summable (F_sigma) filters and exact/enclosed sums of
weights over describable sets."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from . import forms
from .forms import INF, PPForm, WForm
from .partition import reciprocal_start_sum_diverges
from .sets import And, Not, Or, SetDescription, form_of

WEIGHTS = ("harmonic", "geometric", "counting")
EXACT_POINTS = 4096

mpmath.mp.dps = 60


def weight(rule: str, n: int) -> Fraction:
    if rule == "harmonic":
        return Fraction(1, n + 1)
    if rule == "geometric":
        return Fraction(1, 1 << n)
    if rule == "counting":
        return Fraction(1)
    raise ValueError(rule)


def total_diverges(rule: str) -> bool:
    return rule != "geometric"


def _ap_sum(rule: str, first: int, step: int, count) -> mpmath.mpf:
    if count == 0:
        return mpmath.mpf(0)
    if rule == "counting":
        return mpmath.inf if count == INF else mpmath.mpf(count)
    if rule == "geometric":
        return mpmath.mpf(_ap_sum_exact(rule, first, step, count).numerator) / _ap_sum_exact(
            rule, first, step, count).denominator
    if count == INF:
        return mpmath.inf
    a = mpmath.mpf(first + 1) / step
    return (mpmath.digamma(a + count) - mpmath.digamma(a)) / step


def _ap_sum_exact(rule: str, first: int, step: int, count) -> Fraction:
    if rule == "geometric":
        q = Fraction(1, 1 << step)
        head = Fraction(1, 1 << first)
        if count == INF:
            return head / (1 - q)
        return head * (1 - q ** int(count)) / (1 - q)
    if count == INF:
        raise ValueError("infinite sum")
    return sum((weight(rule, first + j * step) for j in range(int(count))), Fraction(0))


@dataclass(frozen=True)
class SumEnclosure:
    """Enclosure [lo, hi] of a weight sum; exact holds the rational value
    whenever it was computed exactly."""

    lo: mpmath.mpf
    hi: mpmath.mpf
    exact: Optional[Fraction] = None

    def exceeds(self, bound) -> Optional[bool]:
        if self.exact is not None:
            return self.exact > bound
        if self.lo > bound:
            return True
        if self.hi <= bound:
            return False
        return None


def _window_form(A: SetDescription, b: int) -> Optional[PPForm]:
    """A PPForm agreeing with A on [0, b), built from the closed forms of A's
    Boolean parts when A itself has none (e.g. block rules over two different
    partitions)."""
    f = form_of(A)
    if isinstance(f, PPForm):
        return f
    if isinstance(f, WForm):
        try:
            return f.materialize(f.partition.block_of(b - 1) + 1) if b > 0 else PPForm.const(False)
        except forms.FormTooLarge:
            return None
    if isinstance(A, Not):
        g = _window_form(A.part, b)
        return None if g is None else g.negate()
    if isinstance(A, (And, Or)):
        op = (lambda x, y: x and y) if isinstance(A, And) else (lambda x, y: x or y)
        out = PPForm.const(isinstance(A, And))
        for p in A.parts:
            g = _window_form(p, b)
            if g is None:
                return None
            out = out.combine(g, op)
        return out
    return None


def segment_sum(rule: str, A: SetDescription, a: int, b: int) -> SumEnclosure:
    """Sum of w_n over n in A ∩ [a, b), b finite."""
    f = form_of(A)
    if f is None and b > a:
        f = _window_form(A, b)
    if f is None:
        if b - a > 10 * EXACT_POINTS:
            raise ValueError("no closed form for a long segment")
        s = sum((weight(rule, k) for k in range(a, b) if A.member(k)), Fraction(0))
        v = mpmath.mpf(s.numerator) / s.denominator
        return SumEnclosure(v, v, s)
    if isinstance(f, WForm):
        f = f.materialize(f.partition.block_of(b - 1) + 1)
    if b - a <= EXACT_POINTS or rule in ("geometric", "counting"):
        s = sum((_ap_sum_exact(rule, *ap) for ap in f.progressions(a, b)), Fraction(0))
        v = mpmath.mpf(s.numerator) / s.denominator
        return SumEnclosure(v, v, s)
    total = mpmath.fsum(_ap_sum(rule, *ap) for ap in f.progressions(a, b))
    eps = mpmath.mpf(10) ** (-40) * (1 + abs(total))
    return SumEnclosure(total - eps, total + eps)


def sum_kind(rule: str, A: SetDescription) -> Optional[dict]:
    """Classify sum_{n in A} w_n: {'finite': True, 'value'|'bound': ...} or
    {'finite': False, 'argument': ...}; None without a closed form."""
    f = form_of(A)
    if f is None:
        return None
    if isinstance(f, PPForm):
        if not f.is_infinite():
            aps = list(f.progressions(0, f.last.start))
            if sum(c for _, _, c in aps) <= EXACT_POINTS:
                s = sum((_ap_sum_exact(rule, *ap) for ap in aps), Fraction(0))
                return {"finite": True, "value": s, "argument": "finite set"}
            s = mpmath.fsum(_ap_sum(rule, *ap) for ap in aps)
            return {"finite": True, "bound": float(s) * (1 + 1e-12), "argument": "finite set"}
        if rule == "geometric":
            s = sum((_ap_sum_exact(rule, *ap) for ap in f.progressions()), Fraction(0))
            return {"finite": True, "value": s, "argument": "geometric series over progressions"}
        last = f.last
        x = next(i for i, bit in enumerate(last.bits) if bit)
        return {"finite": False, "argument": "contains progression",
                "first": last.start + x, "step": last.period}
    P = f.partition
    if rule == "geometric":
        return {"finite": True, "bound": Fraction(2), "argument": "total geometric weight is 2"}
    if rule == "counting" or any(b == INF for _, b in f.windows) or reciprocal_start_sum_diverges(P):
        return {"finite": False, "argument": "block windows",
                "partition": P.render(), "windows": [[a, b] for a, b in f.windows]}
    # finite windows over a linear or pow2 partition: at most W points per block
    W = int(sum(b - a for a, b in f.windows))
    N = max(f.n0, len(P.prefix) + 1, 1)
    sN = P.start(N)
    head = mpmath.fsum(_ap_sum(rule, *ap) for ap in f.materialize(N).progressions(0, sN))
    if P.tail == "linear":
        tail = W * (mpmath.mpf(1) / (sN + 1) + 2)
    else:
        tail = W * mpmath.mpf(2) ** (-(N + P.c - 2))
    return {"finite": True, "bound": float(head + tail) * (1 + 1e-12), "from_block": N,
            "argument": f"at most {W} points per block; sum of 1/(s_n+1) converges"}
