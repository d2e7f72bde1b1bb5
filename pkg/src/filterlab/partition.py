"""Finite-to-one surjections of ω presented as consecutive blocks."""
from __future__ import annotations

import math
from dataclasses import dataclass

TAIL_RULES = ("const", "linear", "log2", "pow2")


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length()


def _ceil_log2_sum(upto: int) -> int:
    """Sum of ceil(log2(j)) for j = 1..upto (0 when upto < 1)."""
    total = 0
    t = 1
    while (1 << (t - 1)) < upto:
        lo = (1 << (t - 1)) + 1
        hi = min(1 << t, upto)
        total += t * (hi - lo + 1)
        t += 1
    return total


@dataclass(frozen=True)
class BlockPartition:
    """The map xi whose fibres are the consecutive intervals [s_n, s_{n+1}).

    Block sizes come from an explicit prefix table followed by a tail rule:
    ``const`` (c), ``linear`` (n + c), ``log2`` (ceil(log2(n + c))) or
    ``pow2`` (2**(n + c)).  The index n in the tail rules is the absolute
    block index, not the offset past the prefix.
    """

    prefix: tuple[int, ...] = ()
    tail: str = "const"
    c: int = 1

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(s) for s in self.prefix))
        if self.tail not in TAIL_RULES:
            raise ValueError(f"unknown tail rule {self.tail!r}")
        if any(s < 1 for s in self.prefix):
            raise ValueError("block sizes must be >= 1")
        L = len(self.prefix)
        ok = {
            "const": self.c >= 1,
            "linear": L + self.c >= 1,
            "log2": L + self.c >= 2,
            "pow2": L + self.c >= 0,
        }[self.tail]
        if not ok:
            raise ValueError(f"tail rule {self.tail}:{self.c} yields an empty block")

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c: int) -> "BlockPartition":
        return cls((), "const", c)

    @classmethod
    def linear(cls, c: int = 1) -> "BlockPartition":
        return cls((), "linear", c)

    @classmethod
    def log2(cls, c: int = 2) -> "BlockPartition":
        return cls((), "log2", c)

    @classmethod
    def dyadic(cls) -> "BlockPartition":
        # [0,2), [2,4), [4,8), ...: block n >= 1 is [2^n, 2^{n+1})
        return cls((2,), "pow2", 0)

    # -- sizes --------------------------------------------------------------
    def size(self, n: int) -> int:
        if n < 0:
            raise IndexError(n)
        if n < len(self.prefix):
            return self.prefix[n]
        if self.tail == "const":
            return self.c
        if self.tail == "linear":
            return n + self.c
        if self.tail == "log2":
            return _ceil_log2(n + self.c)
        return 1 << (n + self.c)

    @property
    def bounded(self) -> bool:
        """True when sup of the sizes is finite (constant tail)."""
        return self.tail == "const"

    @property
    def unbounded(self) -> bool:
        return not self.bounded

    def sizes(self, count: int) -> list[int]:
        return [self.size(n) for n in range(count)]

    # -- layout -------------------------------------------------------------
    def start(self, n: int) -> int:
        """s_n, the first point of block n."""
        L = len(self.prefix)
        if n <= L:
            return sum(self.prefix[:n])
        base = sum(self.prefix)
        m = n - L
        c = self.c
        if self.tail == "const":
            return base + c * m
        if self.tail == "linear":
            return base + (n * (n - 1) - L * (L - 1)) // 2 + c * m
        if self.tail == "log2":
            return base + _ceil_log2_sum(n - 1 + c) - _ceil_log2_sum(L - 1 + c)
        return base + (1 << (n + c)) - (1 << (L + c))

    def block(self, n: int) -> range:
        return range(self.start(n), self.start(n + 1))

    def block_of(self, k: int) -> int:
        """xi(k): the index of the block containing k."""
        if k < 0:
            raise ValueError("points are naturals")
        if self.tail == "const" and k >= sum(self.prefix):
            return len(self.prefix) + (k - sum(self.prefix)) // self.c
        hi = 1
        while self.start(hi) <= k:
            hi *= 2
        lo = 0
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.start(mid) <= k:
                lo = mid
            else:
                hi = mid
        return lo

    def first_block_with_size_above(self, p: int, from_block: int = 0) -> int:
        """Least n >= from_block with size(n) > p.  Sizes are nondecreasing
        past the prefix, so the answer is found by a bounded scan."""
        n = from_block
        L = len(self.prefix)
        while n < L:
            if self.prefix[n] > p:
                return n
            n += 1
        if self.tail == "const":
            if self.c > p:
                return n
            raise ValueError(f"all tail blocks have size {self.c} <= {p}")
        lo, hi = n, max(n, 1)
        while self.size(hi) <= p:
            hi *= 2
        if self.size(lo) > p:
            return lo
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.size(mid) > p:
                hi = mid
            else:
                lo = mid
        return hi

    # -- text form ----------------------------------------------------------
    def render(self) -> str:
        tail = {
            "const": f"const:{self.c}",
            "linear": f"n{self.c:+d}",
            "log2": f"log2{self.c:+d}",
            "pow2": f"pow2{self.c:+d}",
        }[self.tail]
        if self.prefix:
            return "/".join(map(str, self.prefix)) + ";" + tail
        return tail

    @classmethod
    def parse(cls, text: str) -> "BlockPartition":
        """Parse ``const:3``, ``n+1``, ``log2+2``, ``pow2+0``, ``dyadic`` or
        ``1/2/2;const:3`` (explicit prefix, then tail; commas also accepted)."""
        text = text.strip().replace(" ", "")
        if text == "dyadic":
            return cls.dyadic()
        prefix: tuple[int, ...] = ()
        if ";" in text:
            head, text = text.split(";", 1)
            prefix = tuple(int(x) for x in head.replace("/", ",").split(",") if x)
        for name, rule in (("const:", "const"), ("log2", "log2"), ("pow2", "pow2"),
                           ("linear", "linear"), ("n", "linear")):
            if text.startswith(name):
                rest = text[len(name):]
                try:
                    c = int(rest) if rest else (2 if rule == "log2" else 0)
                except ValueError:
                    break
                return cls(prefix, rule, c)
        raise ValueError(f"cannot parse block sizes {text!r}")

    def __str__(self) -> str:
        return self.render()


def reciprocal_start_sum_diverges(P: BlockPartition) -> bool:
    """Whether sum_n 1/(s_n + 1) diverges: true for const and log2 tails
    (s_n grows like n and n log n), false for linear and pow2 tails."""
    return P.tail in ("const", "log2")
