"""Text grammar for set, partition and filter expressions.

Sets::

    finite([0,1,2])   cofinite(drop=[3])   interval(3,inf)   first(4)
    trunc(bits=0110,tail=full)   periodic(head=01,cycle=100)   evens   odds   omega   empty
    blocks(sizes=log2+2,rule=first(1))      rules: all none first(t)
                                             allbutfirst(t) removed([..])
    and(A,B,...)  or(A,B,...)  not(A)  pre(A,sizes=const:2)  shift(A,k)
    rows(A,shift=1,from=0,over=[at(3,A)])  rows:first(1)   (subsets of ω×ω)

Filters::

    frechet  gen(A,...)  density(blocks=dyadic)  summable(w=harmonic)
    fubini   push(F,sizes=n+1)  restrict(F,A)

``render()`` on any parsed object gives the canonical text, and parsing the
canonical text gives back an equal object.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import filters as fl
from . import sets as st
from .partition import BlockPartition


class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<<HERE>>{text[pos:]}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:([()\[\],=])|([^\s()\[\],=]+))")


@dataclass
class Node:
    name: str
    args: list  # (key or None, value) pairs
    pos: int
    called: bool = False


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError("unexpected character", text, pos)
        tok = m.group(1) or m.group(2)
        out.append((tok, m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def take(self, expect=None):
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input", self.text, len(self.text))
        tok, p = self.toks[self.i]
        if expect is not None and tok != expect:
            raise ParseError(f"expected {expect!r}, found {tok!r}", self.text, p)
        self.i += 1
        return tok

    def value(self):
        if self.peek() == "[":
            self.take("[")
            items = []
            while self.peek() != "]":
                items.append(self.value())
                if self.peek() == ",":
                    self.take(",")
            self.take("]")
            return items
        p = self.pos()
        name = self.take()
        if name in "()[],=":
            raise ParseError(f"unexpected {name!r}", self.text, p)
        node = Node(name, [], p)
        if self.peek() == "(":
            node.called = True
            self.take("(")
            while self.peek() != ")":
                key = None
                if self.i + 1 < len(self.toks) and self.toks[self.i + 1][0] == "=":
                    key = self.take()
                    self.take("=")
                node.args.append((key, self.value()))
                if self.peek() == ",":
                    self.take(",")
                elif self.peek() != ")":
                    raise ParseError("expected ',' or ')'", self.text, self.pos())
            self.take(")")
        return node

    def parse(self):
        v = self.value()
        if self.i != len(self.toks):
            raise ParseError("trailing input", self.text, self.pos())
        return v


def _int(v, text) -> int:
    if isinstance(v, Node) and not v.called:
        try:
            return int(v.name)
        except ValueError:
            pass
    raise ParseError("expected an integer", text, v.pos if isinstance(v, Node) else 0)


def _ints(v, text) -> list[int]:
    if isinstance(v, list):
        return [_int(x, text) for x in v]
    return [_int(v, text)]


def _word(v) -> str:
    return v.name if isinstance(v, Node) else str(v)


def _split(node: Node):
    pos = [v for k, v in node.args if k is None]
    kw = {k: v for k, v in node.args if k is not None}
    return pos, kw


def _selector(v, text) -> st.Selector:
    name = v.name
    pos, _ = _split(v)
    if name in ("all", "none"):
        return st.Selector(name)
    if name in ("first", "allbutfirst"):
        return st.Selector(name, _int(pos[0], text))
    if name == "removed":
        return st.Selector("removed", removed=tuple(_ints(pos[0], text)) if pos else ())
    raise ParseError(f"unknown block rule {name!r}", text, v.pos)


def _partition(v, text) -> BlockPartition:
    try:
        return BlockPartition.parse(_word(v))
    except ValueError as e:
        raise ParseError(str(e), text, v.pos if isinstance(v, Node) else 0)


def _set(node, text) -> st.SetDescription:
    if isinstance(node, list):
        raise ParseError("expected a set expression", text, 0)
    name = node.name
    pos, kw = _split(node)
    if name.startswith("rows:"):
        inner = Node(name[5:], node.args, node.pos, node.called)
        return st.PairedRowRule(_set(inner, text))
    simple = {"evens": st.evens, "odds": st.odds, "omega": st.omega, "all": st.omega,
              "empty": st.empty}
    if name in simple and not node.called:
        return simple[name]()
    if name == "finite":
        return st.Finite(tuple(x for p in pos for x in _ints(p, text)))
    if name == "cofinite":
        vals = kw.get("drop", pos[0] if pos else [])
        return st.Cofinite(tuple(_ints(vals, text)) if vals != [] else ())
    if name == "trunc":
        bits = _word(kw["bits"]) if "bits" in kw else _word(pos[0])
        tail = _word(kw.get("tail", Node("empty", [], 0)))
        if tail not in ("full", "empty"):
            raise ParseError("tail must be full or empty", text, node.pos)
        return st.Truncated("" if bits == "e" else bits, tail == "full")
    if name == "periodic":
        head = _word(kw["head"]) if "head" in kw else (_word(pos[0]) if pos else "e")
        cycle = _word(kw["cycle"]) if "cycle" in kw else _word(pos[1])
        try:
            return st.Periodic("" if head == "e" else head, cycle)
        except ValueError as e:
            raise ParseError(str(e), text, node.pos)
    if name == "interval":
        lo = _int(pos[0], text)
        hi = None if len(pos) < 2 or _word(pos[1]) == "inf" else _int(pos[1], text)
        return st.Interval(lo, hi)
    if name == "first":
        return st.Interval(0, _int(pos[0], text))
    if name == "blocks":
        P = _partition(kw.get("sizes", pos[0] if pos else None), text)
        rule = kw.get("rule", pos[1] if len(pos) > 1 else Node("all", [], node.pos))
        return st.BlockRule(P, _selector(rule, text))
    if name in ("and", "or"):
        parts = tuple(_set(p, text) for p in pos)
        return st.And(parts) if name == "and" else st.Or(parts)
    if name == "not":
        return st.Not(_set(pos[0], text))
    if name == "pre":
        return st.Preimage(_set(pos[0], text), _partition(kw.get("sizes", pos[1] if len(pos) > 1 else None), text))
    if name == "shift":
        return st.Shifted(_set(pos[0], text), _int(pos[1], text))
    if name == "rows":
        row = _set(pos[0], text)
        over = []
        for item in kw.get("over", []):
            ipos, _ = _split(item)
            over.append((_int(ipos[0], text), _set(ipos[1], text)))
        return st.PairedRowRule(row, bool(_int(kw.get("shift", Node("0", [], 0)), text)),
                                _int(kw.get("from", Node("0", [], 0)), text), tuple(over))
    raise ParseError(f"unknown set expression {name!r}", text, node.pos)


def _filter(node, text) -> fl.FilterPresentation:
    name = node.name
    pos, kw = _split(node)
    if name == "frechet":
        return fl.Frechet()
    if name == "fubini":
        return fl.FubiniFrFr()
    if name == "gen":
        return fl.Generated(tuple(_set(p, text) for p in pos))
    if name == "density":
        b = kw.get("blocks", pos[0] if pos else Node("dyadic", [], node.pos))
        return fl.BlockDensity(_partition(b, text))
    if name == "summable":
        w = _word(kw.get("w", pos[0] if pos else Node("harmonic", [], 0)))
        return fl.Summable(w)
    if name == "push":
        return fl.pushforward(_filter(pos[0], text), _partition(kw.get("sizes", pos[1] if len(pos) > 1 else None), text))
    if name == "restrict":
        return fl.restrict(_filter(pos[0], text), _set(pos[1], text))
    raise ParseError(f"unknown filter expression {name!r}", text, node.pos)


def parse_set(text: str) -> st.SetDescription:
    return _set(_Parser(text).parse(), text)


def parse_filter(text: str) -> fl.FilterPresentation:
    return _filter(_Parser(text).parse(), text)


def parse_partition(text: str) -> BlockPartition:
    return BlockPartition.parse(text)
