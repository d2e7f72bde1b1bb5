"""Segment ends of the submeasure construction for a few decreasing chains
under harmonic and counting weights."""
import argparse

from filterlab.expr import parse_set
from filterlab.pseudo import laf_pseudointersection
from filterlab.sets import And, Interval, evens

CHAINS = {
    "tails/counting": ("counting", [Interval(k, None) for k in range(6)], "filter"),
    "tails/harmonic": ("harmonic", [Interval(k, None) for k in range(5)], "filter"),
    "evens/harmonic": ("harmonic", [And((evens(), Interval(k, None))) for k in range(4)], "coideal"),
    "sparse/harmonic": ("harmonic", [parse_set("not(blocks(sizes=n+1,rule=first(1)))"),
                                     parse_set("not(blocks(sizes=n+1,rule=first(2)))"),
                                     parse_set("not(blocks(sizes=n+1,rule=first(3)))")], "filter"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(CHAINS))
    a = ap.parse_args()
    for name in a.names:
        rule, chain, require = CHAINS[name]
        cert = laf_pseudointersection(rule, chain, require=require)
        lows = ", ".join(t["phi_lower"][:8] for t in cert.trace)
        print(f"{name:<16} n = {cert.extra['n']}  segment weights > [{lows}]")


if __name__ == "__main__":
    main()
