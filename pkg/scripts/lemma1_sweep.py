"""Random periodic bounded-block instances solved by the recursion and
cross-checked against the brute-force oracle; prints a depth histogram."""
import argparse
import random
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from filterlab.pseudo import InvalidInstance, lemma1_pseudointersection  # noqa: E402
from tests.instances import eventual_pattern, oracle_for, random_case  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    rng = random.Random(a.seed)
    depth, disagreements, invalid = Counter(), 0, 0
    for _ in range(a.instances):
        case = random_case(rng)
        oracle = oracle_for(case)
        try:
            cert = lemma1_pseudointersection(case.instance)
        except InvalidInstance:
            invalid += 1
            disagreements += oracle.hypotheses_hold
            continue
        ok = oracle.hypotheses_hold and oracle.is_valid(eventual_pattern(cert.A, case.N))
        disagreements += not ok
        depth[(case.instance.bound, cert.extra["depth"])] += 1
    print(f"instances {a.instances}, invalid {invalid}, disagreements with oracle {disagreements}")
    for (bound, d), n in sorted(depth.items()):
        print(f"  block bound {bound}  depth {d}: {n}")


if __name__ == "__main__":
    main()
