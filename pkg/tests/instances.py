"""Random periodic bounded-block instances, shared by the property tests and
the acceptance suite.

One period has N = c * b points (c points per block, b blocks).  The carrier
and the generators repeat with period N, so the brute-force oracle sees the
same instance through one period.  Generators get a few finite changes on
the library side only, which must not matter modulo finite sets."""
from __future__ import annotations

import random
from dataclasses import dataclass

from filterlab.oracle import TruncSet, oracle_pseudointersection
from filterlab.partition import BlockPartition
from filterlab.sets import And, Cofinite, Or, Finite, Periodic, omega
from filterlab.pseudo import BoundedBlockInstance


@dataclass
class OracleCase:
    instance: BoundedBlockInstance
    N: int
    oracle_blocks: list
    oracle_generators: list


def _bits(rng: random.Random, n: int, p: float) -> str:
    return "".join("1" if rng.random() < p else "0" for _ in range(n))


def random_case(rng: random.Random, max_points: int = 16) -> OracleCase:
    c = rng.randint(1, 3)
    b = rng.randint(1, min(12, max_points // c))
    N = c * b
    carrier = _bits(rng, N, 0.8)
    gens_bits = [_bits(rng, N, rng.choice([0.6, 0.8, 0.95])) for _ in range(rng.randint(0, 3))]
    gens = []
    for g in gens_bits:
        G = Periodic("", g) if "1" in g else Finite(())
        noise = tuple(sorted(rng.sample(range(3 * N), rng.randint(0, 2))))
        if noise and rng.random() < 0.5:
            G = And((G, Cofinite(noise)))
        elif noise:
            G = Or((G, Finite(noise)))
        gens.append(G)
    C = Periodic("", carrier) if "1" in carrier else Finite(())
    inst = BoundedBlockInstance(omega(), BlockPartition.constant(c), c, tuple(gens), C)
    blocks = [[i * c + j for j in range(c) if carrier[i * c + j] == "1"] for i in range(b)]
    ogens = [TruncSet(tuple(x == "1" for x in g), "periodic") for g in gens_bits]
    return OracleCase(inst, N, blocks, ogens)


def eventual_pattern(A, N: int, periods: int = 40) -> list[bool]:
    base = N * periods
    return [A.member(base + j) for j in range(N)]


def oracle_for(case: OracleCase):
    return oracle_pseudointersection(case.oracle_generators, case.oracle_blocks, case.N)
