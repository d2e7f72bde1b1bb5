"""Exact enclosures, null certificates and Monte-Carlo estimates for the
measure of block-hitting families, one row per partition."""
import argparse
from fractions import Fraction

from filterlab.measure import (
    block_family_measure, is_null_certificate, monte_carlo_measure, partial_product,
)
from filterlab.partition import BlockPartition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="+", default=["const:1", "const:2", "n+1", "log2+2", "2;pow2+0"])
    ap.add_argument("--factors", type=int, default=12)
    ap.add_argument("--samples", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    print(f"{'sizes':<10} {'null':<8} {'lower':>12} {'upper':>12} {'mc':>10} {'z':>6}")
    for text in a.sizes:
        P = BlockPartition.parse(text)
        I = block_family_measure(P, 0, a.factors)
        null = is_null_certificate(P, Fraction(1, 100)).status.value
        est = monte_carlo_measure(P, 0, min(a.factors, 8), a.samples, a.seed)
        exact = float(partial_product(P, 0, min(a.factors, 8)))
        z = abs(est.estimate - exact) / est.stderr if est.stderr else 0.0
        print(f"{text:<10} {null:<8} {float(I.lower):>12.8f} {float(I.upper):>12.8f} "
              f"{est.estimate:>10.5f} {z:>6.2f}")


if __name__ == "__main__":
    main()
