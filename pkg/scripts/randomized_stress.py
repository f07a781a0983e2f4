#!/usr/bin/env python3
"""Randomized stress runs: decompositions and canonical forms at scale.

Samples uniform random matrices over a grid of dimensions and 2-3-smooth
moduli, decomposes each (certificates verified on every call), and stresses
the canonical form with verification plus conjugation invariance.  Seeded and
reproducible.
"""

import argparse
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from nilclean.decompose import decompose, decompose_trunc_poly_matrix
from nilclean.frobenius import rcf, verify_rcf
from nilclean.matrix import RingMatrix, trunc_ring, zm_ring
from nilclean.residue import two_three_smooth_moduli


@dataclass
class StressConfig:
    seed: int = 0
    count: int = 500
    max_dim: int = 8
    moduli: list = field(default_factory=lambda: two_three_smooth_moduli(72))


def stress_decompose(config, rng):
    start = time.perf_counter()
    worst = (0, None)
    for _ in range(config.count):
        m = int(rng.choice(config.moduli))
        n = int(rng.integers(1, config.max_dim + 1))
        cert = decompose(RingMatrix.random(n, zm_ring(m), rng))
        if cert.nilpotency_exponent > worst[0]:
            worst = (cert.nilpotency_exponent, (n, m))
    print(f"  {config.count} random Z_m decompositions verified, "
          f"max W-exponent {worst[0]} at (n, m) = {worst[1]}, "
          f"{time.perf_counter() - start:.2f}s")


def stress_truncated(config, rng):
    start = time.perf_counter()
    for _ in range(config.count // 5):
        m = int(rng.choice([mm for mm in config.moduli if mm <= 12]))
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 5))
        decompose_trunc_poly_matrix(RingMatrix.random(n, trunc_ring(m, d), rng))
    print(f"  {config.count // 5} random truncated-polynomial decompositions verified, "
          f"{time.perf_counter() - start:.2f}s")


def stress_rcf(config, rng):
    start = time.perf_counter()
    bad = 0
    for _ in range(config.count):
        p = int(rng.choice([2, 3]))
        n = int(rng.integers(1, config.max_dim + 1))
        a = RingMatrix.random(n, zm_ring(p), rng)
        result = rcf(a)
        if not verify_rcf(a, result):
            bad += 1
        g = RingMatrix.random(n, zm_ring(p), rng)
        if g.is_invertible():
            conj = g @ a @ g.inverse()
            if [b.poly for b in rcf(conj).blocks] != [b.poly for b in result.blocks]:
                bad += 1
    print(f"  {config.count} canonical forms, {bad} failures, "
          f"{time.perf_counter() - start:.2f}s")
    return bad


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--count", type=int, default=500)
    parser.add_argument("--max-dim", type=int, default=8)
    args = parser.parse_args(argv)
    config = StressConfig(seed=args.seed, count=args.count, max_dim=args.max_dim)
    rng = np.random.default_rng(config.seed)

    print(f"randomized stress (seed {config.seed}):")
    stress_decompose(config, rng)
    stress_truncated(config, rng)
    bad = stress_rcf(config, rng)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
