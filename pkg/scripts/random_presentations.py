"""Invariants and coassociativity on seeded random admissible presentations."""

import argparse
import time

import numpy as np

from derived_tame.algebra import build_algebra, check_coassociativity
from derived_tame.corpus import random_presentation
from derived_tame.fields import parse_field


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--field", default="Q")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    F = parse_field(args.field)
    dims, failures = [], 0
    t0 = time.perf_counter()
    for k in range(args.count):
        pres = random_presentation(rng, F)
        alg = build_algebra(pres)
        fails = alg.check_invariants() + check_coassociativity(alg)
        dims.append(alg.dim)
        if fails:
            failures += 1
            print(f"#{k}: {pres.relation_strings()} -> {fails}")
    print(f"{args.count} presentations over {F.name}: dims {min(dims)}..{max(dims)} "
          f"(median {int(np.median(dims))}), {failures} failures, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
