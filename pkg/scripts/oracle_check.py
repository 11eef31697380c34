"""Compare homology, chain-map and homotopy dimensions with the dense oracle in tests/."""

import argparse
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))
import oracles  # noqa: E402

from derived_tame.complexes import chain_maps, homology, homotopies, random_minimal_complex, random_ranks  # noqa: E402
from derived_tame.corpus import ALGEBRAS, corpus_algebra  # noqa: E402
from derived_tame.fields import parse_field  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--field", default="F3")
    ap.add_argument("--per-algebra", type=int, default=4)
    ap.add_argument("--max-rank", type=int, default=2)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    F = parse_field(args.field)
    rng = np.random.default_rng(args.seed)
    total = mismatches = 0
    for name in sorted(ALGEBRAS):
        alg = corpus_algebra(name, F)
        t0 = time.perf_counter()
        for _ in range(args.per_algebra):
            c = random_minimal_complex(alg, random_ranks(alg, 3, args.max_rank, rng), rng)
            c2 = random_minimal_complex(alg, random_ranks(alg, 3, args.max_rank, rng), rng)
            ok = homology(c).dims == {n: tuple(v) for n, v in oracles.homology_dims(c).items()}
            ok &= chain_maps(c, c2)[1].shape[0] == oracles.chain_map_dim(c, c2)
            ok &= homotopies(c, c2)[1].shape[0] == oracles.homotopy_dim(c, c2)
            total += 1
            mismatches += not ok
        print(f"{name:12s} {args.per_algebra} pairs  {time.perf_counter() - t0:.1f}s")
    print(f"{total} instances over {F.name}, {mismatches} mismatches")


if __name__ == "__main__":
    main()
