"""Dimensions, flat limit and parameter numbers along the Bruestle family.

    python scripts/brustle_family.py --field F3 --ranks "1,1,0,0,0,0;0,1,1,0,0,0"
"""

import argparse
import time

from derived_tame.corpus import corpus_family
from derived_tame.deformations import dim_scan, flat_limit, generic_dim, par_scan
from derived_tame.families import parse_ranks
from derived_tame.fields import parse_field


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--field", default="F3", help="field for the par table")
    ap.add_argument("--ranks", action="append",
                    help="vector rank (repeatable); default: a few small ranks")
    ap.add_argument("--mode", default="tangent", choices=["exact", "tangent", "sample"])
    args = ap.parse_args()

    fam = corpus_family("brustle")
    print(f"generic dimension: {generic_dim(fam)}")
    for v, d in dim_scan(fam, [0, 1, 2, -1]).items():
        print(f"  dim A({v}) = {d}")
    lim = flat_limit(fam)
    print(f"flat limit at 0: dim {lim.dim}, truncation {lim.truncation}, extra relations {lim.extra_strings()}")

    F = parse_field(args.field)
    famF = corpus_family("brustle", F)
    values = list(range(min(F.characteristic, 4)))
    ranks = args.ranks or ["1,0,0,0,0,0;0,1,0,0,0,0", "1,1,0,0,0,0;0,1,1,0,0,0",
                           "0,1,0,0,0,0;0,0,1,1,0,0;0,0,0,1,1,0"]
    for r in ranks:
        t0 = time.perf_counter()
        scan = par_scan(famF, parse_ranks(r), values, mode=args.mode)
        par = ", ".join(f"{v}: {p}" for v, p in scan.par.items())
        print(f"par[{r}] over {F.name} ({args.mode}): {par}   [{time.perf_counter() - t0:.1f}s]")


if __name__ == "__main__":
    main()
