"""par along the flat family x^2 - lambda x over every point of a prime field."""

import argparse

from derived_tame.corpus import corpus_family
from derived_tame.deformations import default_grid, par_scan
from derived_tame.families import parse_ranks
from derived_tame.fields import parse_field


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--field", default="F13")
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--ranks", action="append")
    args = ap.parse_args()

    fam = corpus_family("x2", parse_field(args.field))
    grid = default_grid(fam.field, args.points)
    for r in args.ranks or ["1;1", "1;1;1", "1;2;1", "2;2"]:
        scan = par_scan(fam, parse_ranks(r), grid)
        row = " ".join(str(scan.par[v]) for v in grid)
        print(f"{r:8s} flat={scan.flat} semicontinuous={scan.semicontinuous}  par: {row}")


if __name__ == "__main__":
    main()
