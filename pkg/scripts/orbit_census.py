"""Exhaustive orbit census of D(R, I) over a small finite field.

Prints every orbit with its size and dimension, the stratum estimates and
cross-checks each orbit against iso_test.

    python scripts/orbit_census.py dual "1;2;1" --field F2
"""

import argparse

from derived_tame.complexes import iso_test
from derived_tame.corpus import ALGEBRAS, corpus_algebra
from derived_tame.families import (
    HomSpace, enumerate_D, orbit_info, orbits, par_exact, parse_ranks, radical_power_ideal,
)
from derived_tame.fields import parse_field


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("algebra", choices=sorted(ALGEBRAS))
    ap.add_argument("ranks")
    ap.add_argument("--field", default="F3")
    ap.add_argument("--ideal-power", type=int, default=1)
    args = ap.parse_args()

    alg = corpus_algebra(args.algebra, parse_field(args.field))
    vrank = parse_ranks(args.ranks)
    ideal_fn = lambda a: radical_power_ideal(a, args.ideal_power)  # noqa: E731
    H = HomSpace(alg, vrank, ideal_fn(alg))
    pts = enumerate_D(H)
    print(f"{args.algebra} over {alg.field.name}, ranks {args.ranks}: dim H = {H.dim}, |D(F_q)| = {len(pts)}")
    if len(pts) == 0:
        print("D is empty")
        return
    labels = orbits(H, pts)
    reps = {}
    for k, lab in enumerate(labels):
        reps.setdefault(int(lab), k)
    for lab, k in sorted(reps.items()):
        info = orbit_info(H, pts[k])
        size = int((labels == lab).sum())
        print(f"  orbit {lab:3d}: size {size:4d}  dim {info.orbit_dim}  rep {pts[k].tolist()}")
    bad = 0
    cx = {k: H.complex_of(pts[k]) for k in reps.values()}
    for k, lab in enumerate(labels):
        if k != reps[int(lab)] and not iso_test(H.complex_of(pts[k]), cx[reps[int(lab)]]).isomorphic:
            bad += 1
    keys = sorted(cx)
    for a in range(len(keys)):
        for b in range(a + 1, len(keys)):
            bad += iso_test(cx[keys[a]], cx[keys[b]]).isomorphic
    print(f"orbit/iso discrepancies: {bad}")
    est = par_exact(alg, vrank, ideal_fn)
    print(f"strata {est.strata}  par = {est.lo}")
    for note in est.notes:
        print(f"  note: {note}")


if __name__ == "__main__":
    main()
