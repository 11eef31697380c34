"""Bundled example algebras and families."""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

import numpy as np

from .algebra import AlgebraData, build_algebra
from .fields import QQ, Field
from .presentation import (AlgebraPresentation, FamilyPresentation, Quiver, parse_family,
                           parse_presentation)

ALGEBRAS = {
    "dual": "dual.alg",
    "cubic": "cubic.alg",
    "a2": "a2.alg",
    "kxk": "kxk.alg",
    "brustle_A0": "brustle_A0.alg",
    "brustle_B": "brustle_B.alg",
}

FAMILIES = {
    "brustle": "brustle.fam",
    "x2": "x2_family.fam",
}


def data_path(filename: str):
    return resources.files("derived_tame") / "data" / filename


def corpus_presentation(name: str, field: Field | None = None) -> AlgebraPresentation:
    pres = parse_presentation(data_path(ALGEBRAS[name]).read_text(encoding="utf-8"))
    return pres if field is None else pres.with_field(field)


def corpus_algebra(name: str, field: Field | None = None) -> AlgebraData:
    return build_algebra(corpus_presentation(name, field))


def corpus_family(name: str, field: Field | None = None) -> FamilyPresentation:
    fam = parse_family(data_path(FAMILIES[name]).read_text(encoding="utf-8"))
    return fam if field is None else fam.with_field(field)


def random_presentation(rng: np.random.Generator, field: Field = QQ, max_vertices: int = 3,
                        max_arrows: int = 4, bound: int = 3, extra: int = 3) -> AlgebraPresentation:
    """A random admissible presentation.

    All paths of length ``bound + 1`` are relations, so the quotient is
    finite-dimensional; ``extra`` further relations are random combinations
    (small integer coefficients) of at most three paths of lengths
    ``2..bound`` sharing their endpoints.  ``bound`` is lowered (not below 2)
    while there would be more than 64 monomial relations.
    """
    s = int(rng.integers(1, max_vertices + 1))
    m = int(rng.integers(1, max_arrows + 1))
    arrows = tuple((f"a{t + 1}", int(rng.integers(s)), int(rng.integers(s))) for t in range(m))
    quiver = Quiver(s, arrows)
    # keep the number of monomial relations moderate on loop-heavy quivers
    while bound > 2 and len(quiver.paths_of_length(bound + 1)) > 64:
        bound -= 1
    rels = [((p, Fraction(1)),) for p in quiver.paths_of_length(bound + 1)]
    groups: dict = {}
    for n in range(2, bound + 1):
        for p in quiver.paths_of_length(n):
            groups.setdefault((quiver.source(p), quiver.target(p)), []).append(p)
    keys = sorted(groups)
    for _ in range(extra if keys else 0):
        group = groups[keys[int(rng.integers(len(keys)))]]
        size = int(rng.integers(1, min(3, len(group)) + 1))
        paths = [group[t] for t in sorted(rng.choice(len(group), size=size, replace=False))]
        coeffs = rng.integers(-2, 3, size=len(paths))
        terms = tuple((p, Fraction(int(c))) for p, c in zip(paths, coeffs) if c)
        if terms:
            rels.append(terms)
    return AlgebraPresentation(quiver, tuple(rels), field, bound, "random")
