from fractions import Fraction

import pytest

from derived_tame.algebra import build_algebra
from derived_tame.corpus import corpus_algebra, corpus_family
from derived_tame.deformations import (
    DeformationError, constant_or_peaks_at_zero, default_grid, dim_scan, evaluate_family,
    flat_limit, generic_dim, is_flat_on, par_scan,
)
from derived_tame.families import ideal_contained, ideal_generated, parse_ranks
from derived_tame.fields import finite_field
from derived_tame.presentation import parse_family


def relation_vector(alg, rel):
    """Coordinates in ``alg`` of a relation given as ``((path, coef), ...)``."""
    F = alg.field
    vec = F.zeros(alg.dim)
    for path, c in rel:
        for p, v in alg.gb.reduce({path: F.convert(Fraction(c))}).items():
            vec[alg.index[p]] = F.add(vec[alg.index[p]], v)
    return vec


def test_brustle_dimensions():
    fam = corpus_family("brustle")
    assert generic_dim(fam) == 15
    assert dim_scan(fam, [0, 1, 2, Fraction(-1, 3)]) == {0: 16, 1: 15, 2: 15, Fraction(-1, 3): 15}
    assert not is_flat_on(fam, [0, 1])
    assert is_flat_on(fam, [1, 2, 5])


def test_brustle_quiver_census():
    fam = corpus_family("brustle")
    assert fam.quiver.num_vertices == 6 and len(fam.quiver.arrows) == 7


def test_brustle_fibres_match_corpus():
    fam = corpus_family("brustle")
    assert evaluate_family(fam, 0).dim == corpus_algebra("brustle_A0").dim
    assert evaluate_family(fam, 1).dim == corpus_algebra("brustle_B").dim


def test_brustle_flat_limit_adds_xi1_alpha():
    fam = corpus_family("brustle")
    lim = flat_limit(fam)
    assert lim.dim == lim.generic_dim == 15
    assert build_algebra(lim.presentation).dim == 15
    A0 = corpus_algebra("brustle_A0")
    mine = ideal_generated(A0, [relation_vector(A0, r) for r in lim.extras])
    want = ideal_generated(A0, [A0.element("xi1*alpha").vec])
    assert ideal_contained(A0, mine, want) and ideal_contained(A0, want, mine)


def test_x2_family_is_flat():
    fam = corpus_family("x2")
    assert generic_dim(fam) == 2
    grid = default_grid(fam.field)
    assert len(grid) == 11
    assert set(dim_scan(fam, grid).values()) == {2}
    lim = flat_limit(fam)
    assert lim.extras == [] and lim.dim == 2


def test_x2_fibre_away_from_zero_is_semisimple():
    alg = evaluate_family(corpus_family("x2"), 3)
    assert alg.dim == 2 and alg.radical_basis.shape[0] == 0


def test_constant_family_is_flat():
    text = """name: const
field: F5
parameter: t
vertices: 1
arrows:
  x: 1 -> 1
relations:
  x*x*x
bound: 3
"""
    fam = parse_family(text)
    assert generic_dim(fam) == 3 and is_flat_on(fam, range(5))
    assert flat_limit(fam).extras == []


def test_infinite_generic_fibre_raises():
    text = """name: free
field: Q
parameter: t
vertices: 1
arrows:
  x: 1 -> 1
  y: 1 -> 1
relations:
  x*y - t*y*x
bound: 3
"""
    with pytest.raises(DeformationError):
        generic_dim(parse_family(text), max_tip_len=6)


@pytest.mark.parametrize("par,want", [
    ({0: 1, 1: 1, 2: 1}, True), ({0: 2, 1: 1, 2: 1}, True), ({0: 0, 1: 1, 2: 1}, False),
    ({0: 1, 1: 1, 2: 2}, False), ({1: 3}, True),
])
def test_constant_or_peaks(par, want):
    assert constant_or_peaks_at_zero(par) is want


@pytest.mark.parametrize("ranks", ["1;1", "1;1;1"])
def test_x2_par_scan(ranks):
    fam = corpus_family("x2")
    scan = par_scan(fam, parse_ranks(ranks), default_grid(fam.field))
    assert scan.flat and scan.semicontinuous
    assert set(scan.par.values()) == {0}


def test_brustle_scan_skips_semicontinuity():
    fam = corpus_family("brustle", finite_field(3))
    scan = par_scan(fam, parse_ranks("1,0,0,0,0,0;0,1,0,0,0,0"), [0, 1, 2])
    assert not scan.flat and scan.semicontinuous is None
