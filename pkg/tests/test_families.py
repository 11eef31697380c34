import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F2, F3
from derived_tame.complexes import check_dsquared, iso_test
from derived_tame.corpus import corpus_algebra
from derived_tame.families import (
    FamilyError, HomSpace, _normalize, generator_matrices, InfeasibleError, count_projective, enumerate_D, free_vrank,
    ideal_contained, ideal_dim, ideal_generated, orbit_info, orbits, par_exact, par_tangent,
    parse_ranks, radical_ideal, radical_power_ideal, rank_brackets, sample_D, sandwich,
    tame_heuristic, zero_ideal,
)


def test_parse_ranks():
    v = parse_ranks("1,0;2,1", low=-1)
    assert v.ranks == ((1, 0), (2, 1)) and v.top == 0 and v.total == 4
    assert v.rank(5) == (0, 0)
    with pytest.raises(FamilyError):
        parse_ranks("1,a")


def test_ideals_are_nested(corpus_f3):
    for alg in corpus_f3.values():
        J, J2, Z = radical_ideal(alg), radical_power_ideal(alg, 2), zero_ideal(alg)
        assert ideal_contained(alg, Z, J2) and ideal_contained(alg, J2, J)
        assert ideal_dim(J) == alg.dim - alg.num_vertices
        assert ideal_dim(Z) == 0


def test_generated_ideal_brustle(corpus_q):
    alg = corpus_q["brustle_A0"]
    I = ideal_generated(alg, [alg.element("xi1*alpha").vec])
    assert ideal_dim(I) == 1


def test_dual_11_single_point():
    alg = corpus_algebra("dual", F3)
    H = HomSpace(alg, parse_ranks("1;1"))
    pts = enumerate_D(H)
    assert H.dim == 1 and pts.shape[0] == 1
    assert orbit_info(H, pts[0]).orbit_dim == 0
    assert check_dsquared(H.complex_of(pts[0])).ok


def test_dual_111_orbits():
    alg = corpus_algebra("dual", F3)
    H = HomSpace(alg, parse_ranks("1;1;1"))
    pts = enumerate_D(H)
    assert pts.shape[0] == count_projective(3, 2) == 4
    labels = orbits(H, pts)
    sizes = sorted(int((labels == lab).sum()) for lab in set(labels.tolist()))
    assert sizes == [1, 1, 2]


def test_semisimple_is_empty():
    alg = corpus_algebra("kxk", F2)
    H = HomSpace(alg, parse_ranks("1,1;1,1"))
    assert H.dim == 0 and enumerate_D(H).shape[0] == 0
    est = par_exact(alg, parse_ranks("1,1;1,1"))
    assert est.value == 0


def test_ideal_outside_radical_rejected():
    alg = corpus_algebra("dual", F3)
    full = {key: np.eye(len(idx), dtype=alg.field.dtype) for key, idx in alg.peirce.items()}
    with pytest.raises(FamilyError):
        HomSpace(alg, parse_ranks("1;1"), full)


def test_enumeration_cap():
    alg = corpus_algebra("brustle_A0", F3)
    with pytest.raises(InfeasibleError):
        enumerate_D(HomSpace(alg, parse_ranks("1,1,1,1,1,1;1,1,1,1,1,1")), cap=1000)


def test_exact_mode_needs_finite_field(corpus_q):
    with pytest.raises(FamilyError):
        par_exact(corpus_q["dual"], parse_ranks("1;1"))


@pytest.mark.parametrize("name,ranks,F", [
    ("dual", "2;2", F2), ("dual", "1;1;1", F3), ("cubic", "1;1;1", F3), ("cubic", "1;1", F2),
    ("a2", "1,1;1,1", F2), ("dual", "1;2;1", F2),
])
def test_orbit_sizes_partition_points(name, ranks, F):
    alg = corpus_algebra(name, F)
    H = HomSpace(alg, parse_ranks(ranks))
    pts = enumerate_D(H)
    labels = orbits(H, pts)
    assert len(labels) == pts.shape[0]
    for x in pts:
        assert H.is_point(x)
    # the group permutes D and the labels are constant along each generator
    where = {tuple(int(v) for v in x): k for k, x in enumerate(pts)}
    for T in generator_matrices(H):
        moved = _normalize(F, F.matmul(pts, T))
        for k, y in enumerate(moved):
            assert labels[where[tuple(int(v) for v in y)]] == labels[k]


def test_orbits_agree_with_iso_on_dual_22():
    alg = corpus_algebra("dual", F2)
    H = HomSpace(alg, parse_ranks("2;2"))
    pts = enumerate_D(H)
    labels = orbits(H, pts)
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            same = labels[a] == labels[b]
            assert same == iso_test(H.complex_of(pts[a]), H.complex_of(pts[b])).isomorphic


def test_tangent_bounds_bracket_exact():
    for name, ranks, F in [("dual", "1;1", F3), ("dual", "1;1;1", F3), ("cubic", "1;1;1", F3),
                           ("dual", "2;2", F2)]:
        alg = corpus_algebra(name, F)
        v = parse_ranks(ranks)
        exact = par_exact(alg, v).value
        t = par_tangent(alg, v)
        assert t.lo <= exact <= t.hi, (name, ranks)


def test_sample_points_satisfy_equations():
    alg = corpus_algebra("brustle_A0", F3)
    H = HomSpace(alg, parse_ranks("1,1,1,1,1,1;1,1,1,1,1,1;0,1,0,1,0,0"))
    pts = sample_D(H, np.random.default_rng(3), count=5)
    assert pts.shape[0] > 0
    for x in pts:
        assert check_dsquared(H.complex_of(x)).ok


def test_tame_heuristic_verdicts():
    alg = corpus_algebra("dual", F3)
    v = parse_ranks("1;1;1")
    assert tame_heuristic(v, par_exact(alg, v))["verdict"] == "consistent-with-tame"
    from derived_tame.families import ParEstimate
    assert tame_heuristic(v, ParEstimate("tangent", 4, 5))["verdict"] == "wild-evidence"
    assert tame_heuristic(v, ParEstimate("tangent", 1, 5))["verdict"] == "inconclusive"


@settings(max_examples=50)
@given(st.lists(st.lists(st.integers(0, 9), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(1, 3), min_size=3, max_size=3))
def test_rank_brackets_sandwich_ranks(ranks, a):
    floors, ceils = rank_brackets(ranks, a)
    for r, f, c in zip(ranks, floors, ceils):
        assert all(f * ai <= ri <= c * ai for ri, ai in zip(r, a))
        assert any((f + 1) * ai > ri for ri, ai in zip(r, a))
        assert c == 0 or any((c - 1) * ai < ri for ri, ai in zip(r, a))


def test_free_vrank_scales():
    assert free_vrank([1, 2], (1, 2)).ranks == ((1, 2), (2, 4))


@pytest.mark.parametrize("ranks", ["1;1", "1;2;1", "2;1", "2;2", "1;1;1"])
def test_dual_sandwich(ranks):
    alg = corpus_algebra("dual", F2)
    assert sandwich(alg, parse_ranks(ranks))["holds"]


@pytest.mark.parametrize("ranks", ["1;1;1", "2;2", "1;2;1"])
def test_ideal_monotonicity_dual(ranks):
    alg = corpus_algebra("dual", F2)
    v = parse_ranks(ranks)
    small = par_exact(alg, v, zero_ideal).value
    big = par_exact(alg, v, radical_ideal).value
    assert small <= big


def test_rank_bracket_examples():
    assert rank_brackets([(2, 1)], (2, 1)) == ([1], [1])
    assert rank_brackets([(3, 2)], (2, 1)) == ([1], [2])


def test_dual_111_tangent_dims():
    # J^2 = 0, so the equations are vacuous and D is all of P^1
    from derived_tame.families import tangent_dim_D
    alg = corpus_algebra("dual", F3)
    H = HomSpace(alg, parse_ranks("1;1;1"))
    assert [tangent_dim_D(H, x) for x in enumerate_D(H)] == [1, 1, 1, 1]
