import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import F3
from derived_tame.boxes import (
    BoxError, BoxPresentation, box_hom_space, box_isomorphic_exhaustive, box_presentation,
    build_sliced_box, check_box_relations, complex_from_rep, compose_box_morphisms, identity_box_morphism,
    is_box_morphism, morphism_from_box, morphism_transfer, rep_from_complex, wild_pattern_detect,
)
from derived_tame.complexes import (
    check_dsquared, chain_maps, compose_maps, identity_map, iso_test, random_minimal_complex,
    random_ranks,
)
from derived_tame.corpus import ALGEBRAS, corpus_algebra

# counted by hand from the quivers: objects s(len+1), one arrow per degree and
# radical basis element, one relation per degree >= low+2 and element of J^2
CENSUS = [
    ("dual", 0, 2, (3, 2, 0)),
    ("dual", 0, 1, (2, 1, 0)),
    ("a2", 0, 2, (6, 2, 0)),
    ("cubic", 0, 2, (3, 4, 1)),
    ("brustle_A0", 0, 3, (24, 30, 6)),
]


@pytest.mark.parametrize("name,low,top,want", CENSUS)
def test_box_census(name, low, top, want, corpus_q):
    box = build_sliced_box(corpus_q[name], low, top)
    census = box.census()
    assert (census["objects"], census["arrows"], census["relations"]) == want
    assert census == oracles.box_census(corpus_q[name], low, top)


def test_empty_window_rejected(corpus_q):
    with pytest.raises(BoxError):
        build_sliced_box(corpus_q["dual"], 2, 1)


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_round_trip_and_box_relations(name, rng):
    alg = corpus_algebra(name, F3)
    for _ in range(4):
        c = random_minimal_complex(alg, random_ranks(alg, 4, 2, rng), rng)
        rep = rep_from_complex(c)
        assert check_box_relations(rep)
        assert complex_from_rep(rep).same_as(c)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(["dual", "cubic", "a2", "brustle_B"]))
def test_box_relations_agree_with_dsquared_after_perturbation(seed, name):
    alg = corpus_algebra(name, F3)
    rng = np.random.default_rng(seed)
    c = random_minimal_complex(alg, random_ranks(alg, 3, 2, rng), rng)
    rep = rep_from_complex(c)
    live = [k for k, M in rep.mats.items() if M.size]
    if live:
        k = live[int(rng.integers(len(live)))]
        M = rep.mats[k]
        r, q = int(rng.integers(M.shape[0])), int(rng.integers(M.shape[1]))
        M[r, q] = (int(M[r, q]) + int(rng.integers(1, 3))) % 3
    assert check_box_relations(rep) == check_dsquared(complex_from_rep(rep)).ok


def _random_chain_map(c, c2, rng):
    F = c.alg.field
    space, basis = chain_maps(c, c2)
    if basis.shape[0] == 0:
        return {n: F.zeros((c2.size(n), c.size(n), c.alg.dim)) for n in c.degrees}
    x = F.matmul(F.random(basis.shape[0], rng)[None, :], basis)[0]
    return space.unpack(x)


def _full(maps, c, c2):
    F = c.alg.field
    return {n: maps.get(n, F.zeros((c2.size(n), c.size(n), c.alg.dim))) for n in c.degrees}


@pytest.mark.parametrize("name", ["dual", "cubic", "a2", "brustle_B"])
def test_identity_transfers_to_identity(name, rng):
    alg = corpus_algebra(name, F3)
    c = random_minimal_complex(alg, random_ranks(alg, 3, 2, rng), rng)
    rep = rep_from_complex(c)
    m = morphism_transfer(identity_map(c), c, c, rep, rep)
    assert m.same_as(identity_box_morphism(rep))
    assert is_box_morphism(m)


@pytest.mark.parametrize("name", ["dual", "cubic", "a2"])
def test_composition_commutes_with_transfer(name, rng):
    alg = corpus_algebra(name, F3)
    ranks = random_ranks(alg, 3, 2, rng)
    cs = [random_minimal_complex(alg, ranks, rng) for _ in range(3)]
    reps = [rep_from_complex(c) for c in cs]
    f = _full(_random_chain_map(cs[0], cs[1], rng), cs[0], cs[1])
    g = _full(_random_chain_map(cs[1], cs[2], rng), cs[1], cs[2])
    mf = morphism_transfer(f, cs[0], cs[1], reps[0], reps[1])
    mg = morphism_transfer(g, cs[1], cs[2], reps[1], reps[2])
    assert is_box_morphism(mf) and is_box_morphism(mg)
    lhs = morphism_transfer(compose_maps(alg, g, f), cs[0], cs[2], reps[0], reps[2])
    assert lhs.same_as(compose_box_morphisms(mg, mf))
    back = morphism_from_box(mf)
    assert all((back[n] == f[n]).all() for n in back)


def test_box_hom_dim_matches_chain_maps(rng):
    alg = corpus_algebra("cubic", F3)
    c = random_minimal_complex(alg, ((1,), (1,), (1,)), rng)
    c2 = random_minimal_complex(alg, ((1,), (2,), (1,)), rng)
    _, basis, _ = box_hom_space(rep_from_complex(c), rep_from_complex(c2, rep_from_complex(c).box))
    assert basis.shape[0] == chain_maps(c, c2)[1].shape[0]


def test_box_iso_agrees_with_iso_test(rng):
    alg = corpus_algebra("dual", F3)
    for _ in range(5):
        c = random_minimal_complex(alg, ((1,), (1,), (1,)), rng)
        c2 = random_minimal_complex(alg, ((1,), (1,), (1,)), rng)
        rep = rep_from_complex(c)
        assert box_isomorphic_exhaustive(rep, rep_from_complex(c2, rep.box)) == iso_test(c, c2).isomorphic


def test_wild_pattern():
    pres = BoxPresentation(["v", "w"], [("x", "v", "v", True), ("y", "v", "w", True)])
    assert wild_pattern_detect(pres) == {"vertex": "v", "loop": "x", "arrow": "y"}
    tame = BoxPresentation(["v", "w"], [("x", "v", "v", True), ("y", "v", "w", False)])
    assert wild_pattern_detect(tame) is None
    with pytest.raises(BoxError):
        wild_pattern_detect(BoxPresentation(["v"], [("x", "v", "u", True)]))


def test_sliced_boxes_have_no_loops(corpus_q):
    # arrows drop the degree, so the pattern never fires on a sliced box
    for alg in corpus_q.values():
        assert wild_pattern_detect(box_presentation(build_sliced_box(alg, 0, 2))) is None
