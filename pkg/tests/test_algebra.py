from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derived_tame.algebra import AlgebraError, build_algebra, check_coassociativity
from derived_tame.corpus import ALGEBRAS, corpus_algebra, corpus_family, corpus_presentation, random_presentation
from derived_tame.fields import QQ, finite_field
from derived_tame.groebner import FieldScalars, RationalFunctionScalars, groebner_basis

# dimensions from counting normal words by hand
EXPECTED_DIMS = {"dual": 2, "cubic": 3, "a2": 3, "kxk": 2, "brustle_A0": 16, "brustle_B": 15}


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_corpus_dimensions_and_invariants(name, corpus_q):
    alg = corpus_q[name]
    assert alg.dim == EXPECTED_DIMS[name]
    assert alg.check_invariants() == []
    assert check_coassociativity(alg) == []


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_peirce_dims_sum_to_dim(name, corpus_f3):
    alg = corpus_f3[name]
    assert alg.peirce_dims().sum() == alg.dim
    assert alg.radical_dims().sum() == alg.dim - alg.num_vertices


def test_brustle_quotient_kills_beta1_alpha(corpus_q):
    B = corpus_q["brustle_B"]
    assert B.element("beta1*alpha").is_zero()
    A0 = corpus_q["brustle_A0"]
    assert not A0.element("xi1*alpha").is_zero()
    assert A0.element("gamma1*beta1").is_zero()


def test_cubic_nu_is_deconcatenation(corpus_q):
    alg = corpus_q["cubic"]
    assert alg.nu(0, 0) == {"x*": [], "(x*x)*": [("1", "x*", "x*")]}


def test_groebner_tips_of_generic_brustle_fibre():
    fam = corpus_family("brustle")
    S = RationalFunctionScalars(0)
    gens = [{p: S.from_poly(c) for p, c in rel} for rel in fam.relations]
    gb = groebner_basis(fam.quiver, S, gens, max_tip_len=8)
    tips = sorted(fam.quiver.path_name(t) for t in gb.tips)
    assert tips == ["beta1*alpha", "gamma1*beta1", "gamma2*beta2", "xi1*alpha"]
    assert len(gb.normal_words(8)) == 15


def test_groebner_reduction_is_idempotent():
    pres = corpus_presentation("cubic")
    S = FieldScalars(QQ)
    gens = [{p: S.from_fraction(c) for p, c in rel} for rel in pres.relations]
    gb = groebner_basis(pres.quiver, S, gens, max_tip_len=6)
    x4 = {(0, (0, 0, 0, 0)): QQ.one, (0, (0,)): QQ.one}
    r = gb.reduce(x4)
    assert r == gb.reduce(r) == {(0, (0,)): QQ.one}


def test_non_admissible_rejected_in_strict_mode():
    fam = corpus_family("x2")
    with pytest.raises(AlgebraError):
        build_algebra(fam.evaluate(3))
    lenient = build_algebra(fam.evaluate(3), strict=False)
    assert lenient.dim == 2 and lenient.radical_basis.shape[0] == 0


def test_missing_nilpotency_rejected():
    # dropping x^2 leaves k[x], which no truncation bound can capture
    pres = corpus_presentation("dual")
    free = replace(pres, relations=())
    with pytest.raises(AlgebraError):
        build_algebra(free)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_random_presentations_satisfy_invariants(seed):
    rng = np.random.default_rng(seed)
    F = QQ if seed % 2 else finite_field(3)
    alg = build_algebra(random_presentation(rng, F))
    assert alg.check_invariants() == []
    assert check_coassociativity(alg) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(sorted(ALGEBRAS)))
def test_element_arithmetic_associative(seed, name):
    alg = corpus_algebra(name, finite_field(5))
    rng = np.random.default_rng(seed)
    a, b, c = (alg.element(alg.field.random(alg.dim, rng)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert alg.one() * a == a == a * alg.one()


def test_change_of_field_keeps_dimension(corpus_q):
    for name, alg in corpus_q.items():
        assert alg.with_field(finite_field(4)).dim == alg.dim
