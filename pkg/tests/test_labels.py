import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from verlinde.errors import LabelParseError, OutOfRange
from verlinde.labels import (GrothendieckVector, MinimalLabel, PiLabel,
                             SingletAtom, SingletFbar, SingletFock,
                             SingletFockRS, Sl2DMinus, Sl2DPlus, Sl2EMinus,
                             Sl2EPlus, Sl2L, Sl2Stag, Sl2Std, canonicalize,
                             delta_rs, label_sort_key, lambda_rs, parse_label,
                             render_label, singlet_atypical)
from verlinde.semisimple import MinimalModelTheory
from verlinde.singlet import SingletTheory
from verlinde.sl2 import Sl2Theory

COPRIME_UV = [(u, v) for u in range(2, 8) for v in range(2, 8) if math.gcd(u, v) == 1]


def test_delta_rs_values():
    assert delta_rs(3, 2, 1, 1) == Fraction(-1, 8)
    assert delta_rs(5, 2, 1, 1) == Fraction(1, 8)


def test_delta_rs_kac_symmetry():
    for u, v in COPRIME_UV:
        for r in range(1, u):
            for s in range(1, v):
                assert delta_rs(u, v, r, s) == delta_rs(u, v, u - r, v - s)


def test_lambda_rs_values_and_identity():
    assert lambda_rs(3, 2, 1, 1) == Fraction(-3, 2)
    assert lambda_rs(5, 2, 2, 1) == Fraction(-3, 2)
    for u, v in COPRIME_UV:
        for r in range(1, u):
            for s in range(1, v):
                assert lambda_rs(u, v, u - r, v - s) == -lambda_rs(u, v, r, s) - 2


def test_minimal_canonicalization():
    theory = MinimalModelTheory(5, 2)
    assert canonicalize(MinimalLabel(3, 1), theory) == MinimalLabel(2, 1)
    with pytest.raises(OutOfRange):
        canonicalize(MinimalLabel(5, 1), theory)


def test_minimal_classes_have_size_two():
    for u, v in COPRIME_UV:
        theory = MinimalModelTheory(u, v)
        classes: dict[MinimalLabel, int] = {}
        for r in range(1, u):
            for s in range(1, v):
                rep = canonicalize(MinimalLabel(r, s), theory)
                classes[rep] = classes.get(rep, 0) + 1
        assert all(n == 2 for n in classes.values())
        assert len(classes) == (u - 1) * (v - 1) // 2


def test_sl2_spectral_flow_rules():
    theory = Sl2Theory(3, 2)
    # s = v-1 discrete label goes through the finite-type chain
    assert canonicalize(Sl2DPlus(0, 1, 1), theory) == Sl2DMinus(2, 1, 1)
    assert canonicalize(Sl2L(0, 1), theory) == Sl2DMinus(1, 2, 1)
    assert canonicalize(Sl2L(0, 1), theory) == theory.vacuum()
    theory43 = Sl2Theory(4, 3)
    assert canonicalize(Sl2DPlus(0, 1, 1), theory43) == Sl2DMinus(1, 3, 1)
    assert canonicalize(Sl2DPlus(2, 2, 2), theory43) == Sl2DMinus(4, 2, 2)


def test_sl2_std_snaps_onto_atypicals():
    theory = Sl2Theory(3, 2)
    lam = float(lambda_rs(3, 2, 1, 1))
    assert canonicalize(Sl2Std(0, lam, 1, 1), theory) == Sl2EPlus(0, 1, 1)
    lam2 = float(lambda_rs(3, 2, 2, 1)) + 2.0
    assert canonicalize(Sl2Std(1, lam2, 1, 1), theory) == Sl2EPlus(1, 2, 1)
    generic = canonicalize(Sl2Std(0, 0.37, 2, 1), theory)
    assert isinstance(generic, Sl2Std)
    assert generic.r == 1 and generic.s == 1  # Kac representative


def test_singlet_snapping():
    theory = SingletTheory(2)
    assert canonicalize(SingletFock(0.0), theory) == SingletFockRS(1, 1)
    ap, am = theory.alpha_plus, theory.alpha_minus
    assert canonicalize(SingletFock((1 - 3) / 2 * ap), theory) == SingletFockRS(3, 1)
    # s = p weights stay generic
    lam = theory.alpha_rs(1, theory.p)
    assert canonicalize(SingletFock(lam), theory) == SingletFock(lam)
    assert singlet_atypical(3, SingletTheory(3).alpha_rs(2, 2)) == SingletFockRS(2, 2)
    assert singlet_atypical(3, 0.123) is None


@st.composite
def any_sl2_label(draw):
    u, v = draw(st.sampled_from([(3, 2), (5, 2), (4, 3), (5, 3)]))
    kind = draw(st.sampled_from(["std", "e+", "e-", "d+", "d-", "l", "s"]))
    ell = draw(st.integers(-4, 4))
    r = draw(st.integers(1, u - 1))
    s = draw(st.integers(1, v - 1))
    if kind == "std":
        lam = draw(st.floats(0.0, 2.0, allow_nan=False))
        label = Sl2Std(ell, lam, r, s)
    elif kind == "e+":
        label = Sl2EPlus(ell, r, s)
    elif kind == "e-":
        label = Sl2EMinus(ell, r, s)
    elif kind == "d+":
        label = Sl2DPlus(ell, r, s)
    elif kind == "d-":
        label = Sl2DMinus(ell, r, s)
    elif kind == "l":
        label = Sl2L(ell, r)
    else:
        label = Sl2Stag(ell, r, s)
    return Sl2Theory(u, v), label


@given(any_sl2_label())
def test_canonicalize_idempotent(theory_label):
    theory, label = theory_label
    once = canonicalize(label, theory)
    assert canonicalize(once, theory) == once


@given(any_sl2_label())
def test_render_parse_roundtrip(theory_label):
    _, label = theory_label
    text = render_label(label)
    back = parse_label(text)
    assert type(back) is type(label)
    assert render_label(back) == text


def test_parse_label_forms():
    assert parse_label("(2,1)") == MinimalLabel(2, 1)
    assert parse_label("M[r=2,s=1]") == SingletAtom(2, 1)
    assert parse_label("F[lam=0.25]") == SingletFock(0.25)
    assert parse_label("F[r=0,s=1]") == SingletFockRS(0, 1)
    assert parse_label("Fbar[r=1,s=2]") == SingletFbar(1, 2)
    assert parse_label("Pi[l=2;lam=0.4]") == PiLabel(2, 0.4)
    assert parse_label("E[l=1;lam=0.25;r=2,s=1]") == Sl2Std(1, 0.25, 2, 1)
    assert parse_label("D-[l=0;r=1,s=1]") == Sl2DMinus(0, 1, 1)
    assert parse_label("S[l=0;r=1,s=1]") == Sl2Stag(0, 1, 1)
    with pytest.raises(LabelParseError):
        parse_label("bogus")
    with pytest.raises(LabelParseError):
        parse_label("E[l=1]")


def test_pi_label_weight_mod_one():
    from verlinde.semisimple import PiTheory

    theory = PiTheory(3, 2)
    assert canonicalize(PiLabel(2, 1.25), theory) == PiLabel(2, 0.25)


coeff_lists = st.lists(
    st.tuples(st.sampled_from([SingletAtom(r, 1) for r in range(-2, 3)]),
              st.integers(-3, 3)),
    max_size=6,
)


@given(coeff_lists, coeff_lists)
def test_grothendieck_vector_group_laws(items1, items2):
    a = GrothendieckVector(items1)
    b = GrothendieckVector(items2)
    assert a + b == b + a
    assert (a + b) - b == a
    assert a + GrothendieckVector.zero() == a
    assert all(c != 0 for _, c in (a + b).items())


def test_grothendieck_vector_render_and_sorting():
    vec = GrothendieckVector([(SingletAtom(2, 1), 1), (SingletAtom(1, 1), 2)])
    assert vec.render() == "2*M[r=1,s=1] + M[r=2,s=1]"
    keys = [label_sort_key(lab) for lab in vec.labels()]
    assert keys == sorted(keys)


def test_grothendieck_vector_merges_close_weights():
    a = Sl2Std(0, 0.1 + 0.2, 1, 1)
    b = Sl2Std(0, 0.3, 1, 1)
    vec = GrothendieckVector([(a, 1), (b, 1)])
    assert len(vec) == 1
    assert vec.items()[0][1] == 2


def test_grothendieck_vector_isclose():
    a = GrothendieckVector([(SingletFock(0.5), 1)])
    b = GrothendieckVector([(SingletFock(0.5 + 1e-12), 1)])
    c = GrothendieckVector([(SingletFock(0.6), 1)])
    assert a.isclose(b)
    assert not a.isclose(c)
