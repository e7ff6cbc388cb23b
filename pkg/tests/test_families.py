"""Family labels, parametrized presentations, order formulas, and the
n-variant isomorphism parity."""

import pytest

from coclass3.errors import BadParameters
from coclass3.families import (ALL_KINDS, KIND_TYPE_NAME, N_KINDS,
                               FamilyLabel, coarse_presentation, construct,
                               degenerate_root_presentation, parse_label)
from coclass3.iso import are_isomorphic, fingerprint


def family(text):
    return construct(parse_label(text))


# -- label grammar ------------------------------------------------------------

def test_parse_label_forms():
    assert parse_label("M[e=4,i=2]") == FamilyLabel("CF_mainline", 4, 4)
    assert parse_label("M[e=4,c=4]") == FamilyLabel("CF_mainline", 4, 4)
    assert parse_label("MM[e=3,i=1]") == FamilyLabel("BCF_mainline", 3, 3)
    assert parse_label("B[e=5]") == FamilyLabel("Class2_B", 5)
    assert parse_label("V[e=4,i=2,kind=b16]") == FamilyLabel("CF_b16", 4, 4)
    assert parse_label("V[e=4,i=2,kind=b3,n=2]") == FamilyLabel("CF_b3", 4, 4, 2)
    assert parse_label("VV[e=2,i=3,kind=D10,n=1]") == \
        FamilyLabel("BCF_D10", 2, 5, 1)
    # n defaults to 1 for the kinds that take one
    assert parse_label("V[e=4,i=2,kind=a1cyclic]").n == 1


def test_label_string_round_trip():
    labels = [FamilyLabel("CF_mainline", 3, 5),
              FamilyLabel("CF_a1_bicyclic", 2, 4, 2),
              FamilyLabel("BCF_B2", 4, 6, 1),
              FamilyLabel("Class2_B", 7)]
    for lab in labels:
        assert parse_label(str(lab)) == lab


def test_label_errors():
    for bad in ["M[e=4]", "M(4,2)", "Q[e=4,i=2]", "V[e=4,i=2]",
                "V[e=4,i=2,kind=D10]", "VV[e=4,i=2,kind=b16]",
                "M[e=4,i=x]", "M[e=1,i=2]"]:
        with pytest.raises(BadParameters):
            parse_label(bad)
    with pytest.raises(BadParameters):
        FamilyLabel("CF_b3", 3, 4)          # missing n
    with pytest.raises(BadParameters):
        FamilyLabel("CF_mainline", 3, 2)    # class below 3
    with pytest.raises(BadParameters):
        FamilyLabel("nonsense", 3, 3)


def test_branch_index_and_order_exponent():
    lab = parse_label("M[e=4,i=2]")
    assert lab.i == 2 and lab.c == 4
    assert lab.order_exponent == 8          # 3^(e+c)
    assert parse_label("MM[e=4,i=2]").order_exponent == 9   # 3^(e+c+1)
    assert parse_label("B[e=4]").order_exponent == 6        # 3^(e+2)


# -- construction -------------------------------------------------------------

def test_order_formulas_spot_grid():
    for e in (2, 3, 4):
        for c in (3, 4, 5):
            assert family(f"M[e={e},c={c}]").order_exponent() == e + c
            assert family(f"MM[e={e},c={c}]").order_exponent() == e + c + 1
            assert family(f"V[e={e},c={c},kind=a1twig]").order_exponent() \
                == e + c
            assert family(f"VV[e={e},c={c},kind=B2,n=2]").order_exponent() \
                == e + c + 1
        assert family(f"B[e={e}]").order_exponent() == e + 2


def test_every_kind_constructs_consistently():
    for kind in ALL_KINDS:
        if kind == "Class2_B":
            lab = FamilyLabel(kind, 3)
        elif kind in N_KINDS:
            lab = FamilyLabel(kind, 3, 5, 2)
        else:
            lab = FamilyLabel(kind, 3, 5)
        G = construct(lab)
        assert G.is_consistent(), kind
        assert all(o == 3 for o in G.orders), "refined orders are all 3"


def test_coarse_form_keeps_the_order():
    lab = parse_label("MM[e=3,i=2]")
    coarse = coarse_presentation(lab)
    refined = construct(lab)
    assert coarse.order() == refined.order()
    assert coarse.orders[0] == 3 ** (lab.e + 1)     # x carries the 3-power


def test_degenerate_roots_match_schema_constructions():
    for kind, head in (("CF_mainline", "M"), ("BCF_mainline", "MM")):
        for e in (2, 3, 4):
            R = degenerate_root_presentation(kind, e)
            S = family(f"{head}[e={e},c=3]")
            assert R.order() == S.order()
            if R.order() <= 3 ** 7:
                assert are_isomorphic(R, S) == "yes", (kind, e)
            else:
                assert fingerprint(R) == fingerprint(S), (kind, e)
    with pytest.raises(BadParameters):
        degenerate_root_presentation("CF_b16", 3)


def test_kind_type_names_cover_all_kinds():
    assert set(KIND_TYPE_NAME) == set(ALL_KINDS)
    assert KIND_TYPE_NAME["CF_mainline"] == "a.1"
    assert KIND_TYPE_NAME["BCF_mainline"] == "d.10"


# -- n-variant isomorphism parity ---------------------------------------------

def variant_pair(kind_token, head, e, c):
    a = family(f"{head}[e={e},c={c},kind={kind_token},n=1]")
    b = family(f"{head}[e={e},c={c},kind={kind_token},n=2]")
    return are_isomorphic(a, b)

def test_bicyclic_a1_variants_always_distinct():
    assert variant_pair("a1bicyclic", "V", 2, 4) == "no"
    assert variant_pair("a1bicyclic", "V", 2, 5) == "no"


def test_cyclic_centre_variants_fuse_on_odd_branches():
    # odd branch (c even): the two exponents give isomorphic groups;
    # even branch (c odd): they are distinct
    for tok in ("b3", "a1cyclic"):
        assert variant_pair(tok, "V", 2, 4) == "yes", tok
        assert variant_pair(tok, "V", 2, 5) == "no", tok


def test_bcf_variants_fuse_on_odd_branches():
    for tok in ("D10", "B2", "C4", "D5"):
        assert variant_pair(tok, "VV", 2, 4) == "yes", tok
