"""Isomorphism testing, fingerprints, and automorphism harvesting."""

import pytest

from coclass3.families import construct, parse_label
from coclass3.iso import (are_isomorphic, automorphism_pairs, fingerprint,
                          has_gi_automorphism)
from coclass3.pc import build_presentation
from coclass3.subgroups import Subgroup

# refined presentations (every generator of relative order 3) of the three
# groups of order 27 that the fingerprint must separate
C27 = {"prime": 3,
       "gens": [{"name": "a", "rel_order": 3},
                {"name": "b", "rel_order": 3},
                {"name": "c", "rel_order": 3}],
       "powers": {"a": [["b", 1]], "b": [["c", 1]]}}
C9xC3 = {"prime": 3,
         "gens": [{"name": "a", "rel_order": 3},
                  {"name": "b", "rel_order": 3},
                  {"name": "c", "rel_order": 3}],
         "powers": {"a": [["b", 1]]}}
HEISENBERG = {
    "prime": 3,
    "gens": [{"name": "x", "rel_order": 3},
             {"name": "y", "rel_order": 3},
             {"name": "z", "rel_order": 3}],
    "conjugates": {"y^x": [["y", 1], ["z", 1]]},
}


def family(text):
    return construct(parse_label(text))


def test_fingerprint_separates_order_27_groups():
    fps = {name: fingerprint(build_presentation(spec))
           for name, spec in (("C27", C27), ("C9xC3", C9xC3),
                              ("Heis", HEISENBERG))}
    assert len(set(fps.values())) == 3
    assert fps["C27"].cl == 1 and fps["Heis"].cl == 2


def test_fingerprint_equal_for_equal_groups():
    assert fingerprint(family("M[e=3,i=2]")) == fingerprint(family("M[e=3,i=2]"))


def test_are_isomorphic_positive():
    a = family("M[e=2,i=1]")
    b = family("M[e=2,c=3]")
    assert are_isomorphic(a, b) == "yes"


def test_are_isomorphic_negative_same_fingerprint_scale():
    # distinct mainline vertices of equal order in different trees
    a = family("M[e=3,i=2]")     # order 3^7
    b = family("MM[e=3,i=1]")    # order 3^7
    assert are_isomorphic(a, b) == "no"


def test_are_isomorphic_differing_orders():
    a = family("M[e=2,i=1]")
    b = family("M[e=2,i=2]")
    assert are_isomorphic(a, b) == "no"


def test_automorphism_pairs_are_automorphisms():
    G = family("M[e=2,i=1]")
    pairs = automorphism_pairs(G, max_found=8)
    assert pairs
    for a, b in pairs:
        S = Subgroup.closure(G, [a, b],
                             conjugators=[G.gen(i) for i in range(G.n)])
        assert S.order() == G.order(), "images must generate"


def test_exhaustive_harvest_closed_under_size():
    # the number of harvested pairs is the same on repeated runs
    G = family("M[e=2,i=1]")
    p1 = automorphism_pairs(G, max_found=None, check_budget=None)
    p2 = automorphism_pairs(G, max_found=None, check_budget=None)
    assert len(p1) == len(p2)
    assert len(p1) >= 8


def test_gi_action_on_mainline_and_cyclic_leaf():
    # mainline vertices admit the generator-inverting action, the
    # cyclic-centre leaf of the first odd branch does not
    assert has_gi_automorphism(family("M[e=2,i=1]")) == "yes"
    assert has_gi_automorphism(family("V[e=2,i=2,kind=b3,n=1]")) == "no"
