"""Central extension apparatus: covers, nuclei, descendant enumeration,
and parent round trips."""

import pytest

from coclass3.errors import BadParameters, CapExceeded, StepTooLarge
from coclass3.families import construct, parse_label
from coclass3.iso import are_isomorphic, fingerprint
from coclass3.pc import build_presentation
from coclass3.pcover import (immediate_descendants, p_cover, p_parent,
                             parent, propagation_kind)

C3 = {"prime": 3, "gens": [{"name": "a", "rel_order": 3}]}


def family(text):
    return construct(parse_label(text))


def test_cover_of_cyclic3():
    G = build_presentation(C3)
    res = p_cover(G)
    assert res.cover.order() == 9
    assert res.multiplicator.order() == 3
    assert res.nuclear_rank == 1


def test_descendants_of_cyclic3():
    # the only step-1 descendant is C9: the elementary abelian C3xC3 is a
    # tree root of its own (its p-parent is trivial, not C3)
    G = build_presentation(C3)
    d = immediate_descendants(G, 1)
    assert len(d.members) == 1
    D = d.members[0][0]
    assert D.order() == 9
    assert D.elem_order(D.gen(0)) == 9 or D.elem_order(D.gen(1)) == 9


def test_nuclear_ranks_signal_the_bifurcation():
    assert p_cover(family("M[e=3,i=1]")).nuclear_rank == 2
    assert p_cover(family("M[e=3,i=2]")).nuclear_rank == 1
    assert p_cover(family("M[e=2,i=1]")).nuclear_rank == 1


def test_step_size_exceeding_nuclear_rank():
    G = family("M[e=2,i=1]")
    with pytest.raises(StepTooLarge):
        immediate_descendants(G, 2)


def test_cap_guard():
    G = family("M[e=3,i=1]")
    with pytest.raises(CapExceeded):
        immediate_descendants(G, 1, cap=G.order())


def test_orbits_mode_requires_exhaustive_harvest():
    G = family("M[e=2,i=1]")
    with pytest.raises(BadParameters):
        immediate_descendants(G, 1, dedup="orbits")


def test_first_branch_constitution_and_round_trip():
    # descendants of the order-243 root: the full first odd branch
    G = family("M[e=2,i=1]")
    d = immediate_descendants(G, 1)
    assert d.dedup_mode == "iso"
    types = sorted(p.named_type for _, p, _ in d.members)
    assert types == ["a.1", "a.1", "a.1", "a.1", "a.1", "b.16", "b.3"]
    for D, _, _ in d.members:
        P = p_parent(D)
        assert P.order() == G.order()
        assert are_isomorphic(P, G) == "yes"
        assert propagation_kind(D, P) == "endo"


def test_orbit_and_iso_classifications_agree():
    G = family("M[e=2,i=1]")
    di = immediate_descendants(G, 1, dedup="iso")
    do = immediate_descendants(G, 1, dedup="orbits",
                               max_autos=None, check_budget=None)
    assert len(di.members) == len(do.members)
    fpi = sorted((fp for _, _, fp in di.members), key=repr)
    fpo = sorted((fp for _, _, fp in do.members), key=repr)
    assert fpi == fpo


def test_parent_and_p_parent_on_the_mainline():
    child = family("M[e=2,i=2]")
    par = parent(child)
    assert par.order_exponent() == child.order_exponent() - 1
    assert are_isomorphic(par, family("M[e=2,i=1]")) == "yes"
    pp = p_parent(child)
    assert are_isomorphic(pp, par) == "yes"


def test_exo_genetic_link_at_the_tree_root():
    # the coclass-4 tree root hangs below the coclass-3 one with a changed
    # commutator quotient
    child = family("M[e=4,i=1]")
    pp = p_parent(child)
    assert pp.order_exponent() == child.order_exponent() - 1
    assert are_isomorphic(pp, family("M[e=3,i=1]")) == "yes"
    assert propagation_kind(child, pp) == "exo"


def test_quotient_order_conservation():
    for text in ["M[e=2,i=2]", "MM[e=2,i=2]", "V[e=2,i=2,kind=b16]"]:
        G = family(text)
        P = parent(G)
        Pp = p_parent(G)
        assert G.order() % P.order() == 0
        assert G.order() % Pp.order() == 0
