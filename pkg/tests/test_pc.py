"""Collection engine: normal forms against a naive rewriter, group axioms,
consistency checking, and the structured build interface."""

import random

import pytest

from coclass3.errors import InconsistentPresentation, MalformedSpec
from coclass3.families import construct, parse_label
from coclass3.pc import PcPresentation, build_presentation

C3 = {"prime": 3, "gens": [{"name": "a", "rel_order": 3}]}

C9 = {"prime": 3, "gens": [{"name": "a", "rel_order": 9}]}

HEISENBERG = {
    "prime": 3,
    "gens": [{"name": "x", "rel_order": 3},
             {"name": "y", "rel_order": 3},
             {"name": "z", "rel_order": 3}],
    "conjugates": {"y^x": [["y", 1], ["z", 1]]},
}


def family(text):
    return construct(parse_label(text))


# -- naive rewriting oracle ---------------------------------------------------

def naive_normal_form(G, flat, fuel=200_000):
    """Reduce a flat list of generator indices to normal form by leftmost
    rewriting: merge runs via power relations, swap inversions via conjugate
    relations.  Independent of the engine's stack collector."""
    flat = list(flat)
    while fuel:
        fuel -= 1
        changed = False
        # leftmost run of length = relative order
        run_start, run_len = 0, 0
        for k in range(len(flat)):
            if k and flat[k] == flat[k - 1]:
                run_len += 1
            else:
                run_start, run_len = k, 1
            if run_len == G.orders[flat[k]]:
                repl = []
                for a, b in G.powers.get(flat[k], []):
                    repl += [a] * b
                flat[run_start:k + 1] = repl
                changed = True
                break
        if changed:
            continue
        # leftmost inversion j i with j > i
        for k in range(len(flat) - 1):
            j, i = flat[k], flat[k + 1]
            if j > i:
                img = G.conj.get((j, i), [(j, 1)])
                repl = [i]
                for a, b in img:
                    repl += [a] * b
                flat[k:k + 2] = repl
                changed = True
                break
        if not changed:
            break
    assert fuel, "naive rewriter ran out of fuel"
    vec = [0] * G.n
    for g in flat:
        vec[g] += 1
    return tuple(vec)


def random_flat_word(rng, G, length):
    return [rng.randrange(G.n) for _ in range(length)]


@pytest.mark.parametrize("text", ["M[e=2,i=1]", "V[e=2,i=2,kind=b16]",
                                  "MM[e=2,i=1]", "B[e=3]"])
def test_collection_matches_naive_rewriting(text):
    G = family(text)
    rng = random.Random(20260823)
    for _ in range(150):
        flat = random_flat_word(rng, G, rng.randrange(1, 9))
        acc = G.identity
        for g in flat:
            acc = G.mul(acc, G.gen(g))
        assert acc == naive_normal_form(G, flat)


def test_collection_matches_naive_rewriting_heisenberg():
    G = build_presentation(HEISENBERG)
    rng = random.Random(7)
    for _ in range(300):
        flat = random_flat_word(rng, G, rng.randrange(1, 12))
        acc = G.identity
        for g in flat:
            acc = G.mul(acc, G.gen(g))
        assert acc == naive_normal_form(G, flat)


# -- group axioms by seeded fuzzing ------------------------------------------

def random_element(rng, G):
    return G.element([(i, rng.randrange(G.orders[i])) for i in range(G.n)])


@pytest.mark.parametrize("text", ["M[e=2,i=1]", "M[e=3,i=2]",
                                  "V[e=2,i=2,kind=b3,n=1]", "MM[e=2,i=2]"])
def test_group_axioms_fuzz(text):
    G = family(text)
    rng = random.Random(hash(text) & 0xffff)
    for _ in range(2000):
        a, b, c = (random_element(rng, G) for _ in range(3))
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
        assert G.mul(a, G.identity) == a
        assert G.mul(G.identity, a) == a
        assert G.mul(a, G.inv(a)) == G.identity
        assert G.mul(G.inv(a), a) == G.identity


def test_power_and_order_laws():
    G = family("V[e=3,i=2,kind=a1bicyclic,n=2]")
    rng = random.Random(99)
    for _ in range(300):
        a = random_element(rng, G)
        k = rng.randrange(-8, 9)
        expect = G.identity
        for _ in range(abs(k)):
            expect = G.mul(expect, a)
        if k < 0:
            expect = G.inv(expect)
        assert G.pow(a, k) == expect
        o = G.elem_order(a)
        assert G.pow(a, o) == G.identity
        assert G.order() % o == 0


def test_commutator_and_conjugate_identities():
    G = family("MM[e=3,i=1]")
    rng = random.Random(5)
    for _ in range(200):
        a, b = random_element(rng, G), random_element(rng, G)
        # [a, b] = a^-1 b^-1 a b and a^b = b^-1 a b
        assert G.comm(a, b) == G.mul(G.inv(a), G.mul(G.inv(b), G.mul(a, b)))
        assert G.conj_elem(a, b) == G.mul(G.inv(b), G.mul(a, b))
        assert G.conj_elem(a, b) == G.mul(a, G.comm(a, b))


# -- trivial and structured cases ---------------------------------------------

def test_cyclic3_identity_case():
    G = build_presentation(C3)
    assert G.order() == 3
    assert G.is_consistent()
    a = G.gen(0)
    assert G.pow(a, 3) == G.identity
    assert G.elem_order(a) == 3


def test_weighted_order_nine_generator():
    G = build_presentation(C9)
    assert G.order() == 9
    assert G.elem_order(G.gen(0)) == 9


def test_heisenberg_is_extraspecial():
    G = build_presentation(HEISENBERG)
    assert G.order() == 27
    assert G.is_consistent()
    x, y, z = G.gen(0), G.gen(1), G.gen(2)
    assert G.comm(y, x) != G.identity
    assert G.comm(z, x) == G.identity and G.comm(z, y) == G.identity
    assert G.elem_order(x) == 3 and G.elem_order(y) == 3


def test_heisenberg_against_matrix_model():
    """Generator map to unitriangular 3x3 matrices over GF(3) is an
    isomorphism: products agree on every pair of elements."""
    G = build_presentation(HEISENBERG)

    def mat(a, b, c):
        # upper unitriangular [[1, a, c], [0, 1, b], [0, 0, 1]]
        return (a % 3, b % 3, c % 3)

    def mmul(m1, m2):
        a1, b1, c1 = m1
        a2, b2, c2 = m2
        return mat(a1 + a2, b1 + b2, c1 + c2 + a1 * b2)

    # y^x = y z forces x -> col generator, y -> row generator, z -> center
    images = {}
    for e0 in range(3):
        for e1 in range(3):
            for e2 in range(3):
                g = G.element([(0, e0), (1, e1), (2, e2)])
                m = mat(0, 0, 0)
                for _ in range(e0):
                    m = mmul(m, mat(0, 1, 0))
                for _ in range(e1):
                    m = mmul(m, mat(1, 0, 0))
                for _ in range(e2):
                    m = mmul(m, mat(0, 0, 1))
                images[g] = m
    assert len(set(images.values())) == 27
    for g in images:
        for h in images:
            assert images[G.mul(g, h)] == mmul(images[g], images[h])


def test_malformed_specs_rejected():
    with pytest.raises(MalformedSpec):
        build_presentation({"prime": 3, "gens": []})
    with pytest.raises(MalformedSpec):
        build_presentation({"prime": 3,
                            "gens": [{"name": "a", "rel_order": 6}]})
    with pytest.raises(MalformedSpec):
        build_presentation({"prime": 3,
                            "gens": [{"name": "a", "rel_order": 3}],
                            "powers": {"b": []}})
    with pytest.raises(MalformedSpec):
        build_presentation({"prime": 3,
                            "gens": [{"name": "a", "rel_order": 3},
                                     {"name": "a", "rel_order": 3}]})


def test_inconsistent_presentation_detected():
    # x^3 = y claims ord(x) = 9 while the relative orders cap it at 3 per
    # slot; the overlap x * x^3 resolves two ways
    bad = {"prime": 3,
           "gens": [{"name": "x", "rel_order": 3},
                    {"name": "y", "rel_order": 3}],
           "powers": {"x": [["y", 1]]},
           "conjugates": {"y^x": [["y", 2]]}}
    G = build_presentation(bad, strict=False)
    assert not G.is_consistent()
    with pytest.raises(InconsistentPresentation):
        G.require_consistent()


def test_json_round_trip():
    G = family("M[e=3,i=2]")
    H = build_presentation(G.to_json_dict())
    assert H.order() == G.order()
    assert H.is_consistent()
    rng = random.Random(3)
    for _ in range(100):
        a, b = random_element(rng, G), random_element(rng, G)
        assert G.mul(a, b) == H.mul(a, b)


def test_gap_export_mentions_every_generator():
    G = family("M[e=2,i=1]")
    text = G.to_gap()
    assert "FreeGroup" in text
    for nm in G.names:
        assert nm in text
