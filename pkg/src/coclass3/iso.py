"""Structural fingerprints and guarded brute-force isomorphism testing.

The isomorphism test works on a generating pair (x, y): a word-tracked
subgroup closure produces a polycyclic generating sequence b_0, ..., b_{n-1}
of G together with straight-line programs expressing each b_i in x and y.
The cubes b_i^3 and conjugates b_j^{b_i}, re-expressed in the b-basis, form
a consistent polycyclic presentation defining G.  A candidate map x -> a,
y -> b into H extends to an isomorphism iff the images of the b_i (evaluated
through the straight-line programs) satisfy those relations and generate H;
the search over candidate pairs is pruned by element orders and by
independence modulo the Frattini subgroup, and aborts a candidate on the
first failing relation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .artin import artin_pattern, find_designated_pair
from .errors import NotTwoGenerated
from .pc import PcPresentation
from .series import (
    abelianization_type,
    centre,
    derived_subgroup,
    frattini_subgroup,
    scalar_invariants,
)
from .subgroups import Subgroup, centralizer_basis

HISTOGRAM_CAP = 3 ** 7
SEARCH_CAP = 3 ** 7
GI_CAP = 3 ** 8


# -- straight-line programs ---------------------------------------------------

class Slp:
    """A node of a straight-line program over two atoms 'x' and 'y'."""
    __slots__ = ("op", "args")

    def __init__(self, op, *args):
        self.op = op
        self.args = args

    @staticmethod
    def atom(name):
        return Slp("atom", name)


X_ATOM = Slp.atom("x")
Y_ATOM = Slp.atom("y")


def slp_eval(node, pres, ax, ay, memo):
    key = id(node)
    v = memo.get(key)
    if v is not None:
        return v
    if node.op == "atom":
        v = ax if node.args[0] == "x" else ay
    elif node.op == "mul":
        v = pres.mul(slp_eval(node.args[0], pres, ax, ay, memo),
                     slp_eval(node.args[1], pres, ax, ay, memo))
    elif node.op == "pow":
        v = pres.pow(slp_eval(node.args[0], pres, ax, ay, memo), node.args[1])
    elif node.op == "comm":
        v = pres.comm(slp_eval(node.args[0], pres, ax, ay, memo),
                      slp_eval(node.args[1], pres, ax, ay, memo))
    else:
        raise AssertionError(node.op)
    memo[key] = v
    return v


def pcgs_with_words(G: PcPresentation, x, y):
    """Echelon pcgs of <x, y> = G, each element paired with an SLP in x, y.

    Returns a list of (element, slp) ordered by leading index; raises
    NotTwoGenerated if the pair does not generate.
    """
    p = G.p
    basis = {}
    work = [(x, X_ATOM), (y, Y_ATOM)]
    while work:
        g, wd = work.pop()
        while True:
            lead = next((i for i, e in enumerate(g) if e), None)
            if lead is None or lead not in basis:
                break
            b, bw = basis[lead]
            k = p - g[lead]
            g = G.mul(G.pow(b, k), g)
            wd = Slp("mul", Slp("pow", bw, k), wd)
        if lead is None:
            continue
        e = g[lead]
        if e != 1:
            k = pow(e, -1, p)
            g = G.pow(g, k)
            wd = Slp("pow", wd, k)
        entries = list(basis.values())
        basis[lead] = (g, wd)
        work.append((G.pow(g, p), Slp("pow", wd, p)))
        for h, hw in entries:
            work.append((G.comm(g, h), Slp("comm", wd, hw)))
    if len(basis) != G.n:
        raise NotTwoGenerated("the pair does not generate the group")
    return [basis[l] for l in sorted(basis)]


def _express(G, basis_elems, g):
    """Exponents (c_0, ..., c_{n-1}) with g = prod basis_elems[l]^{c_l}."""
    p = G.p
    coeffs = [0] * len(basis_elems)
    by_lead = {next(i for i, e in enumerate(b) if e): m
               for m, b in enumerate(basis_elems)}
    steps = 0
    while True:
        lead = next((i for i, e in enumerate(g) if e), None)
        if lead is None:
            return coeffs
        pos = by_lead.get(lead)
        if pos is None:
            raise AssertionError("element not in the span of the pcgs")
        c = g[lead]
        coeffs[pos] = c
        # true left division: b^(p-c) is generally not the inverse of b^c here
        g = G.mul(G.inv(G.pow(basis_elems[pos], c)), g)
        steps += 1
        if steps > len(basis_elems) + 1:
            raise AssertionError("peeling does not terminate")


def relation_table(G: PcPresentation, x, y):
    """(words, cube_rels, conj_rels) presenting G on the pcgs of <x, y>.

    cube_rels[i] = exponent row of b_i^3; conj_rels[(j, i)] = exponent row of
    b_j^{b_i} (only rows that differ from b_j itself are kept).
    """
    bw = pcgs_with_words(G, x, y)
    elems = [b for b, _ in bw]
    words = [w for _, w in bw]
    cubes = [_express(G, elems, G.pow(b, G.p)) for b in elems]
    conj = {}
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            # trivial rows are kept: commuting is a relation the candidate
            # images must satisfy too
            img = G.conj_elem(elems[j], elems[i])
            conj[(j, i)] = _express(G, elems, img)
    return words, cubes, conj


def _check_candidate(H, words, cubes, conj, a, b):
    """Do the images of the pcgs under x->a, y->b satisfy all relations?"""
    memo = {}
    imgs = [None] * len(words)

    def img(i):
        v = imgs[i]
        if v is None:
            v = slp_eval(words[i], H, a, b, memo)
            imgs[i] = v
        return v

    def prod(row):
        v = H.identity
        for l, c in enumerate(row):
            if c:
                v = H.mul(v, H.pow(img(l), c))
        return v

    for (j, i), row in conj.items():
        if H.conj_elem(img(j), img(i)) != prod(row):
            return False
    for i, row in enumerate(cubes):
        if H.pow(img(i), H.p) != prod(row):
            return False
    return True


# -- fingerprints -------------------------------------------------------------

@dataclass(frozen=True)
class Fingerprint:
    order_exponent: int
    cl: int
    cl_p: int
    ab_type: tuple
    centre_type: tuple
    aqi: tuple                 # sorted multiset of the four AQI partitions
    kappa_canonical: tuple
    derived_exponent: int      # log order of G'
    order_histogram: tuple     # (order, count) pairs; () if over cap
    cube_profile: tuple        # ((order of h, #cube preimages), count) pairs
    histogram_included: bool


def fingerprint(G: PcPresentation, histogram_cap=HISTOGRAM_CAP) -> Fingerprint:
    si = scalar_invariants(G)
    ab = tuple(abelianization_type(G))
    Z = centre(G)
    Gp = derived_subgroup(G)
    try:
        pat = artin_pattern(G)
        aqi = tuple(sorted(tuple(a) for a in pat.alpha))
        kappa = pat.kappa_canonical
    except Exception:
        aqi = ()
        kappa = ()
    hist = ()
    cube_prof = ()
    included = False
    if G.order() <= histogram_cap:
        # one p-th-power map pass; element orders follow from the chain
        # g -> g^p -> ... since ord(g) = p * ord(g^p) in a p-group
        cube = {g: G.pow(g, G.p) for g in Subgroup.full(G).elements()}
        orders = {G.identity: 1}
        for g in cube:
            chain = []
            h = g
            while h not in orders:
                chain.append(h)
                h = cube[h]
            o = orders[h]
            for h2 in reversed(chain):
                o *= G.p
                orders[h2] = o
        counts = {}
        for o in orders.values():
            counts[o] = counts.get(o, 0) + 1
        preimages = {}
        for c in cube.values():
            preimages[c] = preimages.get(c, 0) + 1
        hist = tuple(sorted(counts.items()))
        prof = {}
        for h, c in preimages.items():
            key = (orders[h], c)
            prof[key] = prof.get(key, 0) + 1
        cube_prof = tuple(sorted(prof.items()))
        included = True
    return Fingerprint(order_exponent=si.lo, cl=si.cl, cl_p=si.cl_p,
                       ab_type=ab, centre_type=tuple(Z.abelian_type()),
                       aqi=aqi, kappa_canonical=kappa,
                       derived_exponent=Gp.order_exponent(),
                       order_histogram=hist, cube_profile=cube_prof,
                       histogram_included=included)


# -- isomorphism search -------------------------------------------------------

def _candidates(H, order_needed, frat, modulus=None):
    """Elements of H of the given order that are nontrivial mod Phi(H) (and,
    if `modulus` is a subgroup, independent of it mod Phi)."""
    out = []
    for g in Subgroup.full(H).elements():
        if H.elem_order(g) != order_needed:
            continue
        if frat.contains(g):
            continue
        if modulus is not None and modulus.contains(g):
            continue
        out.append(g)
    return out


def are_isomorphic(G: PcPresentation, H: PcPresentation,
                   search_cap=SEARCH_CAP) -> str:
    """'yes' / 'no' / 'unknown' (order above cap with equal fingerprints)."""
    if G.order() != H.order():
        return "no"
    if fingerprint(G) != fingerprint(H):
        return "no"
    if G.order() > search_cap:
        return "unknown"
    x, y, _, _ = find_designated_pair(G)
    words, cubes, conj = relation_table(G, x, y)
    ox, oy = G.elem_order(x), G.elem_order(y)
    # cheap pair invariants that any isomorphic image must reproduce
    o_comm = G.elem_order(G.comm(x, y))
    o_prod = G.elem_order(G.mul(x, y))
    fratH = frattini_subgroup(H)
    allH = [h for h in Subgroup.full(H).elements() if not fratH.contains(h)]
    orders = {h: H.elem_order(h) for h in allH}
    b_cands = [h for h in allH if orders[h] == oy]
    # a only needs to run over conjugacy class representatives: composing a
    # candidate isomorphism with an inner automorphism of H is still one
    gensH = [H.gen(i) for i in range(H.n)]
    seen = set()
    a_cands = []
    for h in allH:
        if orders[h] != ox or h in seen:
            continue
        a_cands.append(h)
        orbit = {h}
        stack = [h]
        while stack:
            g = stack.pop()
            for t in gensH:
                c2 = H.conj_elem(g, t)
                if c2 not in orbit:
                    orbit.add(c2)
                    stack.append(c2)
        seen |= orbit
    for a in a_cands:
        span_a = Subgroup.closure(H, fratH.basis_list() + [a])
        # b only needs to run over orbits under conjugation by the
        # centralizer of a: those inner automorphisms fix a
        cz = centralizer_basis(H, a).basis_list()
        seen_b = set()
        for b in b_cands:
            if b in seen_b or span_a.contains(b):
                continue
            orbit = {b}
            stack = [b]
            while stack:
                g = stack.pop()
                for t in cz:
                    c2 = H.conj_elem(g, t)
                    if c2 not in orbit:
                        orbit.add(c2)
                        stack.append(c2)
            seen_b |= orbit
            if H.elem_order(H.comm(a, b)) != o_comm:
                continue
            if H.elem_order(H.mul(a, b)) != o_prod:
                continue
            if _check_candidate(H, words, cubes, conj, a, b):
                return "yes"
    return "no"


def automorphism_pairs(G: PcPresentation, max_found=32, check_budget=20000):
    """Generator-image pairs (a, b) of automorphisms x -> a, y -> b of G.

    The search runs over conjugacy class representatives for a and orbit
    representatives under the centralizer of a for b (composition with inner
    automorphisms changes neither the outer class nor the induced action on
    central sections), stopping after max_found successes or check_budget
    full relation checks.  The designated pair itself is always included.

    With max_found=None and check_budget=None the search is exhaustive and
    the result contains a representative of every coset of the inner
    automorphism group, so the returned pairs generate the full induced
    action on any characteristic central section.
    """
    x, y, _, _ = find_designated_pair(G)
    words, cubes, conj = relation_table(G, x, y)
    ox, oy = G.elem_order(x), G.elem_order(y)
    o_comm = G.elem_order(G.comm(x, y))
    o_prod = G.elem_order(G.mul(x, y))
    frat = frattini_subgroup(G)
    allg = [h for h in Subgroup.full(G).elements() if not frat.contains(h)]
    orders = {h: G.elem_order(h) for h in allg}
    b_cands = [h for h in allg if orders[h] == oy]
    gens = [G.gen(i) for i in range(G.n)]
    found = [(x, y)]
    checks = 0
    seen_a = set()
    for a in allg:
        if orders[a] != ox or a in seen_a:
            continue
        orbit = {a}
        stack = [a]
        while stack:
            g = stack.pop()
            for t in gens:
                c2 = G.conj_elem(g, t)
                if c2 not in orbit:
                    orbit.add(c2)
                    stack.append(c2)
        seen_a |= orbit
        span_a = Subgroup.closure(G, frat.basis_list() + [a])
        cz = centralizer_basis(G, a).basis_list()
        seen_b = set()
        for b in b_cands:
            if b in seen_b or span_a.contains(b):
                continue
            orb = {b}
            stack = [b]
            while stack:
                g = stack.pop()
                for t in cz:
                    c2 = G.conj_elem(g, t)
                    if c2 not in orb:
                        orb.add(c2)
                        stack.append(c2)
            seen_b |= orb
            if G.elem_order(G.comm(a, b)) != o_comm:
                continue
            if G.elem_order(G.mul(a, b)) != o_prod:
                continue
            checks += 1
            if _check_candidate(G, words, cubes, conj, a, b):
                if (a, b) != (x, y):
                    found.append((a, b))
                    if max_found is not None and len(found) >= max_found:
                        return found
            if check_budget is not None and checks >= check_budget:
                return found
    return found


def has_gi_automorphism(G: PcPresentation, cap=GI_CAP) -> str:
    """'yes' iff some automorphism inverts both designated generators modulo
    the derived subgroup (x -> x^-1 d_1, y -> y^-1 d_2 with d_i in G')."""
    x, y, _, Gp = find_designated_pair(G)
    if Gp.order() ** 2 > cap:
        return "unknown"
    words, cubes, conj = relation_table(G, x, y)
    xin = G.inv(x)
    yin = G.inv(y)
    dps = Gp.elements()
    for d1 in dps:
        a = G.mul(xin, d1)
        for d2 in dps:
            b = G.mul(yin, d2)
            if _check_candidate(G, words, cubes, conj, a, b):
                return "yes"
    return "no"
