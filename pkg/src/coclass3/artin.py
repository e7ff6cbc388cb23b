"""Maximal subgroups, transfer homomorphisms, and transfer-kernel types.

For a two-generated 3-group G with commutator quotient C_{3^e} x C_3 the
four maximal subgroups are H_1 >= <x>G', H_2 >= <xy>G', H_3 >= <xy^2>G' (all
with cyclic H_i/G') and the punctured fourth component H_4 >= <x^3, y>G'
(with bicyclic H_4/G').  The transfer Ver: G -> H/H' of each index-3
subgroup is evaluated by the coset-product formula, and its kernel inside
G/G' is encoded as

    0 = <w, y>G'/G',  j = <w^{j-1} y>G'/G' (j = 1..3),  4 = <w>G'/G',

where w = x^{3^(e-1)} is the distinguished third-power generator.  The four
kernel codes form the kappa vector; together with the logarithmic abelian
quotient invariants alpha of the H_i they make up the pattern of the group.

Kappa vectors are compared through a canonical form: the lexicographic
minimum over permutations of the first three components combined with the
relabelings of the values {1,2,3} induced by replacing y with w^a y^b
(which act as the affine maps z -> b z - a on value-1 encodings z = j - 1);
the codes 0 and 4 are fixed by all relabelings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .errors import (
    NotTwoGenerated,
    UncodedKernel,
    WrongAbelianization,
)
from .pc import PcPresentation
from .series import derived_subgroup
from .subgroups import Subgroup, quotient


def find_designated_pair(G: PcPresentation):
    """A pair (x, y) with G/G' = <xG'> x <yG'> of type (3^e, 3), e >= 2.

    Uses the presentation's designated pair when present and valid; otherwise
    searches the abelianization.  Returns (x, y, e, derived subgroup).
    """
    Gp = derived_subgroup(G)
    qm = quotient(G, Gp)
    A = qm.quotient
    at = Subgroup.full(A).abelian_type()
    if len(at) != 2 or at[1] != 3 or at[0] < 9:
        if len(at) > 2:
            raise NotTwoGenerated(f"commutator quotient has rank {len(at)}")
        raise WrongAbelianization(
            f"commutator quotient type {at} is not (3^e, 3) with e >= 2")
    e = 0
    m = at[0]
    while m > 1:
        m //= 3
        e += 1
    if G.designated is not None:
        x, y = G.designated
        u, v = qm.project(x), qm.project(y)
        if (A.elem_order(u) == 3 ** e and A.elem_order(v) == 3
                and not Subgroup.closure(A, [u]).contains(v)):
            return x, y, e, Gp
    # search the (small) abelianization directly
    u = None
    for g in Subgroup.full(A).elements():
        if A.elem_order(g) == 3 ** e:
            u = g
            break
    cyc = Subgroup.closure(A, [u])
    v = None
    for g in Subgroup.full(A).elements():
        if A.elem_order(g) == 3 and not cyc.contains(g):
            v = g
            break
    if v is None:
        raise WrongAbelianization("no complementary order-3 generator found")
    return qm.lift(u), qm.lift(v), e, Gp


@dataclass
class MaximalSubgroupFrame:
    pres: PcPresentation
    x: tuple
    y: tuple
    e: int
    w: tuple                      # x^{3^(e-1)}, the coded third-power generator
    derived: Subgroup             # G'
    subgroups: list = field(default_factory=list)       # H_1..H_4
    transversals: list = field(default_factory=list)    # 3 coset reps per H_i
    derived_of: list = field(default_factory=list)      # H_1'..H_4'

    @property
    def puncture_index(self):
        return 4


def maximal_subgroups(G: PcPresentation) -> MaximalSubgroupFrame:
    x, y, e, Gp = find_designated_pair(G)
    w = G.pow(x, 3 ** (e - 1))
    frame = MaximalSubgroupFrame(G, x, y, e, w, Gp)
    gbase = Gp.basis_list()
    y2 = G.mul(y, y)
    seeds = [
        ([x], y),                              # H_1 = <x>G', transversal gen y
        ([G.mul(x, y)], y),                    # H_2 = <xy>G'
        ([G.mul(x, y2)], y),                   # H_3 = <xy^2>G'
        ([G.pow(x, 3), y], x),                 # H_4 = <x^3, y>G', transversal x
    ]
    allg = [G.gen(i) for i in range(G.n)]
    for gens, t in seeds:
        H = Subgroup.closure(G, gbase + gens, conjugators=allg)
        assert H.order_exponent() == G.order_exponent() - 1, \
            "maximal subgroup does not have index 3"
        frame.subgroups.append(H)
        frame.transversals.append((G.identity, t, G.mul(t, t)))
        hb = H.basis_list()
        comms = [G.comm(a, b) for i, a in enumerate(hb) for b in hb[i + 1:]]
        frame.derived_of.append(Subgroup.closure(G, comms, conjugators=hb))
    return frame


def abelian_invariants(H: Subgroup):
    """Logarithmic type of H/H' as a descending partition (AQI)."""
    pres = H.pres
    hb = H.basis_list()
    comms = [pres.comm(a, b) for i, a in enumerate(hb) for b in hb[i + 1:]]
    Hp = Subgroup.closure(pres, comms, conjugators=hb)
    ranks = []
    k = 1
    prev = H.order_exponent()
    while True:
        Uk = Subgroup.closure(
            pres, Hp.basis_list() + [pres.pow(b, 3 ** k) for b in hb],
            conjugators=hb)
        cur = Uk.order_exponent()
        ranks.append(prev - cur)
        if cur == Hp.order_exponent():
            break
        prev = cur
        k += 1
    typ = []
    for k, r in enumerate(ranks):
        for idx in range(r):
            if idx >= len(typ):
                typ.append(0)
            typ[idx] = k + 1
    return sorted(typ, reverse=True)


def _transfer_raw(G, H: Subgroup, reps, g):
    """Coset-product transfer value of g into H (unreduced element of H)."""
    inv_reps = [G.inv(r) for r in reps]
    val = G.identity
    for r in reps:
        u = G.mul(r, g)
        for rj in inv_reps:
            h = G.mul(u, rj)
            if H.contains(h):
                val = G.mul(val, h)
                break
        else:
            raise AssertionError("transversal does not cover the group")
    return val


def artin_transfer(G: PcPresentation, frame: MaximalSubgroupFrame, i: int):
    """The transfer into H_i as a table on all cosets of G/G'.

    Returns a dict {(a, b): value} where (a, b) ranges over the exponents of
    x^a y^b modulo G' and value is the canonical representative of the
    transfer image modulo H_i'.
    """
    H = frame.subgroups[i - 1]
    Hp = frame.derived_of[i - 1]
    reps = frame.transversals[i - 1]
    table = {}
    for a in range(3 ** frame.e):
        xa = G.pow(frame.x, a)
        for b in range(3):
            g = G.mul(xa, G.pow(frame.y, b))
            table[(a, b)] = Hp.coset_rep(_transfer_raw(G, H, reps, g))
    return table


def transfer_kernel_code(G: PcPresentation, i: int,
                         frame: MaximalSubgroupFrame) -> int:
    """Kernel code of the transfer into H_i, in {0, 1, 2, 3, 4}."""
    H = frame.subgroups[i - 1]
    Hp = frame.derived_of[i - 1]
    reps = frame.transversals[i - 1]

    def t(g):
        return Hp.coset_rep(_transfer_raw(G, H, reps, g))

    # kernel order from the image order: |ker| = |G/G'| / (|<H', T(x), T(y)>| / |H'|)
    tx = _transfer_raw(G, H, reps, frame.x)
    ty_raw = _transfer_raw(G, H, reps, frame.y)
    img = Subgroup.closure(G, Hp.basis_list() + [tx, ty_raw],
                           conjugators=H.basis_list())
    image_exp = img.order_exponent() - Hp.order_exponent()
    ker_exp = (frame.e + 1) - image_exp

    tw = t(frame.w)
    ty = Hp.coset_rep(ty_raw)
    one = G.identity
    if ker_exp == 2:
        if tw == one and ty == one:
            return 0
    elif ker_exp == 1:
        for j in (1, 2, 3):
            g = G.mul(G.pow(frame.w, j - 1), frame.y)
            if t(g) == one:
                return j
        if tw == one:
            return 4
    raise UncodedKernel(
        f"kernel of transfer {i} (order 3^{ker_exp}) matches no coded subgroup")


# -- kappa canonicalization and type classification --------------------------

def _value_map(alpha, beta):
    """Relabeling of {1,2,3} induced by y -> w^alpha y^beta; 0 and 4 fixed."""
    m = {0: 0, 4: 4}
    for j in (1, 2, 3):
        m[j] = ((beta * (j - 1) - alpha) % 3) + 1
    return m


def canonicalize_kappa(kappa):
    """Lexicographically minimal equivalent form of a 4-component kappa."""
    kappa = tuple(kappa)
    best = None
    for alpha in range(3):
        for beta in (1, 2):
            vm = _value_map(alpha, beta)
            mapped = tuple(vm[k] for k in kappa)
            for perm in permutations(range(3)):
                cand = tuple(mapped[p] for p in perm) + (mapped[3],)
                if best is None or cand < best:
                    best = cand
    return best


# kappa forms from the figure legends, compared through canonicalization
NAMED_TYPE_TABLE = {
    "a.1": (0, 0, 0, 0),
    "b.3": (0, 0, 1, 0),
    "b.16": (0, 0, 4, 0),
    "d.10": (1, 1, 0, 2),
    "D.10": (1, 1, 4, 2),
    "B.2": (1, 1, 1, 2),
    "C.4": (1, 1, 2, 2),
    "D.5": (1, 1, 3, 2),
}
_CANON_TO_NAME = {canonicalize_kappa(v): k for k, v in NAMED_TYPE_TABLE.items()}


def classify_type(kappa) -> str:
    return _CANON_TO_NAME.get(canonicalize_kappa(kappa), "unknown")


@dataclass
class ArtinPattern:
    alpha: list                 # four logarithmic type partitions
    kappa: tuple                # four kernel codes, frame order
    rho: tuple                  # four ranks
    kappa_canonical: tuple
    named_type: str

    def kappa_string(self):
        k = self.kappa_canonical
        return f"({k[0]}{k[1]}{k[2]};{k[3]})"


def artin_pattern(G: PcPresentation,
                  frame: MaximalSubgroupFrame | None = None) -> ArtinPattern:
    if frame is None:
        frame = maximal_subgroups(G)
    alpha = [abelian_invariants(H) for H in frame.subgroups]
    kappa = tuple(transfer_kernel_code(G, i, frame) for i in (1, 2, 3, 4))
    rho = tuple(len(a) for a in alpha)
    canon = canonicalize_kappa(kappa)
    return ArtinPattern(alpha=alpha, kappa=kappa, rho=rho,
                        kappa_canonical=canon,
                        named_type=_CANON_TO_NAME.get(canon, "unknown"))
