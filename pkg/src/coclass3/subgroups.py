"""Subgroups, quotients and centralizers of groups given by weighted
presentations in which every generator has relative order p.

A subgroup is stored as an echelon basis: a dict mapping a leading generator
index to a subgroup element whose first nonzero exponent sits at that index
and equals 1.  Sifting an element through the basis (left-dividing away the
leading coordinate at each step) strictly increases the leading index, so it
terminates in at most n steps; an element belongs to the subgroup iff it
sifts to the identity.

The chain subgroups G_m = <g_m, ..., g_{n-1}> of a strict weighted
presentation form a central series with layers of order p.  That makes the
leading-coordinate maps homomorphisms on each layer, which is what the
canonical coset representatives and the layered centralizer computation rely
on.
"""

from __future__ import annotations

from itertools import product

from .errors import BadParameters, NotNormal
from .pc import PcPresentation


def _require_refined(pres):
    if any(o != pres.p for o in pres.orders):
        raise BadParameters(
            "subgroup machinery needs a refined presentation in which every "
            "generator has relative order %d" % pres.p)


def _leading(g):
    for i, e in enumerate(g):
        if e:
            return i
    return None


class Subgroup:
    def __init__(self, pres: PcPresentation, basis: dict):
        self.pres = pres
        self.basis = dict(basis)

    # -- construction --------------------------------------------------------

    @classmethod
    def trivial(cls, pres):
        return cls(pres, {})

    @classmethod
    def full(cls, pres):
        _require_refined(pres)
        return cls(pres, {i: pres.gen(i) for i in range(pres.n)})

    @classmethod
    def closure(cls, pres, generators, conjugators=None):
        """Subgroup generated by `generators`; if `conjugators` is given, the
        smallest subgroup containing the generators that is invariant under
        conjugation by those elements (normal closure when they generate)."""
        _require_refined(pres)
        self = cls(pres, {})
        p = pres.p
        work = list(generators)
        while work:
            g = work.pop()
            g = self.sift(g)
            if g == pres.identity:
                continue
            lead = _leading(g)
            # normalize the leading exponent to 1
            e = g[lead]
            if e != 1:
                # e is invertible mod p; g^(e^-1 mod p) has leading exponent 1
                g = pres.pow(g, pow(e, -1, p))
            self.basis[lead] = g
            work.append(pres.pow(g, p))
            for h in self.basis.values():
                if h != g:
                    work.append(pres.comm(g, h))
            if conjugators:
                for t in conjugators:
                    work.append(pres.conj_elem(g, t))
        return self

    # -- membership and size -------------------------------------------------

    def sift(self, g):
        """Left-divide g through the basis; returns the residue (identity iff
        g is in the subgroup)."""
        pres = self.pres
        p = pres.p
        while True:
            lead = _leading(g)
            if lead is None:
                return g
            b = self.basis.get(lead)
            if b is None:
                return g
            g = pres.mul(pres.pow(b, p - g[lead]), g)

    def contains(self, g):
        return self.sift(g) == self.pres.identity

    def order_exponent(self):
        return len(self.basis)

    def order(self):
        return self.pres.p ** len(self.basis)

    def basis_list(self):
        return [self.basis[l] for l in sorted(self.basis)]

    def leading_indices(self):
        return sorted(self.basis)

    def elements(self):
        """All elements (use only for small subgroups)."""
        pres = self.pres
        p = pres.p
        bl = self.basis_list()
        out = []
        for expts in product(range(p), repeat=len(bl)):
            g = pres.identity
            for b, e in zip(bl, expts):
                if e:
                    g = pres.mul(g, pres.pow(b, e))
            out.append(g)
        return out

    def is_normal(self, conjugators=None):
        pres = self.pres
        if conjugators is None:
            conjugators = [pres.gen(i) for i in range(pres.n)]
        return all(self.contains(pres.conj_elem(b, t))
                   for b in self.basis.values() for t in conjugators)

    def is_subgroup_of(self, other):
        return all(other.contains(b) for b in self.basis.values())

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.pres is other.pres
                and sorted(self.basis) == sorted(other.basis)
                and all(other.contains(b) for b in self.basis.values()))

    def __hash__(self):
        return hash((id(self.pres), tuple(sorted(self.basis))))

    # -- cosets --------------------------------------------------------------

    def coset_rep(self, g):
        """Canonical representative of the coset (self)*g: the unique element
        of the coset whose exponents vanish at every leading index of the
        basis.  Requires the subgroup to be normal for the map to be
        multiplicative on the quotient, but is well-defined on right cosets
        regardless."""
        pres = self.pres
        p = pres.p
        for lead in sorted(self.basis):
            e = g[lead]
            if e:
                g = pres.mul(pres.pow(self.basis[lead], p - e), g)
        return g

    # -- derived data --------------------------------------------------------

    def power_subgroup(self, k=1):
        """The subgroup generated by p^k-th powers (of this abelian-or-not
        subgroup); closed under the subgroup's own conjugation."""
        pres = self.pres
        q = pres.p ** k
        return Subgroup.closure(pres, [pres.pow(b, q) for b in self.basis.values()],
                                conjugators=self.basis_list())

    def abelian_type(self, assume_abelian=True):
        """Invariant factor type [d_1 >= d_2 >= ...] (as powers of p) computed
        from the rank filtration of the iterated power subgroups."""
        pres = self.pres
        ranks = []
        current = self
        while current.order_exponent():
            nxt = current.power_subgroup()
            ranks.append(current.order_exponent() - nxt.order_exponent())
            current = nxt
        # ranks[k] = number of invariant factors of order > p^k
        typ = []
        for k, r in enumerate(ranks):
            for idx in range(r):
                if idx >= len(typ):
                    typ.append(0)
                typ[idx] = k + 1
        return sorted((pres.p ** t for t in typ), reverse=True)


# -- quotients ---------------------------------------------------------------

class QuotientMap:
    """Quotient presentation G/N with projection and a canonical lift."""

    def __init__(self, pres: PcPresentation, normal: Subgroup):
        if not normal.is_normal():
            raise NotNormal("quotient by a non-normal subgroup")
        self.parent = pres
        self.normal = normal
        leads = set(normal.basis)
        self.positions = [i for i in range(pres.n) if i not in leads]
        names = [pres.names[i] for i in self.positions]
        p = pres.p
        npos = {pos: m for m, pos in enumerate(self.positions)}

        def project_vec(g):
            r = normal.coset_rep(g)
            return tuple(r[pos] for pos in self.positions)

        powers = {}
        conjugates = {}
        for m, pos in enumerate(self.positions):
            w = project_vec(pres.pow(pres.gen(pos), p))
            pairs = [(k, e) for k, e in enumerate(w) if e]
            if pairs:
                powers[m] = pairs
        for m, pos in enumerate(self.positions):
            for l in range(m + 1, len(self.positions)):
                img = project_vec(pres.conj_elem(pres.gen(self.positions[l]),
                                                 pres.gen(pos)))
                pairs = [(k, e) for k, e in enumerate(img) if e]
                if pairs != [(l, 1)]:
                    conjugates[(l, m)] = pairs
        self.quotient = PcPresentation(p, names, [p] * len(names),
                                       powers, conjugates, strict=True)
        self._npos = npos
        if pres.designated is not None:
            self.quotient.designated = tuple(self.project(d)
                                             for d in pres.designated)
        self.quotient.meta["parent"] = pres
        self.quotient.meta["quotient_map"] = self

    def project(self, g):
        r = self.normal.coset_rep(g)
        return tuple(r[pos] for pos in self.positions)

    def lift(self, q):
        v = [0] * self.parent.n
        for m, e in enumerate(q):
            v[self.positions[m]] = e
        return tuple(v)


def quotient(pres, normal: Subgroup):
    return QuotientMap(pres, normal)


# -- centralizers and centre -------------------------------------------------

def centralizer_basis(pres: PcPresentation, z, within: Subgroup | None = None):
    """Echelon basis of the centralizer of z (inside `within`, default G).

    Works down the chain subgroups G_m: the map g -> (exponent at m of
    [g, z]) is a homomorphism K -> Z/p on each subgroup K with [K, z] <= G_m,
    so its kernel is obtained by linear elimination plus re-closure.
    """
    p = pres.p
    K = within if within is not None else Subgroup.full(pres)
    for m in range(pres.n):
        bl = K.basis_list()
        if not bl:
            break
        vals = [pres.comm(b, z)[m] for b in bl]
        # check the commutators really are in G_m by construction of the loop
        if all(v == 0 for v in vals):
            continue
        jpiv = next(j for j, v in enumerate(vals) if v)
        bj, vj = bl[jpiv], vals[jpiv]
        vj_inv = pow(vj, -1, p)
        gens = [pres.pow(bj, p)]
        for j, (b, v) in enumerate(zip(bl, vals)):
            if j != jpiv:
                gens.append(pres.mul(b, pres.pow(bj, (-v * vj_inv) % p)))
        for a in bl:
            for b in bl:
                if a != b:
                    gens.append(pres.comm(a, b))
        K = Subgroup.closure(pres, gens)
    return K


def centre(pres: PcPresentation) -> Subgroup:
    Z = Subgroup.full(pres)
    for i in range(pres.n):
        Z = centralizer_basis(pres, pres.gen(i), within=Z)
    return Z
