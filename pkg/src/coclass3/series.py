"""Central series, scalar invariants, and shock-wave classification.

The lower central series gamma_1 = G, gamma_i = [gamma_{i-1}, G] measures
the nilpotency class; the lower exponent-p central series P_0 = G,
P_i = P_{i-1}^p [P_{i-1}, G] measures the p-class.  Both are computed by
iterated normal closures of generator commutators (and p-th powers), which
suffices because every term is normal and the groups are finitely generated.

The "shock wave" classification compares the class of a vertex with the tree
coclass r: vertices of class < r sit behind the wave, = r on it, > r ahead
of it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadParameters, WrongAbelianization
from .pc import PcPresentation
from .subgroups import Subgroup, centre, quotient

centre = centre  # re-exported


@dataclass
class SeriesChain:
    kind: str                 # "lower-central" | "lower-p-central" | "derived"
    terms: list               # descending Subgroups, last is trivial

    def length(self):
        """Number of strictly descending steps before hitting trivial."""
        return len(self.terms) - 1


def _all_gens(G: PcPresentation):
    return [G.gen(i) for i in range(G.n)]


def derived_subgroup(G: PcPresentation) -> Subgroup:
    gens = _all_gens(G)
    comms = [G.comm(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
    return Subgroup.closure(G, comms, conjugators=gens)


def lower_central_series(G: PcPresentation) -> SeriesChain:
    gens = _all_gens(G)
    terms = [Subgroup.full(G)]
    while terms[-1].order_exponent():
        cur = terms[-1]
        comms = [G.comm(b, g) for b in cur.basis.values() for g in gens]
        nxt = Subgroup.closure(G, comms, conjugators=gens)
        if nxt.order_exponent() == cur.order_exponent():
            raise BadParameters("lower central series does not terminate "
                                "(group is not nilpotent?)")
        terms.append(nxt)
    return SeriesChain("lower-central", terms)


def lower_p_central_series(G: PcPresentation) -> SeriesChain:
    gens = _all_gens(G)
    terms = [Subgroup.full(G)]
    while terms[-1].order_exponent():
        cur = terms[-1]
        seeds = [G.pow(b, G.p) for b in cur.basis.values()]
        seeds += [G.comm(b, g) for b in cur.basis.values() for g in gens]
        nxt = Subgroup.closure(G, seeds, conjugators=gens)
        if nxt.order_exponent() == cur.order_exponent():
            raise BadParameters("lower p-central series does not terminate")
        terms.append(nxt)
    return SeriesChain("lower-p-central", terms)


def frattini_subgroup(G: PcPresentation) -> Subgroup:
    """Phi(G) = G^p [G, G] = P_1(G)."""
    gens = _all_gens(G)
    seeds = [G.pow(g, G.p) for g in gens]
    seeds += [G.comm(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
    return Subgroup.closure(G, seeds, conjugators=gens)


def abelianization_type(G: PcPresentation):
    """Invariant factors of G/G' as a descending list of integers."""
    Gp = derived_subgroup(G)
    q = quotient(G, Gp).quotient
    return Subgroup.full(q).abelian_type()


@dataclass
class ScalarInvariants:
    lo: int        # logarithmic order
    cl: int        # nilpotency class
    cl_p: int      # p-class
    cc: int        # coclass = lo - cl
    cc_p: int      # p-coclass = lo - cl_p


def scalar_invariants(G: PcPresentation) -> ScalarInvariants:
    lo = G.order_exponent()
    cl = lower_central_series(G).length() if lo else 0
    cl_p = lower_p_central_series(G).length() if lo else 0
    return ScalarInvariants(lo=lo, cl=cl, cl_p=cl_p, cc=lo - cl, cc_p=lo - cl_p)


def shock_wave_position(G: PcPresentation, e: int, r: int) -> str:
    """'Behind' if cl < r, 'On' if cl = r, 'Ahead' if cl > r.

    Requires commutator quotient C_{3^e} x C_3 and coclass r in {e, e+1}.
    """
    ab = abelianization_type(G)
    if ab != [3 ** e, 3]:
        raise WrongAbelianization(
            f"commutator quotient {ab} is not [3^{e}, 3]")
    if r not in (e, e + 1):
        raise BadParameters(f"coclass r={r} not in {{e, e+1}} for e={e}")
    cl = lower_central_series(G).length()
    if cl < r:
        return "Behind"
    if cl == r:
        return "On"
    return "Ahead"
