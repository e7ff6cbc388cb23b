"""The p-group generation primitives: covering groups, nuclei, immediate
descendants, and parent / p-parent extraction.

The p-covering group of a consistent presentation is built by the tails
method: every relation that is not the definition of a generator receives a
new central trailing generator of order p.  Collecting the standard overlap
tests in the tailed presentation yields linear relations among the tails
over GF(p); quotienting by their span leaves a consistent presentation of
the cover, with the surviving tails spanning the p-multiplicator.  The
nucleus is the last nontrivial term P_c of the lower exponent-p central
series of the cover, for c the p-class of the original group, and immediate
step-size-s descendants are the quotients of the cover by the allowable
subgroups: subspaces U of the multiplicator of codimension s that together
with the nucleus fill the multiplicator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .artin import artin_pattern, find_designated_pair
from .errors import (
    BadParameters,
    CapExceeded,
    NotTwoGenerated,
    StepTooLarge,
    WrongAbelianization,
)
from .iso import are_isomorphic, automorphism_pairs, fingerprint
from .pc import PcPresentation
from .series import (
    abelianization_type,
    frattini_subgroup,
    lower_central_series,
    lower_p_central_series,
)
from .subgroups import Subgroup, quotient

COVER_CAP = 3 ** 9


# -- definition sets ----------------------------------------------------------

def definition_assignment(G: PcPresentation):
    """Maps each non-free generator to the relation key defining it.

    Keys are ('pow', i) for the power relation g_i^p and ('conj', j, i) with
    j > i for the conjugate relation g_j^{g_i}.  Uses the presentation's
    recorded definitions when present; otherwise assigns greedily: a relation
    among already-defined generators whose right-hand side mentions exactly
    one undefined generator, with exponent 1, defines it.
    """
    if G.definitions:
        out = {}
        for k, d in G.definitions.items():
            if d[0] == "pow":
                out[k] = ("pow", d[1])
            else:
                j, i = d[1], d[2]
                if j < i:
                    j, i = i, j
                out[k] = ("conj", j, i)
        return out
    frat = frattini_subgroup(G)
    defined = set(range(G.n)) - set(frat.leading_indices())
    if not 1 <= len(defined) <= 2:
        raise BadParameters(
            f"definition assignment expects 1 or 2 free generators, found {len(defined)}")
    out = {}
    rels = [("pow", i) for i in range(G.n)]
    rels += [("conj", j, i) for (j, i) in sorted(G.conj)]
    used = set()
    changed = True
    while changed and len(defined) < G.n:
        changed = False
        for key in rels:
            if key in used:
                continue
            if key[0] == "pow":
                i = key[1]
                if i not in defined:
                    continue
                word = G.powers.get(i, [])
            else:
                j, i = key[1], key[2]
                if j not in defined or i not in defined:
                    continue
                # the new generator appears in the conjugate image of g_j
                word = [(a, e) for a, e in G.conj[(j, i)] if (a, e) != (j, 1)]
            new = [(a, e) for a, e in word if a not in defined]
            if len(new) != 1 or new[0][1] != 1:
                continue
            defined.add(new[0][0])
            out[new[0][0]] = key
            used.add(key)
            changed = True
    if len(defined) != G.n:
        missing = [G.names[k] for k in range(G.n) if k not in defined]
        raise BadParameters(f"no defining relation found for {missing}")
    return out


def definition_relations(G: PcPresentation):
    """The set of relation keys that define generators."""
    return set(definition_assignment(G).values())


# -- the covering group -------------------------------------------------------

@dataclass
class PCoverResult:
    group: PcPresentation          # the original G
    cover: PcPresentation          # consistent presentation of G*
    multiplicator: Subgroup        # central elementary abelian tail span
    nucleus: Subgroup              # P_c(G*), c = cl_p(G)
    nuclear_rank: int
    def_map: dict = field(default_factory=dict)    # gen -> defining relation key
    tail_expr: dict = field(default_factory=dict)  # relation key -> tail word

    def project(self, g):
        """Image in G of a cover element (tail coordinates dropped)."""
        return tuple(g[:self.group.n])


def _rref_gf(rows, p):
    """Row-reduce over GF(p); returns (reduced rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    rank = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    return rows[:rank], pivots


def _build_tailed(G, def_keys, tail_expr):
    """Presentation of G with one tail word appended to each non-definition
    relation; tail_expr maps relation keys to words over the m tail slots."""
    n = G.n
    width = 0
    for w in tail_expr.values():
        for i, _ in w:
            width = max(width, i + 1)
    names = list(G.names) + [f"t{r}" for r in range(width)]
    powers = {}
    conjugates = {}
    for i in range(n):
        w = list(G.powers.get(i, []))
        key = ("pow", i)
        if key not in def_keys:
            w = w + [(n + a, e) for a, e in tail_expr[key]]
        if w:
            powers[i] = w
    pairs = set(G.conj) | {k[1:] for k in tail_expr if k[0] == "conj"}
    for (j, i) in sorted(pairs):
        w = list(G.conj.get((j, i), [(j, 1)]))
        key = ("conj", j, i)
        if key not in def_keys:
            w = w + [(n + a, e) for a, e in tail_expr[key]]
        conjugates[(j, i)] = w
    return PcPresentation(G.p, names, [G.p] * (n + width), powers, conjugates,
                          strict=True)


def p_cover(G: PcPresentation, cap=COVER_CAP) -> PCoverResult:
    """The p-covering group of G, presented with the multiplicator as the
    trailing central elementary abelian block."""
    if G.order() > cap:
        raise CapExceeded(f"group order {G.order()} exceeds the cover cap {cap}")
    p = G.p
    n = G.n
    def_map = definition_assignment(G)
    def_keys = set(def_map.values())
    rel_keys = [("pow", i) for i in range(n)]
    rel_keys += [("conj", j, i) for j in range(1, n) for i in range(j)]
    rel_keys = [k for k in rel_keys if k not in def_keys]
    # start with one fresh tail slot per non-definition relation
    tail_expr = {k: [(r, 1)] for r, k in enumerate(rel_keys)}
    m = len(rel_keys)
    while True:
        cand = _build_tailed(G, def_keys, tail_expr)
        fails = cand.consistency_failures()
        if not fails:
            break
        rows = []
        for _, lhs, rhs in fails:
            assert lhs[:n] == rhs[:n], \
                "overlap failure does not lie in the tail subspace"
            rows.append([(a - b) % p for a, b in zip(lhs[n:], rhs[n:])])
        reduced, pivots = _rref_gf(rows, p)
        # express pivot slots in terms of the kept (non-pivot) slots
        width = len(cand.names) - n
        kept = [c for c in range(width) if c not in pivots]
        remap = {c: [(kept.index(c), 1)] for c in kept}
        for row, piv in zip(reduced, pivots):
            remap[piv] = [(kept.index(c), (-row[c]) % p)
                          for c in kept if row[c] % p]
        new_expr = {}
        for key, w in tail_expr.items():
            acc = [0] * len(kept)
            for slot, e in w:
                for t, c in remap[slot]:
                    acc[t] = (acc[t] + e * c) % p
            new_expr[key] = [(t, c) for t, c in enumerate(acc) if c]
        tail_expr = new_expr
    cover = cand
    cover.require_consistent()
    width = cover.n - n
    if G.designated is not None:
        cover.designated = tuple(tuple(d) + (0,) * width for d in G.designated)
    cover.definitions = dict(G.definitions)
    cover.meta["base"] = G
    mult = Subgroup(cover, {n + t: cover.gen(n + t) for t in range(width)})
    cp = lower_p_central_series(G).length()
    terms = lower_p_central_series(cover).terms
    nucleus = terms[cp] if len(terms) > cp else Subgroup.trivial(cover)
    assert nucleus.is_subgroup_of(mult), "nucleus not inside the multiplicator"
    return PCoverResult(group=G, cover=cover, multiplicator=mult,
                        nucleus=nucleus, nuclear_rank=nucleus.order_exponent(),
                        def_map=def_map, tail_expr=tail_expr)


# -- automorphism action on the multiplicator ---------------------------------

def _resolve_generator_images(res: PCoverResult, xy, a, b):
    """Canonical cover images of all original generators under the
    automorphism of G sending the designated pair to (a, b).

    The two free generators get (arbitrary) lifts of their images; every
    defined generator is then resolved through its defining relation in the
    cover, which makes the induced action on the central tail block
    independent of the lift choice.
    """
    from .iso import pcgs_with_words, slp_eval, _express
    G, cover = res.group, res.cover
    n = G.n
    p = G.p

    def pad(g):
        return tuple(g) + (0,) * (cover.n - n)

    free = [k for k in range(n) if k not in res.def_map]
    x, y = xy
    bw = pcgs_with_words(G, x, y)
    elems = [e for e, _ in bw]
    words = [w for _, w in bw]
    memo = {}
    img = {}
    for f in free:
        coeffs = _express(G, elems, G.gen(f))
        v = G.identity
        for l, cf in enumerate(coeffs):
            if cf:
                v = G.mul(v, G.pow(slp_eval(words[l], G, a, b, memo), cf))
        img[f] = pad(v)

    pending = dict(res.def_map)
    while pending:
        progressed = False
        for k, key in list(pending.items()):
            if key[0] == "pow":
                j = key[1]
                if j not in img:
                    continue
                word = cover.powers.get(j, [])
                lhs = cover.pow(img[j], p)
            else:
                j, i = key[1], key[2]
                if j not in img or i not in img:
                    continue
                word = cover.conj.get((j, i), [(j, 1)])
                lhs = cover.conj_elem(img[j], img[i])
            if any(aa != k and aa not in img for aa, _ in word):
                continue
            pos = next(m for m, (aa, _) in enumerate(word) if aa == k)
            assert word[pos][1] == 1, "defining relation with exponent != 1"
            pre = cover.identity
            for aa, ee in word[:pos]:
                pre = cover.mul(pre, cover.pow(img[aa], ee))
            suf = cover.identity
            for aa, ee in word[pos + 1:]:
                suf = cover.mul(suf, cover.pow(img[aa], ee))
            img[k] = cover.mul(cover.inv(pre), cover.mul(lhs, cover.inv(suf)))
            del pending[k]
            progressed = True
        if not progressed:
            raise BadParameters("definition resolution does not make progress")
    return img


def multiplicator_action(res: PCoverResult, pairs):
    """GF(p) matrices of the action on the tail block induced by the
    automorphisms given as designated-pair images; duplicates dropped."""
    G, cover = res.group, res.cover
    n = G.n
    p = G.p
    width = cover.n - n
    xg, yg, _, _ = find_designated_pair(G)
    mats = []
    seen = set()
    for a, b in pairs:
        img = _resolve_generator_images(res, (xg, yg), a, b)
        rows_e = []
        rows_d = []
        for key, expr in res.tail_expr.items():
            if key[0] == "pow":
                i = key[1]
                word = cover.powers.get(i, [])
                lhs = cover.pow(img[i], p)
            else:
                j, i = key[1], key[2]
                word = cover.conj.get((j, i), [(j, 1)])
                lhs = cover.conj_elem(img[j], img[i])
            rhs = cover.identity
            for aa, ee in word:
                if aa < n:
                    rhs = cover.mul(rhs, cover.pow(img[aa], ee))
            d = cover.mul(cover.inv(rhs), lhs)
            assert all(v == 0 for v in d[:n]), \
                "tail image does not lie in the tail block"
            ev = [0] * width
            for t, cf in expr:
                ev[t] = cf
            rows_e.append(ev)
            rows_d.append(list(d[n:]))
        aug = [e + dd for e, dd in zip(rows_e, rows_d)]
        red, pivots = _rref_gf(aug, p)
        assert len(pivots) == width and all(c < width for c in pivots), \
            "tail action underdetermined or inconsistent"
        T = [None] * width
        for row, piv in zip(red, pivots):
            T[piv] = tuple(v % p for v in row[width:])
        T = tuple(T)
        if T not in seen:
            seen.add(T)
            mats.append(T)
    return mats


def _apply_mat(rows, T, p):
    out = []
    for row in rows:
        acc = [0] * len(T[0]) if T else []
        for t, cf in enumerate(row):
            if cf:
                for c, v in enumerate(T[t]):
                    acc[c] = (acc[c] + cf * v) % p
        out.append(acc)
    red, _ = _rref_gf(out, p)
    return red


def _canon(rows):
    return tuple(tuple(r) for r in rows)


# -- descendants --------------------------------------------------------------

@dataclass
class DescendantSet:
    parent: PcPresentation
    step_size: int
    dedup_mode: str                        # "iso" | "fingerprint"
    members: list = field(default_factory=list)   # (pres, pattern|None, fingerprint)
    total_enumerated: int = 0


def _echelon_subspaces(width, dim, p):
    """All reduced-echelon bases of dim-dimensional subspaces of GF(p)^width,
    in lexicographic order of (pivot columns, free entries)."""
    for pivots in combinations(range(width), dim):
        free_pos = []
        for r, pc in enumerate(pivots):
            for c in range(pc + 1, width):
                if c not in pivots:
                    free_pos.append((r, c))
        for vals in product(range(p), repeat=len(free_pos)):
            rows = [[0] * width for _ in range(dim)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(free_pos, vals):
                rows[r][c] = v
            yield rows


def immediate_descendants(G: PcPresentation, s: int, cap=COVER_CAP,
                          dedup="auto", cover_result=None, use_aut=True,
                          max_autos=32, check_budget=20000,
                          histogram_cap=None, iso_cap=None,
                          aut_pairs=None) -> DescendantSet:
    """Quotients of the p-cover by the allowable subgroups of codimension s
    in the multiplicator, deduplicated up to isomorphism.

    Allowable subgroups are first partitioned into orbits under the
    multiplicator action of a harvested set of automorphisms of G (quotients
    by subgroups in one orbit are isomorphic); one representative per orbit
    is then kept and the representatives are deduplicated by brute-force
    isomorphism (dedup='iso', default up to order 3^7) or by fingerprint
    ('fingerprint'), so an incomplete harvest costs time, not correctness.

    With dedup='orbits' (requires max_autos=None and check_budget=None, i.e.
    an exhaustive automorphism harvest) the orbit partition itself is exact:
    two allowable subgroups yield isomorphic quotients precisely when some
    automorphism of G maps one onto the other, so orbit representatives are
    pairwise non-isomorphic and no further comparison is done.
    """
    res = cover_result if cover_result is not None else p_cover(G, cap=cap)
    if s < 1 or s > res.nuclear_rank:
        raise StepTooLarge(
            f"step size {s} exceeds the nuclear rank {res.nuclear_rank}")
    if G.order() * G.p ** s > cap:
        raise CapExceeded("descendant order would exceed the cap")
    if dedup == "auto":
        limit = 3 ** 7 if iso_cap is None else iso_cap
        dedup = "iso" if G.order() * G.p ** s <= limit else "fingerprint"
    if dedup == "orbits" and aut_pairs is None and (
            max_autos is not None or check_budget is not None or not use_aut):
        raise BadParameters("dedup='orbits' needs an exhaustive harvest "
                            "(use_aut=True, max_autos=None, check_budget=None, "
                            "or precomputed aut_pairs)")
    cover = res.cover
    n = G.n
    p = G.p
    width = cover.n - n
    nuc_rows = [[b[n + t] for t in range(width)]
                for b in res.nucleus.basis_list()]
    out = DescendantSet(parent=G, step_size=s, dedup_mode=dedup)
    allowable = []
    for rows in _echelon_subspaces(width, width - s, p):
        red, _ = _rref_gf(rows + nuc_rows, p)
        if len(red) == width:       # U + nucleus must fill the multiplicator
            allowable.append(rows)
    out.total_enumerated = len(allowable)
    mats = []
    if use_aut and allowable:
        pairs = aut_pairs
        if pairs is None:
            try:
                pairs = automorphism_pairs(G, max_found=max_autos,
                                           check_budget=check_budget)
            except (NotTwoGenerated, WrongAbelianization):
                if dedup == "orbits":
                    raise
                pairs = []  # no designated-pair frame; fall back to dedup only
        if pairs:
            # distinct automorphisms often induce the same matrix on the
            # multiplicator; keep one copy of each non-identity matrix
            seen = set()
            for T in multiplicator_action(res, pairs):
                key = tuple(tuple(row) for row in T)
                if key in seen:
                    continue
                seen.add(key)
                if any(row != tuple(int(c == t) for c in range(width))
                       for t, row in enumerate(T)):
                    mats.append(T)
    orbit_reps = []
    visited = set()
    for rows in allowable:
        cn = _canon(rows)
        if cn in visited:
            continue
        orbit = {cn}
        stack = [cn]
        while stack:
            cur = stack.pop()
            for T in mats:
                nxt = _canon(_apply_mat([list(r) for r in cur], T, p))
                if nxt not in orbit:
                    orbit.add(nxt)
                    stack.append(nxt)
        visited |= orbit
        orbit_reps.append(rows)
    reps = []          # (pres, pattern, fingerprint), in discovery order
    recent = []        # rep indices, most recently matched first
    for rows in orbit_reps:
        basis = {}
        for row in rows:
            lead = next(c for c, v in enumerate(row) if v)
            vec = [0] * cover.n
            for c, v in enumerate(row):
                vec[n + c] = v
            basis[n + lead] = tuple(vec)
        D = quotient(cover, Subgroup(cover, basis)).quotient
        fp = (fingerprint(D) if histogram_cap is None
              else fingerprint(D, histogram_cap=histogram_cap))
        dup = False
        for ri in recent if dedup != "orbits" else ():
            rp, _, rfp = reps[ri]
            if rfp != fp:
                continue
            if dedup == "fingerprint":
                same = True
            else:
                v = (are_isomorphic(rp, D) if iso_cap is None
                     else are_isomorphic(rp, D, search_cap=iso_cap))
                same = v != "no"    # 'unknown' merges, like fingerprint mode
            if same:
                dup = True
                recent.remove(ri)
                recent.insert(0, ri)
                break
        if dup:
            continue
        try:
            pat = artin_pattern(D)
        except Exception:
            pat = None
        recent.insert(0, len(reps))
        reps.append((D, pat, fp))
    out.members = reps
    return out


# -- parents ------------------------------------------------------------------

def parent(G: PcPresentation) -> PcPresentation:
    """G modulo the last nontrivial term of its lower central series."""
    terms = lower_central_series(G).terms
    if len(terms) < 3:
        raise BadParameters("parent of a group of class <= 1 is trivial")
    return quotient(G, terms[-2]).quotient


def p_parent(G: PcPresentation) -> PcPresentation:
    """G modulo P_{c-1}(G) for c the p-class of G."""
    terms = lower_p_central_series(G).terms
    if len(terms) < 3:
        raise BadParameters("p-parent of a group of p-class <= 1 is trivial")
    return quotient(G, terms[-2]).quotient


def propagation_kind(child: PcPresentation, par: PcPresentation) -> str:
    """'endo' when the commutator quotient is unchanged along the link."""
    return "endo" if abelianization_type(child) == abelianization_type(par) \
        else "exo"
