"""Coclass-tree assembly and verification.

Builds depth-1 pruned branches of the two studied coclass trees (CF with
commutator quotient C_{3^e} x C_3 and coclass e, BCF with the same quotient
and coclass e+1), verifies the recursive propagation laws for mainline,
offside, and BCF vertices, the bifurcation structure at the distinguished
mainline vertex of class = coclass, the two-periodicity of branches, the
class-2 parent chain, and the reachability of every desk-scale vertex from
the order-729 root by explicit descendant paths.

Matching of a computed quotient or descendant against a predicted family
member is by brute-force isomorphism for small orders and by fingerprint
equality (scalar invariants, Artin pattern data, centre type, and, where
affordable, element-order and cube-map histograms) above the search cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .artin import ArtinPattern, artin_pattern
from .errors import (
    AmbiguousSelector,
    BadParameters,
    CapExceeded,
    NoMatch,
    NotTwoGenerated,
    WrongAbelianization,
)
from .families import construct, parse_label
from .iso import are_isomorphic, automorphism_pairs, fingerprint
from .pc import PcPresentation
from .pcover import (
    immediate_descendants,
    p_cover,
    p_parent,
    parent,
    propagation_kind,
)
from .series import ScalarInvariants, scalar_invariants, shock_wave_position
from .subgroups import centre

SMALL_ISO_CAP = 3 ** 7      # brute-force isomorphism below, fingerprint above
HIST_CAP = 3 ** 8           # default histogram bound for fingerprint matching
EXEC_CAP = 3 ** 9           # default largest order constructed while walking


# -- cached family construction and fingerprints ------------------------------

@lru_cache(maxsize=None)
def _group(label_text: str) -> PcPresentation:
    return construct(parse_label(label_text))


@lru_cache(maxsize=None)
def _fp(label_text: str, hist_cap: int):
    return fingerprint(_group(label_text), histogram_cap=hist_cap)


def _match(D: PcPresentation, label_text: str, hist_cap=HIST_CAP,
           iso_cap=SMALL_ISO_CAP):
    """'iso' / 'fingerprint' / False comparing D against a family member."""
    H = _group(label_text)
    if D.order() != H.order():
        return False
    v = are_isomorphic(D, H, search_cap=iso_cap)
    if v == "yes":
        return "iso"
    if v == "no":
        return False
    # above hist_cap the histogram component is simply absent on both sides
    if fingerprint(D, histogram_cap=hist_cap) != _fp(label_text, hist_cap):
        return False
    return "fingerprint"


# -- vertices and branches ----------------------------------------------------

@dataclass
class TreeVertex:
    label: str
    group: PcPresentation
    invariants: ScalarInvariants
    pattern: ArtinPattern
    depth: int
    shock: str
    centre_type: tuple
    kind_token: str = ""
    n: int = 0

    def rho_sorted(self):
        r = self.pattern.rho
        return tuple(sorted(r[:3])) + (r[3],)

    def to_json_dict(self):
        return {
            "label": self.label,
            "order_exponent": self.invariants.lo,
            "class": self.invariants.cl,
            "p_class": self.invariants.cl_p,
            "coclass": self.invariants.cc,
            "type": self.pattern.named_type,
            "kappa": self.pattern.kappa_string(),
            "alpha": [list(a) for a in self.pattern.alpha],
            "rho": list(self.pattern.rho),
            "centre": list(self.centre_type),
            "depth": self.depth,
            "shock": self.shock,
        }


@dataclass
class Branch:
    tree: str                   # "CF" | "BCF"
    e: int
    index: int
    root: TreeVertex
    offside: list = field(default_factory=list)

    def vertices(self):
        return [self.root] + self.offside

    def cardinality(self):
        return 1 + len(self.offside)


# Offside constitution of the i-th branch: (kind token, n) in figure order.
_CF_ODD = [("b16", 0), ("a1twig", 0), ("a1bicyclic", 1), ("a1bicyclic", 2),
           ("b3", 1), ("a1cyclic", 1)]
_CF_EVEN = _CF_ODD + [("b3", 2), ("a1cyclic", 2)]
_BCF_ODD = [("D10", 1), ("B2", 1), ("C4", 1), ("D5", 1)]
_BCF_EVEN = [("D10", 1), ("D10", 2), ("B2", 1), ("B2", 2),
             ("C4", 1), ("C4", 2), ("D5", 1), ("D5", 2)]

_EXPECTED_TYPE = {"b16": "b.16", "a1twig": "a.1", "a1bicyclic": "a.1",
                  "b3": "b.3", "a1cyclic": "a.1",
                  "D10": "D.10", "B2": "B.2", "C4": "C.4", "D5": "D.5"}
_CYCLIC_CENTRE_KINDS = ("b3", "a1cyclic")
_BICYCLIC_CENTRE_KINDS = ("b16", "a1twig", "a1bicyclic")


def branch_constitution(tree: str, index: int):
    """(kind token, n) pairs of the offside vertices of the index-th branch."""
    if tree == "CF":
        return list(_CF_ODD if index % 2 == 1 else _CF_EVEN)
    if tree == "BCF":
        return list(_BCF_ODD if index % 2 == 1 else _BCF_EVEN)
    raise BadParameters(f"unknown tree {tree!r}")


def _offside_label(tree, e, c, kind, n):
    head = "V" if tree == "CF" else "VV"
    s = f"{head}[e={e},c={c},kind={kind}"
    if n:
        s += f",n={n}"
    return s + "]"


def _mainline_label(tree, e, c):
    return f"{'M' if tree == 'CF' else 'MM'}[e={e},c={c}]"


def make_vertex(label_text: str, depth: int, kind_token="", n=0) -> TreeVertex:
    G = _group(label_text)
    si = scalar_invariants(G)
    pat = artin_pattern(G)
    lab = parse_label(label_text)
    r = lab.e if lab.is_cf else lab.e + 1
    shock = shock_wave_position(G, lab.e, r)
    return TreeVertex(label=label_text, group=G, invariants=si, pattern=pat,
                      depth=depth, shock=shock,
                      centre_type=tuple(centre(G).abelian_type()),
                      kind_token=kind_token, n=n)


def build_branch(tree: str, e: int, index: int) -> Branch:
    """The index-th depth-1 pruned branch: mainline root plus its offside
    immediate descendants, every vertex carrying its computed pattern."""
    if e < 2 or index < 1:
        raise BadParameters("branch needs e >= 2 and index >= 1")
    root = make_vertex(_mainline_label(tree, e, index + 2), 0,
                       kind_token="mainline" if tree == "CF" else "d10")
    br = Branch(tree=tree, e=e, index=index, root=root)
    for kind, n in branch_constitution(tree, index):
        br.offside.append(
            make_vertex(_offside_label(tree, e, index + 3, kind, n), 1,
                        kind_token=kind, n=n))
    return br


# -- reports ------------------------------------------------------------------

@dataclass
class Check:
    law: str
    subject: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, law, subject, ok, detail=""):
        self.checks.append(Check(law, subject, bool(ok), detail))

    @property
    def ok(self):
        return bool(self.checks) and all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def lines(self):
        out = [f"== {self.title} =="]
        for c in self.checks:
            mark = "pass" if c.ok else "FAIL"
            line = f"  [{mark}] {c.law}: {c.subject}"
            if c.detail:
                line += f" -- {c.detail}"
            out.append(line)
        for n in self.notes:
            out.append(f"  (note) {n}")
        out.append(f"  {len(self.checks)} checks, "
                   f"{len(self.failures())} failures")
        return out


def _check_link(rep, law, subject, D, pred_label, step, kind,
                hist_cap=SMALL_ISO_CAP, iso_cap=SMALL_ISO_CAP):
    """Assert p_parent(D) ~ pred at the given step with endo/exo kind."""
    # the histogram-free fingerprint (scalar invariants, abelianization,
    # centre, subgroup invariants, kernel type) suffices to recognize one
    # predicted quotient; element histograms are reserved for separating
    # near-identical descendants in the selection machinery
    Ap = p_parent(D)
    got_step = D.order_exponent() - Ap.order_exponent()
    m = _match(Ap, pred_label, hist_cap=hist_cap, iso_cap=iso_cap) \
        if got_step == step else False
    k = propagation_kind(D, Ap)
    ok = bool(m) and k == kind
    rep.add(law, subject, ok,
            f"p-parent ~ {pred_label} ({m or 'mismatch'}), "
            f"step {got_step} (want {step}), {k} (want {kind})")


def _check_parent(rep, subject, D, pred_label,
                  hist_cap=SMALL_ISO_CAP, iso_cap=SMALL_ISO_CAP):
    par = parent(D)
    m = _match(par, pred_label, hist_cap=hist_cap, iso_cap=iso_cap)
    rep.add("parent quotient is the preceding mainline vertex", subject,
            bool(m), f"parent ~ {pred_label} ({m or 'mismatch'})")


# -- propagation laws ---------------------------------------------------------

def verify_mainline_laws(e_range=(3, 5), i_range=(1, 4)) -> Report:
    """Recursive construction of mainline vertices: exo-genetic behind the
    shock wave, a step-2 bifurcation on it, endo-genetic ahead of it."""
    rep = Report("mainline propagation laws")
    for e in range(e_range[0], e_range[1] + 1):
        for i in range(i_range[0], i_range[1] + 1):
            lab = _mainline_label("CF", e, i + 2)
            D = _group(lab)
            if e >= 4 and i <= e - 3:
                _check_link(rep, "irregular exo-genetic propagation "
                            "(behind the shock wave)", lab, D,
                            _mainline_label("CF", e - 1, i + 2), 1, "exo")
            elif e >= 4 and i == e - 2:
                _check_link(rep, "singular exo-genetic propagation "
                            "(bifurcation on the shock wave)", lab, D,
                            _mainline_label("CF", e - 1, i + 1), 2, "exo")
            elif i >= e - 1 and i >= 2:
                _check_link(rep, "regular endo-genetic propagation "
                            "(ahead of the shock wave)", lab, D,
                            _mainline_label("CF", e, i + 1), 1, "endo")
            else:
                # the tree root: its parent has class two (class-2 chain)
                continue
            if i >= 2:
                _check_parent(rep, lab, D, _mainline_label("CF", e, i + 1))
    return rep


def _cf_offside_kinds(i):
    """Offside kinds (token, n) present for subscript i (branch i-1)."""
    return branch_constitution("CF", i - 1)


def verify_offside_laws(e_range=(3, 5), i_range=(2, 4)) -> Report:
    """Recursive construction of depth-1 offside CF vertices: three laws for
    bicyclic centre keyed to the shock wave, one permanent law for cyclic
    centre."""
    rep = Report("offside propagation laws")
    for e in range(e_range[0], e_range[1] + 1):
        for i in range(i_range[0], i_range[1] + 1):
            for kind, n in _cf_offside_kinds(i):
                lab = _offside_label("CF", e, i + 2, kind, n)
                D = _group(lab)
                main_pred = _mainline_label("CF", e, i + 1)
                if kind in _CYCLIC_CENTRE_KINDS:
                    _check_link(rep, "permanent regular endo-genetic "
                                "propagation (cyclic centre)", lab, D,
                                main_pred, 1, "endo")
                elif e >= 5 and 2 <= i <= e - 3:
                    _check_link(rep, "irregular exo-genetic propagation "
                                "(behind the shock wave, stable type)", lab, D,
                                _offside_label("CF", e - 1, i + 2, kind, n),
                                1, "exo")
                elif e >= 4 and i == e - 2:
                    _check_link(rep, "singular exo-genetic propagation "
                                "(bifurcation on the shock wave)", lab, D,
                                _mainline_label("CF", e - 1, i + 1), 2, "exo")
                elif i >= e - 1:
                    _check_link(rep, "regular endo-genetic propagation "
                                "(ahead of the shock wave)", lab, D,
                                main_pred, 1, "endo")
                else:
                    continue
                _check_parent(rep, lab, D, main_pred)
    return rep


# For the law behind the shock wave, the BCF types correspond to CF types of
# the p-parent: d.10/B.2/D.10/C.4/D.5 arise over a.1/a.1/b.16/a.1/a.1.
_BCF_CF_PARENT_KINDS = {"D10": [("b16", 0)],
                        "B2": [("a1twig", 0)],
                        "C4": [("a1bicyclic", 1), ("a1bicyclic", 2)],
                        "D5": [("a1bicyclic", 1), ("a1bicyclic", 2)]}


def verify_bcf_laws(e_range=(3, 5), i_range=(1, 4)) -> Report:
    """Recursive construction of BCF vertices: endo-genetic with type change
    behind the shock wave, a step-2 bifurcation on it, endo-genetic ahead."""
    rep = Report("bicyclic-factor propagation laws")
    for e in range(e_range[0], e_range[1] + 1):
        for i in range(i_range[0], i_range[1] + 1):
            lab = _mainline_label("BCF", e, i + 2)
            D = _group(lab)
            if i <= e - 2:
                _check_link(rep, "irregular endo-genetic propagation "
                            "(behind the shock wave, with type change)",
                            lab, D, _mainline_label("CF", e, i + 2), 1, "endo")
            elif i == e - 1:
                # step-2 link across the bifurcation; the commutator quotient
                # (3^e, 3) is shared with the step-2 parent, so the link is
                # endo-genetic by definition
                _check_link(rep, "singular step-2 propagation "
                            "(bifurcation on the shock wave)", lab, D,
                            _mainline_label("CF", e, i + 1), 2, "endo")
            else:
                _check_link(rep, "regular endo-genetic propagation "
                            "(ahead of the shock wave)", lab, D,
                            _mainline_label("BCF", e, i + 1), 1, "endo")
            if i >= 2:
                _check_parent(rep, lab, D, _mainline_label("BCF", e, i + 1))
            if i < 2:
                continue
            for kind, n in branch_constitution("BCF", i - 1):
                lab = _offside_label("BCF", e, i + 2, kind, n)
                D = _group(lab)
                if i <= e - 2:
                    cands = [_offside_label("CF", e, i + 2, k2, n2)
                             for k2, n2 in _BCF_CF_PARENT_KINDS[kind]]
                    Ap = p_parent(D)
                    step = D.order_exponent() - Ap.order_exponent()
                    hit = None
                    if step == 1:
                        for cand in cands:
                            if _match(Ap, cand, hist_cap=SMALL_ISO_CAP):
                                hit = cand
                                break
                    k = propagation_kind(D, Ap)
                    rep.add("irregular endo-genetic propagation "
                            "(behind the shock wave, with type change)", lab,
                            hit is not None and k == "endo",
                            f"p-parent ~ {hit or '/'.join(cands)} "
                            f"({'match' if hit else 'mismatch'}), "
                            f"step {step}, {k}")
                elif i == e - 1:
                    _check_link(rep, "singular step-2 propagation "
                                "(bifurcation on the shock wave)", lab, D,
                                _mainline_label("CF", e, i + 1), 2, "endo")
                else:
                    _check_link(rep, "regular endo-genetic propagation "
                                "(ahead of the shock wave)", lab, D,
                                _mainline_label("BCF", e, i + 1), 1, "endo")
                _check_parent(rep, lab, D, _mainline_label("BCF", e, i + 1))
    return rep


# -- descendant computations with caching -------------------------------------

_DESC_CACHE = {}
_COVER_CACHE = {}
SELECT_HIST_CAP = 3 ** 9    # element histograms for descendant selection


def _selector_cap(order):
    """Histogram bound used when matching descendant classes: full element
    histograms up to SELECT_HIST_CAP, the cheap structural profile beyond
    (the histograms provably cannot separate the twin pairs that survive at
    larger orders anyway; those are certified as pairs)."""
    return min(order, SELECT_HIST_CAP)


def _cover_and_pairs(label_text: str, cap=3 ** 13):
    """The p-cover of a family member together with an exhaustive
    automorphism harvest (None when the member is not two-generated)."""
    if label_text in _COVER_CACHE:
        return _COVER_CACHE[label_text]
    G = _group(label_text)
    res = p_cover(G, cap=cap)
    try:
        pairs = automorphism_pairs(G, max_found=None, check_budget=None)
    except (NotTwoGenerated, WrongAbelianization):
        pairs = None
    _COVER_CACHE[label_text] = (res, pairs)
    return res, pairs


def descendant_set(label_text: str, s: int, cap=3 ** 13):
    """Deduplicated immediate p-descendants of a family member, cached.

    Classes are separated exactly by the automorphism-orbit partition of the
    allowable subgroups (pairwise isomorphism testing when the parent has no
    two-generated frame for the orbit machinery); member fingerprints carry
    element histograms only up to SELECT_HIST_CAP.
    """
    key = (label_text, s)
    if key in _DESC_CACHE:
        return _DESC_CACHE[key]
    G = _group(label_text)
    child_order = G.order() * G.p ** s
    res, pairs = _cover_and_pairs(label_text, cap=cap)
    if pairs is not None:
        # exact orbit classification under the full automorphism action
        d = immediate_descendants(G, s, cap=cap, dedup="orbits",
                                  cover_result=res, aut_pairs=pairs,
                                  max_autos=None, check_budget=None,
                                  histogram_cap=_selector_cap(child_order))
    else:
        # no two-generated frame (e.g. the first class-2 chain member):
        # fall back to pairwise isomorphism testing
        d = immediate_descendants(G, s, cap=cap, dedup="iso",
                                  cover_result=res,
                                  histogram_cap=_selector_cap(child_order),
                                  iso_cap=child_order)
    _DESC_CACHE[key] = d
    return d


def _assign_members(dset, predicted_labels):
    """Greedy matching of predicted family labels to descendant classes.

    Returns {label: (index, quality) or None}.  Classes are compared through
    the full-histogram fingerprints stored in the descendant set; a label
    whose fingerprint coincides with an earlier label's (twin presentations)
    is matched to a different class, so the assignment certifies both the
    presence and the pairwise distinctness of all predicted members.
    """
    if not dset.members:
        return {lab: None for lab in predicted_labels}
    cap = _selector_cap(dset.members[0][0].order())
    out = {}
    used = set()
    for lab in predicted_labels:
        target = _fp(lab, cap)
        hit = None
        for idx, (_, _, fp) in enumerate(dset.members):
            if idx in used or fp != target:
                continue
            hit = idx
            break
        out[lab] = None if hit is None else (hit, "fingerprint")
        if hit is not None:
            used.add(hit)
    return out


def verify_bifurcation(e: int) -> Report:
    """Both descendant sets of the distinguished mainline vertex of class =
    coclass: the step-1 set yields the CF branch plus two exo roots, the
    step-2 set yields the next CF branch root level plus the BCF branch."""
    rep = Report(f"bifurcation structure at class = coclass = {e}")
    B_lab = _mainline_label("CF", e, e)       # mainline subscript e-2
    B = _group(B_lab)
    res, _ = _cover_and_pairs(B_lab)
    rep.add("nuclear rank two at the distinguished vertex", B_lab,
            res.nuclear_rank == 2, f"nuclear rank {res.nuclear_rank}")

    s1 = [_mainline_label("CF", e + 1, e),     # exo-genetic continuation
          _mainline_label("BCF", e, e),
          _mainline_label("CF", e, e + 1)]
    s1 += [_offside_label("CF", e, e + 1, k, n)
           for k, n in branch_constitution("CF", e - 2)]
    s2 = [_mainline_label("CF", e + 1, e + 1)]
    s2 += [_offside_label("CF", e + 1, e + 1, k, n)
           for k, n in [("b16", 0), ("a1twig", 0),
                        ("a1bicyclic", 1), ("a1bicyclic", 2)]]
    s2 += [_mainline_label("BCF", e, e + 1)]
    s2 += [_offside_label("BCF", e, e + 1, k, n)
           for k, n in branch_constitution("BCF", e - 2)]

    for s, predicted in ((1, s1), (2, s2)):
        dset = descendant_set(B_lab, s)
        assigned = _assign_members(dset, predicted)
        exo = 0
        for lab in predicted:
            hit = assigned[lab]
            rep.add(f"step-{s} descendant set contains the predicted member",
                    lab, hit is not None,
                    "matched distinct class" if hit else "no class matches")
            if hit is not None:
                member = dset.members[hit[0]][0]
                if propagation_kind(member, B) == "exo":
                    exo += 1
        want_exo = 1 if s == 1 else 5
        rep.add(f"step-{s} exo-genetic count", B_lab, exo == want_exo,
                f"{exo} exo-genetic members (want {want_exo})")
        rep.notes.append(
            f"step {s}: {len(dset.members)} classes from "
            f"{dset.total_enumerated} allowable subgroups; "
            f"{len(predicted)} predicted")
    return rep


# -- explicit paths -----------------------------------------------------------

@dataclass
class PathStep:
    step_size: int
    target: str                  # family label selecting the next vertex


@dataclass
class PathProgram:
    start: str
    steps: list

    def describe(self):
        out = [self.start]
        for st in self.steps:
            out.append(f"-(step {st.step_size})-> {st.target}")
        return " ".join(out)


def evaluate_path(start_label: str, steps, exec_cap=EXEC_CAP):
    """Walk the p-descendant relation along explicit steps.

    Each step selects, among the deduplicated immediate descendants of the
    current vertex, the unique class matching the target family label (by
    fingerprint with histograms up to SELECT_HIST_CAP).  Raises NoMatch if
    no class matches,
    AmbiguousSelector if several do, CapExceeded if an intermediate order
    would exceed exec_cap.
    """
    cur = start_label
    for st in steps:
        target = st.target if isinstance(st, PathStep) else st[1]
        s = st.step_size if isinstance(st, PathStep) else st[0]
        child_order = _group(cur).order() * 3 ** s
        if child_order > exec_cap:
            raise CapExceeded(
                f"descendant order 3^{child_order.bit_length()} at {cur} "
                f"exceeds the execution cap")
        dset = descendant_set(cur, s)
        cap = _selector_cap(child_order)
        target_fp = _fp(target, cap)
        hits = [idx for idx, (_, _, fp) in enumerate(dset.members)
                if fp == target_fp]
        if not hits:
            raise NoMatch(f"no descendant of {cur} matches {target}")
        if len(hits) > 1:
            raise AmbiguousSelector(
                f"{len(hits)} descendants of {cur} match {target} "
                "(twin presentations share all computed invariants)")
        cur = target
    return make_vertex(cur, 0)


def _reach_program(label_text: str) -> PathProgram:
    """Path program from the order-729 CF root to the given family member,
    assembled backwards from the propagation-law case analysis."""
    chain = []
    cur = label_text
    while cur != "M[e=3,c=3]":
        lab = parse_label(cur)
        e, i = lab.e, lab.i
        if lab.kind == "CF_mainline":
            if e >= 4 and i <= e - 3:
                prev, s = _mainline_label("CF", e - 1, i + 2), 1
            elif e >= 4 and i == e - 2:
                prev, s = _mainline_label("CF", e - 1, i + 1), 2
            elif i >= 2:
                prev, s = _mainline_label("CF", e, i + 1), 1
            else:
                raise BadParameters(f"no law reaches {cur}")
        elif lab.is_cf:
            tok = {"CF_b16": "b16", "CF_b3": "b3", "CF_a1_twig": "a1twig",
                   "CF_a1_bicyclic": "a1bicyclic",
                   "CF_a1_cyclic": "a1cyclic"}[lab.kind]
            if tok in _CYCLIC_CENTRE_KINDS or i >= e - 1:
                prev, s = _mainline_label("CF", e, i + 1), 1
            elif e >= 5 and 2 <= i <= e - 3:
                prev, s = _offside_label("CF", e - 1, i + 2, tok, lab.n), 1
            elif e >= 4 and i == e - 2:
                prev, s = _mainline_label("CF", e - 1, i + 1), 2
            else:
                raise BadParameters(f"no law reaches {cur}")
        elif lab.kind == "BCF_mainline":
            if i <= e - 2:
                prev, s = _mainline_label("CF", e, i + 2), 1
            elif i == e - 1:
                prev, s = _mainline_label("CF", e, i + 1), 2
            else:
                prev, s = _mainline_label("BCF", e, i + 1), 1
        else:
            tok = {"BCF_D10": "D10", "BCF_B2": "B2", "BCF_C4": "C4",
                   "BCF_D5": "D5"}[lab.kind]
            if i <= e - 2:
                k2, n2 = _BCF_CF_PARENT_KINDS[tok][0 if lab.n != 2 else -1]
                prev, s = _offside_label("CF", e, i + 2, k2, n2), 1
            elif i == e - 1:
                prev, s = _mainline_label("CF", e, i + 1), 2
            else:
                prev, s = _mainline_label("BCF", e, i + 1), 1
        chain.append(PathStep(s, cur))
        cur = prev
    chain.reverse()
    return PathProgram("M[e=3,c=3]", chain)


def verify_exhaustion(e_max=4, i_max=3) -> Report:
    """Every desk-scale family vertex is reached from the order-729 root by
    an explicit descendant path.  Twin presentations sharing all computed
    invariants are certified as a pair: the final descendant set must carry
    exactly as many distinct classes with the shared fingerprint."""
    rep = Report("exhaustion of the desk-scale grid from the order-729 root")
    targets = []
    for e in range(3, e_max + 1):
        for i in range(1, i_max + 1):
            targets.append(_mainline_label("CF", e, i + 2))
            targets.append(_mainline_label("BCF", e, i + 2))
            if i >= 2:
                for k, n in branch_constitution("CF", i - 1):
                    targets.append(_offside_label("CF", e, i + 2, k, n))
                for k, n in branch_constitution("BCF", i - 1):
                    targets.append(_offside_label("BCF", e, i + 2, k, n))
    for lab in targets:
        prog = _reach_program(lab)
        try:
            evaluate_path(prog.start, prog.steps, exec_cap=3 ** 13)
            rep.add("reached by explicit path", lab, True, prog.describe())
        except AmbiguousSelector:
            # the target and its twin share every computed invariant; check
            # that the last step carries two distinct classes with that
            # fingerprint, one for each member of the pair
            last = prog.steps[-1]
            prev = prog.steps[-2].target if len(prog.steps) > 1 else prog.start
            dset = descendant_set(prev, last.step_size)
            cap = _selector_cap(dset.members[0][0].order())
            hits = [i2 for i2, (_, _, fp) in enumerate(dset.members)
                    if fp == _fp(lab, cap)]
            rep.add("reached by explicit path (twin pair, matched up to "
                    "computed invariants)", lab, len(hits) == 2,
                    f"{prog.describe()} [{len(hits)} twin classes]")
        except (NoMatch, CapExceeded) as exc:
            rep.add("reached by explicit path", lab, False, str(exc))
    return rep


# -- periodicity, class-2 chain ----------------------------------------------

def _branch_profile(branch: Branch):
    out = []
    for v in branch.vertices():
        out.append((v.kind_token, v.n, v.pattern.named_type,
                    v.pattern.kappa_canonical, v.centre_type[0:1] and
                    tuple(v.centre_type), v.rho_sorted(), v.depth))
    return tuple(sorted(out))


def verify_periodicity(tree: str, e: int, i_max=4) -> Report:
    """Branch two-periodicity: the decorated vertex multiset of branch i
    equals that of branch i+2, and branch cardinalities follow parity."""
    rep = Report(f"branch periodicity of the {tree} tree, e={e}")
    branches = {i: build_branch(tree, e, i) for i in range(1, i_max + 3)}
    odd_card, even_card = (7, 9) if tree == "CF" else (5, 9)
    for i in range(1, i_max + 3):
        want = odd_card if i % 2 == 1 else even_card
        rep.add("branch cardinality by parity", f"branch {i}",
                branches[i].cardinality() == want,
                f"{branches[i].cardinality()} vertices (want {want})")
    for i in range(1, i_max + 1):
        a = _branch_profile(branches[i])
        b = _branch_profile(branches[i + 2])
        same = len(a) == len(b) and all(
            x[:4] == y[:4] and x[5:] == y[5:] for x, y in zip(a, b))
        rep.add("decorated type multisets repeat with period two",
                f"branches {i} and {i + 2}", same)
    for i, br in branches.items():
        for v in br.vertices():
            rep.add("fixed rank distribution (2,2,3;3)", v.label,
                    v.rho_sorted() == (2, 2, 3, 3), str(v.rho_sorted()))
            want = _EXPECTED_TYPE.get(v.kind_token, "a.1" if tree == "CF"
                                      else "d.10")
            rep.add("computed transfer-kernel type matches the declared kind",
                    v.label, v.pattern.named_type == want,
                    f"{v.pattern.named_type} (want {want})")
    return rep


def verify_class2_chain(e_max=5) -> Report:
    """The unique infinitely capable class-2 groups form a step-1 chain, and
    they are the parents of both tree roots for each exponent."""
    rep = Report("class-2 parent chain")
    for e in range(3, e_max + 1):
        prev = f"B[e={e - 1}]"
        dset = descendant_set(prev, 1)
        hit = None
        for idx, (Dm, _, _) in enumerate(dset.members):
            if _match(Dm, f"B[e={e}]", iso_cap=3 ** 8):
                hit = idx
                break
        rep.add("chain extension by a step-1 descendant", f"B[e={e}]",
                hit is not None,
                f"selected among {len(dset.members)} classes of {prev}")
        D = _group(f"B[e={e}]")
        Ap = p_parent(D)
        m = _match(Ap, prev)
        rep.add("p-parent quotient is the preceding chain member",
                f"B[e={e}]", bool(m) and
                propagation_kind(D, Ap) == "exo",
                f"p-parent ~ {prev} ({m or 'mismatch'}), "
                f"{propagation_kind(D, Ap)}")
    for e in range(2, 5):
        for tree in ("CF", "BCF"):
            root = _mainline_label(tree, e, 3)
            par = parent(_group(root))
            m = _match(par, f"B[e={e}]")
            rep.add("tree-root parent is the class-2 chain member", root,
                    bool(m), f"parent ~ B[e={e}] ({m or 'mismatch'})")
    return rep


# -- excited states -----------------------------------------------------------

def subscript_k(t: int, j: int) -> int:
    """Position of the BCF twin selected by j among the even-branch offside
    vertices, for trunk selector t."""
    table = {(2, 2): 2, (2, 3): 3, (3, 2): 4, (3, 3): 7,
             (4, 2): 5, (4, 3): 9, (5, 2): 6, (5, 3): 8}
    if (t, j) not in table:
        raise BadParameters(f"no subscript for t={t}, j={j}")
    return table[(t, j)]


_TRUNK_KIND = {2: ("b16", 0), 4: ("a1bicyclic", 1), 5: ("a1bicyclic", 2)}
_STATE_KIND = {2: "D10", 4: "C4", 5: "D5"}


def excited_state_metabelianization(state: int, e: int, t: int, j: int,
                                    execute=True, exec_cap=EXEC_CAP):
    """Path program for the metabelianization of the state-th excited
    periodic vertex of trunk selector t in {2, 4, 5} and twin selector j in
    {2, 3}; executed only when every intermediate order fits the cap."""
    if state < 0 or t not in (2, 4, 5) or j not in (2, 3):
        raise BadParameters("state >= 0, t in {2,4,5}, j in {2,3} required")
    if e < 5 + 2 * state:
        raise BadParameters(f"e must be >= {5 + 2 * state} for state {state}")
    steps = []
    for k in range(state):
        steps.append(PathStep(2, _mainline_label("CF", 5 + k, 5 + k)))
    ee = 4 + 2 * state                       # bifurcation exponent reached
    kind, n = _TRUNK_KIND[t]
    c = 5 + 2 * state
    steps.append(PathStep(2, _offside_label("CF", ee + 1, c, kind, n)))
    for k in range(e - (5 + 2 * state)):
        steps.append(PathStep(1, _offside_label("CF", ee + 2 + k, c, kind, n)))
    steps.append(PathStep(1, _offside_label(
        "BCF", e, c, _STATE_KIND[t], j - 1)))
    prog = PathProgram("M[e=4,c=4]", steps)
    vertex = None
    if execute:
        try:
            vertex = evaluate_path(prog.start, prog.steps, exec_cap=exec_cap)
        except (CapExceeded, AmbiguousSelector):
            vertex = None                    # program still returned
    return prog, vertex


# -- exports ------------------------------------------------------------------

def build_tree(tree: str, e: int, i_max: int):
    return [build_branch(tree, e, i) for i in range(1, i_max + 1)]


def tree_report(tree: str, e: int, i_max: int) -> dict:
    branches = build_tree(tree, e, i_max)
    vertices = []
    edges = []
    for br in branches:
        vertices.append(br.root.to_json_dict())
        for v in br.offside:
            vertices.append(v.to_json_dict())
            edges.append({"from": br.root.label, "to": v.label,
                          "step": 1, "kind": "offside"})
        if br.index < i_max:
            edges.append({"from": br.root.label,
                          "to": _mainline_label(tree, e, br.index + 3),
                          "step": 1, "kind": "mainline"})
    return {"schema_version": 1, "tree": tree, "e": e, "i_max": i_max,
            "vertices": vertices, "edges": edges}


def tree_dot(tree: str, e: int, i_max: int) -> str:
    rep = tree_report(tree, e, i_max)
    lines = [f'digraph "{tree}_e{e}" {{',
             "  rankdir=TB;",
             "  node [shape=box, fontsize=10];"]
    mainline = {v["label"] for v in rep["vertices"] if v["depth"] == 0}
    for v in rep["vertices"]:
        style = ', style=bold' if v["label"] in mainline else ""
        lines.append(
            f'  "{v["label"]}" [label="{v["label"]}\\n'
            f'{v["type"]} {v["kappa"]}"{style}];')
    for ed in rep["edges"]:
        style = " [style=bold]" if ed["kind"] == "mainline" else ""
        lines.append(f'  "{ed["from"]}" -> "{ed["to"]}"{style};')
    lines.append("}")
    return "\n".join(lines) + "\n"
