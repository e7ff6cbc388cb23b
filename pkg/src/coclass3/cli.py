"""Command-line surface: build family members, export trees, enumerate
descendants, and run the verification suites.

Label grammar (square brackets, comma-separated fields):

    M[e=E,i=I]                    CF mainline vertex (c = i + 2 also accepted)
    V[e=E,i=I,kind=K(,n=N)]       CF off-mainline; K in b16, b3, a1twig,
                                  a1bicyclic, a1cyclic
    MM[e=E,i=I]                   BCF mainline vertex
    VV[e=E,i=I,kind=K(,n=N)]      BCF off-mainline; K in D10, B2, C4, D5
    B[e=E]                        class-2 chain member

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import trees
from .artin import artin_pattern
from .errors import Coclass3Error
from .families import (ALL_KINDS, CF_KINDS, BCF_KINDS, N_KINDS,
                       KIND_TYPE_NAME, FamilyLabel, construct, parse_label)
from .pcover import immediate_descendants
from .series import centre, scalar_invariants
from .trees import Report

GRID_E = (2, 6)
GRID_C = (3, 8)

# kinds whose exceptional relation makes the first generator one power
# longer, shifting the p-class bound from e to e + 1 (see the invariants
# suite below)
_CYCLIC_CENTRE_CF = ("CF_b3", "CF_a1_cyclic")


def grid_labels(e_range=GRID_E, c_range=GRID_C, kinds=None):
    """Every family label on the rectangular (e, c) grid, in a fixed order."""
    out = []
    for kind in (kinds if kinds is not None else ALL_KINDS):
        for e in range(e_range[0], e_range[1] + 1):
            if kind == "Class2_B":
                out.append(FamilyLabel(kind, e))
                continue
            for c in range(c_range[0], c_range[1] + 1):
                if kind in N_KINDS:
                    out.append(FamilyLabel(kind, e, c, 1))
                    out.append(FamilyLabel(kind, e, c, 2))
                else:
                    out.append(FamilyLabel(kind, e, c))
    return out


# -- verification suites -------------------------------------------------------

def suite_consistency(e_range=GRID_E, c_range=GRID_C) -> Report:
    rep = Report("presentation consistency and order formulas")
    for lab in grid_labels(e_range, c_range):
        try:
            G = construct(lab)
        except Coclass3Error as exc:
            rep.add("constructs", str(lab), False, str(exc))
            continue
        fails = G.consistency_failures(stop_at_first=True)
        rep.add("collection consistency", str(lab), not fails,
                "" if not fails else f"overlap {fails[0][0]}")
        want = lab.order_exponent
        got = G.order_exponent()
        rep.add("order formula", str(lab), got == want,
                f"order 3^{got}" + ("" if got == want else f", expected 3^{want}"))
    return rep


def _expected_invariants(lab: FamilyLabel):
    """Closed formulas for (cl, cl_p, cc) of a family member."""
    if lab.kind == "Class2_B":
        return 2, lab.e, lab.e
    c = lab.c
    if lab.is_cf:
        bound = lab.e + 1 if lab.kind in _CYCLIC_CENTRE_CF else lab.e
        return c, max(c, bound), lab.e
    return c, max(c, lab.e + 1), lab.e + 1


def suite_invariants(e_range=GRID_E, c_range=GRID_C) -> Report:
    rep = Report("scalar invariants (class, p-class, coclass)")
    for lab in grid_labels(e_range, c_range):
        G = construct(lab)
        si = scalar_invariants(G)
        cl, cl_p, cc = _expected_invariants(lab)
        got = (si.cl, si.cl_p, si.cc)
        ok = got == (cl, cl_p, cc) and si.lo == lab.order_exponent \
            and si.cc_p == si.lo - si.cl_p
        rep.add("invariant formulas", str(lab), ok,
                f"lo={si.lo} cl={si.cl} cl_p={si.cl_p} cc={si.cc}"
                + ("" if ok else f", expected cl={cl} cl_p={cl_p} cc={cc}"))
    return rep


def suite_patterns(e_range=GRID_E, c_range=GRID_C) -> Report:
    rep = Report("transfer patterns (rank distribution and kernel type)")
    kinds = CF_KINDS + BCF_KINDS
    for lab in grid_labels(e_range, c_range, kinds=kinds):
        if not (lab.is_mainline or lab.c >= 4):
            # off-mainline presentations degenerate at class 3 (the relation
            # t_3 = s_3 s_c collapses); the trees only use them from c >= 4
            continue
        pat = artin_pattern(construct(lab))
        r = pat.rho
        rho_ok = tuple(sorted(r[:3])) == (2, 2, 3) and r[3] == 3
        rep.add("rank distribution (2,2,3;3)", str(lab), rho_ok,
                "rho=(" + ",".join(map(str, r[:3])) + f";{r[3]})")
        want = KIND_TYPE_NAME[lab.kind]
        rep.add("kernel type legend", str(lab), pat.named_type == want,
                f"type {pat.named_type} kappa {pat.kappa_string()}"
                + ("" if pat.named_type == want else f", expected {want}"))
    return rep


def suite_laws() -> Report:
    rep = Report("parent and p-parent propagation laws")
    for part in (trees.verify_mainline_laws(), trees.verify_offside_laws(),
                 trees.verify_bcf_laws()):
        rep.checks.extend(part.checks)
        rep.notes.extend(part.notes)
    return rep


def suite_bifurcation() -> Report:
    rep = Report("two-step bifurcation at the class-equals-coclass vertices")
    for e in (3, 4):
        part = trees.verify_bifurcation(e)
        rep.checks.extend(part.checks)
        rep.notes.extend(part.notes)
    return rep


def suite_periodicity() -> Report:
    rep = Report("branch periodicity and cardinalities")
    for tree in ("CF", "BCF"):
        for e in (3, 4, 5):
            part = trees.verify_periodicity(tree, e)
            rep.checks.extend(part.checks)
            rep.notes.extend(part.notes)
    return rep


def suite_class2() -> Report:
    return trees.verify_class2_chain(5)


def suite_exhaustion() -> Report:
    return trees.verify_exhaustion(4, 3)


SUITES = {
    "consistency": suite_consistency,
    "invariants": suite_invariants,
    "patterns": suite_patterns,
    "laws": suite_laws,
    "bifurcation": suite_bifurcation,
    "periodicity": suite_periodicity,
    "class2": suite_class2,
    "exhaustion": suite_exhaustion,
}


def run_suites(names, jobs=1):
    """Run the named suites (in declared order) and return the Reports.

    With jobs > 1 the suites run on a thread pool; results are assembled in
    the declared order regardless of completion order."""
    ordered = [n for n in SUITES if n in names]
    if jobs <= 1 or len(ordered) <= 1:
        return [SUITES[n]() for n in ordered]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futs = {n: pool.submit(SUITES[n]) for n in ordered}
        return [futs[n].result() for n in ordered]


# -- reports on single vertices ------------------------------------------------

def vertex_report(label_text: str) -> dict:
    lab = parse_label(label_text)
    G = construct(lab)
    si = scalar_invariants(G)
    rep = {
        "label": str(lab),
        "order": G.order(),
        "order_exponent": si.lo,
        "class": si.cl,
        "p_class": si.cl_p,
        "coclass": si.cc,
        "p_coclass": si.cc_p,
        "centre": centre(G).abelian_type(),
    }
    if lab.kind != "Class2_B":
        pat = artin_pattern(G)
        rep["type"] = pat.named_type
        rep["kappa"] = pat.kappa_string()
        rep["rho"] = list(pat.rho)
        rep["alpha"] = [list(a) for a in pat.alpha]
    return rep


def _report_text(rep: dict) -> str:
    lines = [f"{rep['label']}: order 3^{rep['order_exponent']} = {rep['order']}"]
    lines.append(f"  class {rep['class']}  p-class {rep['p_class']}"
                 f"  coclass {rep['coclass']}  p-coclass {rep['p_coclass']}")
    lines.append("  centre " + "x".join(f"C{m}" for m in rep["centre"]))
    if "type" in rep:
        lines.append(f"  type {rep['type']}  kappa {rep['kappa']}"
                     f"  rho ({','.join(map(str, rep['rho'][:3]))};{rep['rho'][3]})")
    return "\n".join(lines) + "\n"


# -- GAP export ----------------------------------------------------------------

def gap_text(label_text: str) -> str:
    """A GAP-readable finitely presented group for external cross-checks."""
    lab = parse_label(label_text)
    G = construct(lab)
    header = f"# {lab}: group of order {G.order()} = 3^{G.order_exponent()}\n"
    return header + G.to_gap()


# -- descendant reports --------------------------------------------------------

def descendants_report(label_text: str, step: int, cap=None, dedup="auto") -> dict:
    lab = parse_label(label_text)
    G = construct(lab)
    kwargs = {"dedup": dedup}
    if cap:
        kwargs["cap"] = cap
        kwargs["histogram_cap"] = cap
        kwargs["iso_cap"] = cap
    if dedup == "orbits":
        kwargs["max_autos"] = None
        kwargs["check_budget"] = None
    dset = immediate_descendants(G, step, **kwargs)
    members = []
    for pres, pat, _fp in dset.members:
        entry = {"order_exponent": pres.order_exponent()}
        if pat is not None:
            entry["type"] = pat.named_type
            entry["kappa"] = pat.kappa_string()
            entry["rho"] = list(pat.rho)
        members.append(entry)
    return {"schema_version": 1, "parent": str(lab), "step": step,
            "dedup": dset.dedup_mode, "total_enumerated": dset.total_enumerated,
            "classes": len(members), "members": members}


# -- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def make_parser() -> _Parser:
    ap = _Parser(prog="coclass3",
                 description="finite 3-group coclass-tree toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="report invariants of one family member")
    b.add_argument("label")
    b.add_argument("--format", choices=("text", "json"), default="text")

    t = sub.add_parser("tree", help="export a pruned coclass tree")
    t.add_argument("tree", choices=("CF", "BCF"))
    t.add_argument("--e", type=int, required=True)
    t.add_argument("--i-max", type=int, default=4)
    t.add_argument("--format", choices=("json", "dot", "text"), default="json")

    d = sub.add_parser("descendants",
                       help="isomorphism classes of immediate descendants")
    d.add_argument("label")
    d.add_argument("--step", type=int, default=1)
    d.add_argument("--cap", type=int, default=0,
                   help="largest group order to construct")
    d.add_argument("--dedup", choices=("auto", "iso", "fingerprint", "orbits"),
                   default="auto")
    d.add_argument("--format", choices=("json", "text"), default="json")

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=tuple(SUITES) + ("all",))
    v.add_argument("--e-max", type=int, default=GRID_E[1])
    v.add_argument("--i-max", type=int, default=GRID_C[1] - 2)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--quiet", action="store_true",
                   help="print only failures and summaries")

    g = sub.add_parser("export-gap", help="emit a GAP-readable presentation")
    g.add_argument("label")

    return ap


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    # the grid suites honour the bound flags; the tree suites have fixed
    # ranges matching the acceptance grid
    e_range = (GRID_E[0], args.e_max)
    c_range = (GRID_C[0], args.i_max + 2)
    overrides = {
        "consistency": lambda: suite_consistency(e_range, c_range),
        "invariants": lambda: suite_invariants(e_range, c_range),
        "patterns": lambda: suite_patterns(e_range, c_range),
    }
    saved = dict(SUITES)
    SUITES.update(overrides)
    try:
        reports = run_suites(names, jobs=args.jobs)
    finally:
        SUITES.clear()
        SUITES.update(saved)
    ok = True
    for rep in reports:
        ok = ok and rep.ok
        if args.quiet:
            print(f"== {rep.title} ==")
            for c in rep.failures():
                print(f"  [FAIL] {c.law}: {c.subject} -- {c.detail}")
            print(f"  {len(rep.checks)} checks, {len(rep.failures())} failures")
        else:
            for line in rep.lines():
                print(line)
    print("VERIFY " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        if args.command == "build":
            rep = vertex_report(args.label)
            if args.format == "json":
                print(json.dumps(rep, indent=2))
            else:
                sys.stdout.write(_report_text(rep))
            return 0
        if args.command == "tree":
            if args.format == "dot":
                sys.stdout.write(trees.tree_dot(args.tree, args.e, args.i_max))
            elif args.format == "json":
                print(json.dumps(trees.tree_report(args.tree, args.e,
                                                   args.i_max), indent=2))
            else:
                for br in trees.build_tree(args.tree, args.e, args.i_max):
                    for v in br.vertices():
                        ind = "  " * v.depth
                        print(f"{ind}{v.label}  {v.pattern.named_type} "
                              f"{v.pattern.kappa_string()}")
            return 0
        if args.command == "descendants":
            rep = descendants_report(args.label, args.step,
                                     cap=args.cap or None, dedup=args.dedup)
            if args.format == "json":
                print(json.dumps(rep, indent=2))
            else:
                print(f"{rep['parent']} step {rep['step']}: "
                      f"{rep['classes']} classes of {rep['total_enumerated']} "
                      f"({rep['dedup']} dedup)")
                for m in rep["members"]:
                    line = f"  order 3^{m['order_exponent']}"
                    if "type" in m:
                        line += f"  {m['type']} {m['kappa']}"
                    print(line)
            return 0
        if args.command == "export-gap":
            sys.stdout.write(gap_text(args.label))
            return 0
        if args.command == "verify":
            return cmd_verify(args)
        return 2
    except Coclass3Error as exc:
        print(f"coclass3: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
