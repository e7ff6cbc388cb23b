"""Acceptance suite: one test (one pass/fail line under pytest -v) per
shipped guarantee.

1. presentation consistency and order formulas on the full grid
2. scalar invariants (class, p-class, coclass) on the full grid
3. transfer patterns (rank distribution and kernel-type legend)
4. parent and p-parent propagation laws
5. two-step bifurcation at the class-equals-coclass vertices
6. branch periodicity and cardinalities
7. class-2 parent chain
8. exhaustion of the desk-scale grid from the order-729 root
9. property suites: axiom fuzzing, transfer homomorphisms, quotient order
   conservation, canonicalization idempotence
"""

import random
import time

from coclass3 import trees
from coclass3.artin import (artin_transfer, canonicalize_kappa,
                            maximal_subgroups, _value_map)
from coclass3.cli import (suite_consistency, suite_invariants, suite_laws,
                          suite_patterns)
from coclass3.families import construct, parse_label
from coclass3.pcover import p_cover, p_parent, parent


def family(text):
    return construct(parse_label(text))


def report_criterion(num, name, rep, elapsed, budget=None):
    ok = rep.ok
    line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'}"
    line += f" -- {len(rep.checks)} checks, {len(rep.failures())} failures"
    line += f", {elapsed:.1f}s" + (f" (budget {budget}s)" if budget else "")
    print(line, flush=True)
    assert ok, [f"{c.law}: {c.subject} -- {c.detail}" for c in rep.failures()]
    if budget is not None:
        assert elapsed < budget, f"{elapsed:.1f}s exceeds the {budget}s budget"


def test_criterion_1_consistency_and_orders():
    t0 = time.time()
    rep = suite_consistency()
    report_criterion(1, "consistency and order formulas", rep,
                     time.time() - t0, budget=30)


def test_criterion_2_scalar_invariants():
    t0 = time.time()
    rep = suite_invariants()
    report_criterion(2, "scalar invariants", rep, time.time() - t0)


def test_criterion_3_transfer_patterns():
    t0 = time.time()
    rep = suite_patterns()
    report_criterion(3, "transfer patterns", rep, time.time() - t0, budget=120)


def test_criterion_4_propagation_laws():
    t0 = time.time()
    rep = suite_laws()
    report_criterion(4, "propagation laws", rep, time.time() - t0, budget=300)


def test_criterion_5_bifurcation():
    t0 = time.time()
    rep = trees.Report("bifurcation")
    res = p_cover(family("M[e=3,i=1]"))
    rep.add("nuclear rank two at the class-equals-coclass vertex",
            "M[e=3,i=1]", res.nuclear_rank == 2,
            f"nuclear rank {res.nuclear_rank}")
    for e in (3, 4):
        part = trees.verify_bifurcation(e)
        rep.checks.extend(part.checks)
        rep.notes.extend(part.notes)
    report_criterion(5, "bifurcation structure", rep, time.time() - t0,
                     budget=600)


def test_criterion_6_periodicity():
    t0 = time.time()
    rep = trees.Report("periodicity")
    for tree in ("CF", "BCF"):
        for e in (3, 4, 5):
            part = trees.verify_periodicity(tree, e, i_max=4)
            rep.checks.extend(part.checks)
    report_criterion(6, "branch periodicity", rep, time.time() - t0)


def test_criterion_7_class2_chain():
    t0 = time.time()
    rep = trees.verify_class2_chain(5)
    report_criterion(7, "class-2 parent chain", rep, time.time() - t0,
                     budget=300)


def test_criterion_8_exhaustion():
    t0 = time.time()
    rep = trees.verify_exhaustion(4, 3)
    report_criterion(8, "desk-scale exhaustion", rep, time.time() - t0)


def test_criterion_9_property_suites():
    t0 = time.time()
    rep = trees.Report("properties")
    rng = random.Random(97)

    # group-axiom fuzzing: 10^4 random triples per group
    for text in ("M[e=2,i=1]", "MM[e=2,i=1]", "B[e=3]"):
        G = family(text)

        def rand():
            return G.element([(k, rng.randrange(G.orders[k]))
                              for k in range(G.n)])

        bad = 0
        for _ in range(10 ** 4):
            a, b, c = rand(), rand(), rand()
            if G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)):
                bad += 1
            if G.mul(a, G.inv(a)) != G.identity:
                bad += 1
        rep.add("associativity and inverses on random triples", text,
                bad == 0, f"{bad} violations in 10^4 triples")

    # transfer tables define homomorphisms on every coset pair
    for text in ("M[e=2,i=1]", "MM[e=2,i=1]"):
        G = family(text)
        frame = maximal_subgroups(G)
        m = 3 ** frame.e
        bad = 0
        for i in (1, 2, 3, 4):
            Hp = frame.derived_of[i - 1]
            table = artin_transfer(G, frame, i)
            for a1 in range(m):
                for b1 in range(3):
                    for a2, b2 in ((1, 0), (0, 1), (m - 1, 2)):
                        lhs = table[((a1 + a2) % m, (b1 + b2) % 3)]
                        rhs = Hp.coset_rep(G.mul(table[(a1, b1)],
                                                 table[(a2, b2)]))
                        if lhs != rhs:
                            bad += 1
        rep.add("transfer tables are homomorphisms", text, bad == 0,
                f"{bad} violations over all cosets of all four subgroups")

    # quotient order conservation for both parent operators
    for text in ("M[e=3,i=2]", "MM[e=2,i=2]", "V[e=2,i=2,kind=b16]"):
        G = family(text)
        ok = all(G.order() % P.order() == 0 and P.order() < G.order()
                 for P in (parent(G), p_parent(G)))
        rep.add("parent quotients divide the group order", text, ok)

    # canonicalization idempotence and relabeling invariance
    bad = 0
    for _ in range(1000):
        kappa = tuple(rng.randrange(5) for _ in range(4))
        c = canonicalize_kappa(kappa)
        if canonicalize_kappa(c) != c:
            bad += 1
        vm = _value_map(rng.randrange(3), rng.choice((1, 2)))
        if canonicalize_kappa(tuple(vm[k] for k in kappa)) != c:
            bad += 1
    rep.add("kappa canonicalization is idempotent and relabeling-invariant",
            "random 4-tuples", bad == 0, f"{bad} violations in 1000 tuples")

    report_criterion(9, "property suites", rep, time.time() - t0)
