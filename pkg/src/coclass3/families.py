"""Constructors for the parametrized families of two-generated finite 3-groups.

Every family member is a metabelian group G = <x, y> whose commutator
structure is carried by s_2 = [y,x], s_j = [s_{j-1},x] and t_3 = [s_2,y]
(with s_j = t_j for j >= 4), together with a distinguished element
w = x^{3^(e-1)} (CF kinds) resp. w = x^{3^e} (BCF kinds).  The power schema
shared by all kinds is

    s_j^3 = s_{j+2}^2 s_{j+3}   (2 <= j <= c-3),
    s_{c-2}^3 = s_c^2,   s_{c-1}^3 = s_c^3 = 1,

degenerating for c = 4 to s_2^3 = s_4^2 and for c = 3 to s_2^3 = s_3^3 = 1.
The individual kinds differ only in the values of y^3, w^3 and t_3.

Each constructor first builds a "coarse" presentation, in which x is a single
generator of large relative order, and then refines it into a weighted
presentation in which every generator has relative order 3 and generators are
ordered by increasing weight (x is split into x0, x1, ... with x_k^3 =
x_{k+1}).  All structural machinery (series, covers, quotients) operates on
the refined form; the coarse form is retained in `meta` for display.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadParameters, RefinementError
from .pc import PcPresentation

CF_KINDS = ("CF_mainline", "CF_b16", "CF_a1_twig", "CF_a1_bicyclic",
            "CF_b3", "CF_a1_cyclic")
BCF_KINDS = ("BCF_mainline", "BCF_D10", "BCF_B2", "BCF_C4", "BCF_D5")
ALL_KINDS = CF_KINDS + BCF_KINDS + ("Class2_B",)

# kinds whose presentation involves the exponent parameter n
N_KINDS = frozenset({"CF_b3", "CF_a1_bicyclic", "CF_a1_cyclic",
                     "BCF_D10", "BCF_B2", "BCF_C4", "BCF_D5"})

# displayed type name of each kind (transfer kernel type)
KIND_TYPE_NAME = {
    "CF_mainline": "a.1", "CF_b16": "b.16", "CF_a1_twig": "a.1",
    "CF_a1_bicyclic": "a.1", "CF_b3": "b.3", "CF_a1_cyclic": "a.1",
    "BCF_mainline": "d.10", "BCF_D10": "D.10", "BCF_B2": "B.2",
    "BCF_C4": "C.4", "BCF_D5": "D.5", "Class2_B": "a.1",
}


@dataclass(frozen=True)
class FamilyLabel:
    """Symbolic identifier of a family member.

    kind: one of ALL_KINDS; e: logarithmic exponent (>= 2); c: nilpotency
    class (>= 3, c = i + 2 in terms of the branch index i; unused for
    Class2_B); n: exponent parameter in {1, 2} for the kinds that have one.
    """
    kind: str
    e: int
    c: int = 0
    n: int = 0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise BadParameters(f"unknown kind {self.kind!r}")
        if self.e < 2:
            raise BadParameters(f"e must be >= 2, got {self.e}")
        if self.kind == "Class2_B":
            if self.c not in (0, 2):
                raise BadParameters("Class2_B has fixed class 2")
        else:
            if self.c < 3:
                raise BadParameters(f"c must be >= 3, got {self.c}")
        if self.kind in N_KINDS:
            if self.n not in (1, 2):
                raise BadParameters(
                    f"kind {self.kind} needs exponent n in {{1,2}}, got {self.n}")

    @property
    def i(self) -> int:
        """Branch index: c = i + 2."""
        return self.c - 2

    @property
    def is_cf(self) -> bool:
        return self.kind in CF_KINDS

    @property
    def is_bcf(self) -> bool:
        return self.kind in BCF_KINDS

    @property
    def is_mainline(self) -> bool:
        return self.kind in ("CF_mainline", "BCF_mainline")

    @property
    def order_exponent(self) -> int:
        if self.kind == "Class2_B":
            return self.e + 2
        return self.e + self.c + (1 if self.is_bcf else 0)

    def __str__(self):
        if self.kind == "Class2_B":
            return f"B[e={self.e}]"
        if self.kind == "CF_mainline":
            return f"M[e={self.e},i={self.i}]"
        if self.kind == "BCF_mainline":
            return f"MM[e={self.e},i={self.i}]"
        tok = _KIND_TOKEN[self.kind]
        head = "V" if self.is_cf else "VV"
        s = f"{head}[e={self.e},i={self.i},kind={tok}"
        if self.kind in N_KINDS:
            s += f",n={self.n}"
        return s + "]"


_KIND_TOKEN = {
    "CF_b16": "b16", "CF_b3": "b3", "CF_a1_twig": "a1twig",
    "CF_a1_bicyclic": "a1bicyclic", "CF_a1_cyclic": "a1cyclic",
    "BCF_D10": "D10", "BCF_B2": "B2", "BCF_C4": "C4", "BCF_D5": "D5",
}
_TOKEN_KIND = {v.lower(): k for k, v in _KIND_TOKEN.items()}


def parse_label(text: str) -> FamilyLabel:
    """Parse the CLI label syntax, e.g. M[e=4,i=2] or V[e=4,i=2,kind=b16,n=1].

    Heads: M (CF mainline), MM (BCF mainline), V (CF off-mainline),
    VV (BCF off-mainline), B (class-2 chain member).
    """
    text = text.strip()
    if "[" not in text or not text.endswith("]"):
        raise BadParameters(f"bad label syntax: {text!r}")
    head, _, body = text.partition("[")
    head = head.strip()
    fields = {}
    for part in body[:-1].split(","):
        if not part.strip():
            continue
        k, _, v = part.partition("=")
        if not _:
            raise BadParameters(f"bad label field {part!r} in {text!r}")
        fields[k.strip()] = v.strip()

    def intfield(k, default=None):
        if k not in fields:
            if default is not None:
                return default
            raise BadParameters(f"label {text!r} missing field {k!r}")
        try:
            return int(fields[k])
        except ValueError:
            raise BadParameters(f"field {k}={fields[k]!r} is not an integer")

    e = intfield("e")
    if head == "B":
        return FamilyLabel("Class2_B", e)
    if "c" in fields:
        c = intfield("c")
    else:
        c = intfield("i") + 2
    if head == "M":
        return FamilyLabel("CF_mainline", e, c)
    if head == "MM":
        return FamilyLabel("BCF_mainline", e, c)
    if head in ("V", "VV"):
        tok = fields.get("kind", "").lower()
        kind = _TOKEN_KIND.get(tok)
        if kind is None:
            raise BadParameters(f"unknown offside kind {fields.get('kind')!r}")
        if (head == "V") != (kind in CF_KINDS):
            raise BadParameters(f"kind {tok} does not belong to head {head}")
        n = intfield("n", default=0) if kind in N_KINDS else 0
        if kind in N_KINDS and "n" not in fields:
            n = 1
        return FamilyLabel(kind, e, c, n)
    raise BadParameters(f"unknown label head {head!r}")


# -- coarse presentations ----------------------------------------------------

def coarse_presentation(label: FamilyLabel) -> PcPresentation:
    """The direct translation of the family's defining relations.

    Generators: x, y, s2, ..., sc; x carries the full 3-power order.
    Right-hand sides may mention powers of x (the element w), so the result
    is generally not weight-ordered; use construct() for the refined form.
    """
    e = label.e
    if label.kind == "Class2_B":
        names = ["x", "y", "s2"]
        orders = [3 ** e, 3, 3]
        conj = {(1, 0): [(1, 1), (2, 1)]}
        pres = PcPresentation(3, names, orders, {}, conj, strict=False)
        pres.meta["label"] = label
        return pres

    c = label.c
    n = label.n
    names = ["x", "y"] + [f"s{j}" for j in range(2, c + 1)]
    s = {j: 2 + (j - 2) for j in range(2, c + 1)}    # generator index of s_j
    x_exp = e if label.is_cf else e + 1               # x has order 3^x_exp
    orders = [3 ** x_exp, 3] + [3] * (c - 1)

    powers = {}
    # the s_j power schema, with its small-class degenerations
    if c >= 5:
        for j in range(2, c - 2):
            powers[s[j]] = [(s[j + 2], 2)] + ([(s[j + 3], 1)] if j + 3 <= c else [])
        powers[s[c - 2]] = [(s[c], 2)]
    elif c == 4:
        powers[s[2]] = [(s[4], 2)]
    # c == 3: s_2^3 = 1; and s_{c-1}^3 = s_c^3 = 1 always (no entries)

    # y^3 and w^3 per kind
    if label.kind == "CF_b16":
        powers[1] = [(s[c], 1)]
    elif label.kind in ("CF_a1_bicyclic", "BCF_D10", "BCF_C4", "BCF_D5"):
        powers[1] = [(s[c], n)]
    if label.kind in ("CF_b3", "CF_a1_cyclic"):
        # w^3 = s_c^n replaces w^3 = 1, i.e. x^{3^e} = s_c^n
        powers[0] = [(s[c], n)]

    # t_3 as a word (the part after s_3), per kind
    w_word = [(0, 3 ** (x_exp - 1))]
    if label.kind in ("CF_mainline", "CF_b16", "CF_b3"):
        t3_extra = []
    elif label.kind in ("CF_a1_twig", "CF_a1_bicyclic", "CF_a1_cyclic"):
        t3_extra = [(s[c], 1)]
    elif label.kind in ("BCF_mainline", "BCF_D10"):
        t3_extra = w_word
    elif label.kind in ("BCF_B2", "BCF_C4"):
        t3_extra = [(s[c], n)] + w_word
    else:  # BCF_D5
        t3_extra = [(s[c], 3 - n)] + w_word

    conj = {(1, 0): [(1, 1), (s[2], 1)]}                      # y^x = y s2
    for j in range(2, c):
        conj[(s[j], 0)] = [(s[j], 1), (s[j + 1], 1)]          # s_j^x = s_j s_{j+1}
    if c >= 3:
        conj[(s[2], 1)] = [(s[2], 1), (s[3], 1)] + t3_extra   # s_2^y = s_2 t_3
    for j in range(3, c):
        conj[(s[j], 1)] = [(s[j], 1), (s[j + 1], 1)]          # s_j^y = s_j s_{j+1}

    pres = PcPresentation(3, names, orders, powers, conj, strict=False)
    pres.meta["label"] = label
    return pres


# -- refinement to a weighted presentation -----------------------------------

def refine(coarse: PcPresentation, x_exp: int, c: int) -> PcPresentation:
    """Split the large-order generator x into order-3 generators x0, x1, ...
    (x_k^3 = x_{k+1}) and reorder everything by increasing weight.

    Refined generator order: x0, y, s2, then x_k and s_{k+2} interleaved,
    any remaining x_k, and s_c last (s_c is central, and for the kinds with
    the exceptional relation w^3 = s_c^n it sits arbitrarily deep in the
    3-power structure, so it must come after every x_k).
    """
    # refined generator descriptors: ('x', k), ('y',), ('s', j)
    descr = [("x", 0), ("y",), ("s", 2)]
    k = 1
    while k < x_exp or k + 2 < c:
        if k < x_exp:
            descr.append(("x", k))
        if k + 2 < c:
            descr.append(("s", k + 2))
        k += 1
    if c >= 3:
        descr.append(("s", c))
    nref = len(descr)
    pos = {d: m for m, d in enumerate(descr)}

    def name_of(d):
        if d[0] == "x":
            return f"x{d[1]}"
        if d[0] == "y":
            return "y"
        return f"s{d[1]}"

    # coarse realization of each refined generator
    def realize(d):
        if d[0] == "x":
            return coarse.element([(0, 3 ** d[1])])
        if d[0] == "y":
            return coarse.gen(1)
        return coarse.gen(2 + (d[1] - 2))

    real = [realize(d) for d in descr]
    real_inv = [coarse.inv(g) for g in real]

    def peel(v):
        """Express a coarse element as refined digits, by leading-term division."""
        rest = v
        digits = [0] * nref
        for m, d in enumerate(descr):
            if d[0] == "x":
                dig = (rest[0] // 3 ** d[1]) % 3
            elif d[0] == "y":
                dig = rest[1]
            else:
                dig = rest[2 + (d[1] - 2)]
            digits[m] = dig
            if dig:
                u = real_inv[m]
                for _ in range(dig):
                    rest = coarse.mul(u, rest)
        if rest != coarse.identity:
            raise RefinementError(
                f"element {coarse.format_element(v)} does not peel to the "
                "refined generating sequence")
        return digits

    def peel_word(v, floor, lead=None):
        """Peel and check the word is admissible as a right-hand side: all
        digits at positions <= floor vanish (and position `lead`, if given,
        carries digit exactly 1)."""
        digits = peel(v)
        for m in range(floor + 1):
            if m != lead and digits[m]:
                raise RefinementError(
                    f"refined relation for {coarse.format_element(v)} is not "
                    f"weight-ascending (digit at {name_of(descr[m])})")
        if lead is not None and digits[lead] != 1:
            raise RefinementError("conjugate image does not start with the "
                                  "conjugated generator")
        return [(m, dg) for m, dg in enumerate(digits) if dg]

    powers = {}
    for m in range(nref):
        cube = coarse.pow(real[m], 3)
        if cube != coarse.identity:
            powers[m] = peel_word(cube, m)
    conj = {}
    for m in range(nref):
        for l in range(m + 1, nref):
            img = coarse.conj_elem(real[l], real[m])
            if img != real[l]:
                conj[(l, m)] = peel_word(img, m, lead=l)

    refined = PcPresentation(3, [name_of(d) for d in descr], [3] * nref,
                             powers, conj, strict=True)
    refined.designated = (refined.gen(pos[("x", 0)]), refined.gen(pos[("y",)]))
    # definitions: which relation introduces each generator (used by the
    # cover construction); x_{k+1} by x_k^3, s_2 by y^x0, s_{j+1} by s_j^x0
    defs = {}
    for kk in range(1, x_exp):
        defs[pos[("x", kk)]] = ("pow", pos[("x", kk - 1)])
    if ("s", 2) in pos:
        defs[pos[("s", 2)]] = ("conj", pos[("y",)], pos[("x", 0)])
    for j in range(3, c + 1):
        if ("s", j) in pos:
            defs[pos[("s", j)]] = ("conj", pos[("s", j - 1)], pos[("x", 0)])
    refined.definitions = defs
    refined.meta["positions"] = {name_of(d): m for d, m in pos.items()}
    return refined


def construct(label: FamilyLabel) -> PcPresentation:
    """Build the refined, validated presentation of a family member."""
    coarse = coarse_presentation(label)
    x_exp = {3 ** k: k for k in range(1, 40)}[coarse.orders[0]]
    c = 2 if label.kind == "Class2_B" else label.c
    refined = refine(coarse, x_exp, c)
    refined.meta["label"] = label
    refined.meta["coarse"] = coarse
    refined.require_consistent()
    return refined


def degenerate_root_presentation(kind: str, e: int) -> PcPresentation:
    """The class-3 root written out explicitly rather than through the schema.

    For CF this is <x,y | x^{3^(e-1)}=w, w^3=1, y^3=1, s2^3=s3^3=1, s3=t3>,
    for BCF the same with x^{3^e}=w and t3=s3*w.  Agrees with
    construct(kind, e, c=3) -- the two code paths cross-check each other.
    """
    if kind not in ("CF_mainline", "BCF_mainline"):
        raise BadParameters(f"no degenerate root for kind {kind!r}")
    if e < 2:
        raise BadParameters("e must be >= 2")
    x_exp = e if kind == "CF_mainline" else e + 1
    names = ["x", "y", "s2", "s3"]
    orders = [3 ** x_exp, 3, 3, 3]
    t3 = [(3, 1)] if kind == "CF_mainline" else [(3, 1), (0, 3 ** (x_exp - 1))]
    conj = {
        (1, 0): [(1, 1), (2, 1)],        # y^x = y s2
        (2, 0): [(2, 1), (3, 1)],        # s2^x = s2 s3
        (2, 1): [(2, 1)] + t3,           # s2^y = s2 t3
    }
    coarse = PcPresentation(3, names, orders, {}, conj, strict=False)
    refined = refine(coarse, x_exp, 3)
    refined.meta["coarse"] = coarse
    refined.require_consistent()
    return refined
