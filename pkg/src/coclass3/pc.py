"""Exact arithmetic in finite p-groups given by weighted polycyclic presentations.

A presentation consists of generators g_0 < g_1 < ... < g_{n-1}, each with a
relative order that is a power of the prime, a power relation
g_i^{o_i} = (word in later generators), and conjugate relations
g_j^{g_i} = (word) for j > i (absent means the two generators commute).
Elements are exponent vectors (tuples); the product of two normal forms is
computed by collection: the right factor is pushed into the left one letter
group at a time, moving low-index letters leftwards past higher ones via the
conjugate relations and folding overflowing exponents through the power
relations.

The collection loop is iterative (an explicit work stack), so presentations
whose conjugate images mention *earlier* generators -- the "coarse" family
presentations, where w is a power of the first generator -- cannot overflow
the interpreter stack.  Strict presentations (every right-hand side uses only
strictly later generators) are what all subgroup/quotient machinery expects.
"""

from __future__ import annotations

import json

from .errors import (
    CollectionError,
    InconsistentPresentation,
    MalformedSpec,
    PresentationMismatch,
)

FUEL = 50_000_000


def _is_prime_power(o: int, p: int) -> bool:
    if o < p:
        return False
    while o % p == 0:
        o //= p
    return o == 1


class PcPresentation:
    """A weighted polycyclic presentation over a fixed prime.

    Words are sequences of (generator index, exponent) pairs; normal words
    have strictly increasing indices and exponents in [1, rel_order).
    """

    def __init__(self, prime, names, orders, powers=None, conjugates=None,
                 strict=True, check=True):
        self.p = int(prime)
        self.names = list(names)
        self.n = len(self.names)
        self.orders = list(orders)
        # power relations: dict index -> pairs (absent means g^o = 1)
        self.powers = {}
        for i, w in (powers or {}).items():
            w = [(int(a), int(b) % self.orders[a]) for a, b in w if b % self.orders[a]]
            if w:
                self.powers[int(i)] = w
        # conjugate relations: dict (j, i) -> full image word of g_j under g_i
        self.conj = {}
        for (j, i), w in (conjugates or {}).items():
            w = [(int(a), int(b) % self.orders[a]) for a, b in w if b % self.orders[a]]
            if w != [(j, 1)]:
                self.conj[(int(j), int(i))] = w
        self.strict = strict
        if check:
            self._validate()
        # closed[i]: conjugation by g_i never maps a later generator to a word
        # mentioning g_i or anything earlier -- the powered-conjugation fast
        # path is sound exactly for such generators.
        self._closed = []
        for i in range(self.n):
            ok = True
            for (j, k), w in self.conj.items():
                if k == i and any(a <= i for a, _ in w):
                    ok = False
                    break
            self._closed.append(ok)
        self._conj_pow_cache = {}
        self._id = (0,) * self.n
        # bookkeeping used by other modules
        self.designated = None      # (x, y) element tuples, set by families/quotients
        self.definitions = {}       # gen index -> ('pow', i) or ('conj', j, i)
        self.meta = {}

    # -- construction helpers ------------------------------------------------

    def _validate(self):
        if self.n < 1:
            raise MalformedSpec("presentation needs at least one generator")
        for i, o in enumerate(self.orders):
            if not _is_prime_power(o, self.p):
                raise MalformedSpec(
                    f"relative order {o} of {self.names[i]} is not a power of {self.p}")
        for i, w in self.powers.items():
            for a, _ in w:
                if not (0 <= a < self.n):
                    raise MalformedSpec("power relation references unknown generator")
                if self.strict and a <= i:
                    raise MalformedSpec(
                        f"power relation of {self.names[i]} mentions non-later generator")
        for (j, i), w in self.conj.items():
            if not (0 <= i < j < self.n):
                raise MalformedSpec(f"conjugate relation pair ({j},{i}) out of order")
            if self.strict:
                if not w or w[0] != (j, 1):
                    raise MalformedSpec(
                        f"conjugate image of {self.names[j]} must start with it")
                if any(a < j for a, _ in w):
                    raise MalformedSpec(
                        f"conjugate image of {self.names[j]}^{self.names[i]} "
                        "mentions earlier generators")

    # -- basic element API ---------------------------------------------------

    @property
    def identity(self):
        return self._id

    def order(self) -> int:
        o = 1
        for k in self.orders:
            o *= k
        return o

    def order_exponent(self) -> int:
        """log_p of the group order."""
        return sum_expts(self.orders, self.p)

    def gen(self, i):
        v = [0] * self.n
        v[i] = 1
        return tuple(v)

    def element(self, pairs):
        """Normal form of a word given as (index, exponent) pairs."""
        out = [0] * self.n
        self._collect_into(out, list(pairs))
        return tuple(out)

    collect = element

    def mul(self, a, b):
        if len(a) != self.n or len(b) != self.n:
            raise PresentationMismatch("element length does not match presentation")
        out = list(a)
        word = [(i, e) for i, e in enumerate(b) if e]
        self._collect_into(out, word)
        return tuple(out)

    def inv(self, a):
        out = [0] * self.n
        word = [(i, -a[i]) for i in range(self.n - 1, -1, -1) if a[i]]
        self._collect_into(out, word)
        return tuple(out)

    def pow(self, a, k):
        if k < 0:
            a = self.inv(a)
            k = -k
        result = self._id
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def comm(self, a, b):
        """[a, b] = a^-1 b^-1 a b."""
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def conj_elem(self, a, t):
        """a^t = t^-1 a t."""
        return self.mul(self.inv(t), self.mul(a, t))

    def elem_order(self, a):
        o = 1
        while a != self._id:
            a = self.pow(a, self.p)
            o *= self.p
        return o

    # -- the collection engine ----------------------------------------------

    def _collect_into(self, out, word):
        """Multiply the normal vector `out` (in place) by the word on the right.

        `word` is a list of (index, exponent) pairs, leftmost letter first;
        exponents may be arbitrary integers.  Invariant at every step: the
        element represented is normal(out) * (stack read top to bottom).
        """
        n = self.n
        orders = self.orders
        powers = self.powers
        conj = self.conj
        stack = list(reversed(word))
        fuel = FUEL
        while stack:
            fuel -= 1
            if fuel <= 0:
                raise CollectionError("collection fuel exhausted")
            i, e = stack.pop()
            if not e:
                continue
            o = orders[i]
            q, r = divmod(e, o)
            if q:
                # g_i^e = g_i^r * (g_i^{o_i})^q; g_i^{o_i} commutes with g_i
                pw = powers.get(i)
                if pw:
                    if q > 0:
                        piece = pw
                    else:
                        q = -q
                        piece = [(a, -b) for a, b in reversed(pw)]
                    for _ in range(q):
                        stack.extend(reversed(piece))
            if not r:
                continue
            top = n - 1
            while top > i and not out[top]:
                top -= 1
            if top <= i:
                # nothing above i in out: merge the exponent directly
                s = out[i] + r
                if s >= o:
                    s -= o
                    pw = powers.get(i)
                    if pw:
                        stack.extend(reversed(pw))
                out[i] = s
                continue
            tail = [(j, out[j]) for j in range(i + 1, top + 1) if out[j]]
            for j, _ in tail:
                out[j] = 0
            if self._closed[i] and r > 4:
                # head * g_i^r * tail^(g_i^r): conjugate by the powered map
                cmap = self._conj_map_pow(i, r)
                for j, ej in reversed(tail):
                    img = cmap.get(j)
                    if img is None:
                        stack.append((j, ej))
                    else:
                        for _ in range(ej):
                            stack.extend(reversed(img))
                stack.append((i, r))
            else:
                # head * g_i * tail^(g_i) * g_i^(r-1), one letter at a time
                if r > 1:
                    stack.append((i, r - 1))
                for j, ej in reversed(tail):
                    img = conj.get((j, i))
                    if img is None:
                        stack.append((j, ej))
                    else:
                        for _ in range(ej):
                            stack.extend(reversed(img))
                stack.append((i, 1))

    def _conj_map_pow(self, i, r):
        """Images of the generators above i under conjugation by g_i^r.

        Only valid (and only used) when conjugation by g_i is closed on the
        later generators; maps are composed by binary powering and cached.
        """
        key = (i, r)
        cached = self._conj_pow_cache.get(key)
        if cached is not None:
            return cached
        base = {j: w for (j, k), w in self.conj.items() if k == i}
        result = None
        sq = base
        rr = r
        while rr:
            if rr & 1:
                result = sq if result is None else self._compose_maps(result, sq)
            rr >>= 1
            if rr:
                sq = self._compose_maps(sq, sq)
        if result is None:
            result = {}
        self._conj_pow_cache[key] = result
        return result

    def _compose_maps(self, first, second):
        """Conjugation map applying `first` then `second`."""
        out = {}
        for j in set(first) | set(second):
            w = first.get(j, [(j, 1)])
            v = [0] * self.n
            word = []
            for a, b in w:
                img = second.get(a)
                if img is None:
                    word.append((a, b))
                else:
                    for _ in range(b):
                        word.extend(img)
            self._collect_into(v, word)
            pairs = [(a, v[a]) for a in range(self.n) if v[a]]
            if pairs != [(j, 1)]:
                out[j] = pairs
        return out

    # -- consistency ---------------------------------------------------------

    def consistency_failures(self, stop_at_first=False):
        """Standard overlap tests; returns a list of failing overlaps.

        Each failure is (description, lhs, rhs).  Overlaps in which all the
        participating generators pairwise commute and no involved power word
        interacts with the others are skipped: collection then performs the
        same exponent merges on both sides by construction.
        """
        n = self.n
        fails = []
        gens = [self.gen(i) for i in range(n)]
        conj = self.conj
        powgens = {i: sorted({a for a, _ in w}) for i, w in self.powers.items()}

        def interacts(a, b):
            if a == b:
                return False
            lo, hi = (b, a) if b > a else (a, b)
            return (lo, hi) in conj

        def power_touches(j, i):
            return any(interacts(a, i) for a in powgens.get(j, ()))

        for k in range(n - 1, 1, -1):
            for j in range(k - 1, 0, -1):
                kj = (k, j) in conj
                for i in range(j):
                    if not kj and (k, i) not in conj and (j, i) not in conj:
                        continue
                    lhs = self.mul(self.mul(gens[k], gens[j]), gens[i])
                    rhs = self.mul(gens[k], self.mul(gens[j], gens[i]))
                    if lhs != rhs:
                        fails.append((f"({self.names[k]}*{self.names[j]})*{self.names[i]}",
                                      lhs, rhs))
                        if stop_at_first:
                            return fails
        for j in range(n):
            oj = self.orders[j]
            pj = self.pow(gens[j], oj)
            pj1 = self.pow(gens[j], oj - 1)
            # g_j^{o_j} * g_j vs g_j * g_j^{o_j}
            a = self.mul(pj, gens[j])
            b = self.mul(gens[j], pj)
            if a != b:
                fails.append((f"{self.names[j]}^{oj} overlap", a, b))
                if stop_at_first:
                    return fails
            for i in range(j):
                if not interacts(j, i) and not power_touches(j, i) \
                        and not power_touches(i, j):
                    continue
                # g_j^{o_j} * g_i both ways
                a = self.mul(pj, gens[i])
                b = self.mul(pj1, self.mul(gens[j], gens[i]))
                if a != b:
                    fails.append((f"{self.names[j]}^{oj}*{self.names[i]}", a, b))
                    if stop_at_first:
                        return fails
                # g_j * g_i^{o_i} both ways
                oi = self.orders[i]
                a = self.mul(gens[j], self.pow(gens[i], oi))
                b = self.mul(self.mul(gens[j], gens[i]), self.pow(gens[i], oi - 1))
                if a != b:
                    fails.append((f"{self.names[j]}*{self.names[i]}^{oi}", a, b))
                    if stop_at_first:
                        return fails
        return fails

    def is_consistent(self):
        return not self.consistency_failures(stop_at_first=True)

    def require_consistent(self):
        fails = self.consistency_failures(stop_at_first=True)
        if fails:
            desc, lhs, rhs = fails[0]
            raise InconsistentPresentation(
                f"overlap {desc} collects to {self.format_element(lhs)} "
                f"vs {self.format_element(rhs)}")

    # -- display and serialization -------------------------------------------

    def format_element(self, a):
        if a == self._id:
            return "1"
        parts = []
        for i, e in enumerate(a):
            if e:
                parts.append(self.names[i] if e == 1 else f"{self.names[i]}^{e}")
        return "*".join(parts)

    def _word_to_str(self, w):
        if not w:
            return "1"
        return "*".join(self.names[a] if b == 1 else f"{self.names[a]}^{b}"
                        for a, b in w)

    def describe(self):
        lines = [f"prime {self.p}, order {self.p}^{self.order_exponent()}"]
        lines.append("generators: " + ", ".join(
            f"{nm} (order {o})" for nm, o in zip(self.names, self.orders)))
        for i in range(self.n):
            lines.append(f"  {self.names[i]}^{self.orders[i]} = "
                         f"{self._word_to_str(self.powers.get(i, []))}")
        for (j, i), w in sorted(self.conj.items()):
            lines.append(f"  {self.names[j]}^{self.names[i]} = {self._word_to_str(w)}")
        return "\n".join(lines)

    def to_json_dict(self):
        return {
            "prime": self.p,
            "gens": [{"name": nm, "rel_order": o}
                     for nm, o in zip(self.names, self.orders)],
            "powers": {self.names[i]: [[self.names[a], b] for a, b in w]
                       for i, w in sorted(self.powers.items())},
            "conjugates": {f"{self.names[j]}^{self.names[i]}":
                           [[self.names[a], b] for a, b in w]
                           for (j, i), w in sorted(self.conj.items())},
        }

    def to_gap(self, name="G"):
        """GAP-readable finitely presented group for external cross-checks."""
        rels = []
        for i in range(self.n):
            rels.append(f"{self.names[i]}^{self.orders[i]}"
                        f"/({self._gap_word(self.powers.get(i, []))})")
        for j in range(self.n):
            for i in range(j):
                w = self.conj.get((j, i), [(j, 1)])
                rels.append(f"{self.names[j]}^{self.names[i]}/({self._gap_word(w)})")
        body = ",\n  ".join(rels)
        return (f"F := FreeGroup({json.dumps(self.names)});\n"
                + "".join(f"{nm} := F.{k + 1};;\n"
                          for k, nm in enumerate(self.names))
                + f"{name} := F / [\n  {body}\n];\n")

    def _gap_word(self, w):
        if not w:
            return "One(F)"
        return "*".join(self.names[a] if b == 1 else f"{self.names[a]}^{b}"
                        for a, b in w)


def sum_expts(orders, p):
    t = 0
    for o in orders:
        while o > 1:
            o //= p
            t += 1
    return t


def build_presentation(spec, strict=None):
    """Build a presentation from the structured (JSON-style) description.

    Format: {"prime": p, "gens": [{"name": ..., "rel_order": p^k}, ...],
    "powers": {gen: [[gen, exp], ...]}, "conjugates": {"gj^gi": [[gen, exp], ...]}}.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    try:
        prime = int(spec["prime"])
        gens = spec["gens"]
        names = [g["name"] for g in gens]
        orders = [int(g["rel_order"]) for g in gens]
    except (KeyError, TypeError) as exc:
        raise MalformedSpec(f"missing field: {exc}") from exc
    index = {nm: i for i, nm in enumerate(names)}
    if len(index) != len(names):
        raise MalformedSpec("duplicate generator names")

    def resolve(word):
        out = []
        for item in word:
            nm, e = item
            if nm not in index:
                raise MalformedSpec(f"unknown generator {nm!r}")
            out.append((index[nm], int(e)))
        return out

    powers = {}
    for nm, w in (spec.get("powers") or {}).items():
        if nm not in index:
            raise MalformedSpec(f"unknown generator {nm!r} in powers")
        powers[index[nm]] = resolve(w)
    conjugates = {}
    for key, w in (spec.get("conjugates") or {}).items():
        try:
            a, b = key.split("^")
        except ValueError:
            raise MalformedSpec(f"bad conjugate key {key!r} (want 'gj^gi')")
        if a not in index or b not in index:
            raise MalformedSpec(f"unknown generator in conjugate key {key!r}")
        conjugates[(index[a], index[b])] = resolve(w)
    if strict is None:
        # accept non-strict right-hand sides only when they actually occur
        try:
            return PcPresentation(prime, names, orders, powers, conjugates,
                                  strict=True)
        except MalformedSpec:
            return PcPresentation(prime, names, orders, powers, conjugates,
                                  strict=False)
    return PcPresentation(prime, names, orders, powers, conjugates, strict=strict)
