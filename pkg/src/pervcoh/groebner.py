"""Exact polynomial and module arithmetic over a prime field.

Polynomials are stored as dicts ``{exponent tuple: coefficient}`` and elements
of a free module ``S^r`` as dicts ``{(component, exponent tuple): coefficient}``.
An ideal is a rank-one submodule (component 0 everywhere), so a single
Buchberger routine serves both.

Computation over a quotient ``R = S/I`` is always carried out over ``S`` with
the multiples ``I * e_j`` appended to whatever submodule is being handled.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_CHAR = 32003


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """The field F_p; elements are plain ints in ``range(p)``."""

    __slots__ = ("p",)

    def __init__(self, p: int = DEFAULT_CHAR):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        self.p = p

    def __call__(self, value: int) -> int:
        return value % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return pow(a, self.p - 2, self.p)

    def signed(self, a: int) -> int:
        """Representative in (-p/2, p/2], for printing."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"F_{self.p}"


# --------------------------------------------------------------------------
# monomial orders


def _grevlex_key(e):
    return (sum(e),) + tuple(-x for x in reversed(e))


def _lex_key(e):
    return e


@dataclass(frozen=True)
class MonomialOrder:
    """A term order on ``S`` and, for module terms, a position rule.

    ``kind`` is ``"grevlex"``, ``"lex"`` or ``"elim"``; ``"elim"`` puts the
    first ``elim`` variables in a grevlex block that dominates the remaining
    variables.  ``module`` is ``"top"`` (term over position) or ``"pot"``.
    ``block`` > 0 makes module components ``< block`` dominate all others;
    this is the elimination order used for syzygies and lifting.
    """

    kind: str = "grevlex"
    elim: int = 0
    module: str = "top"
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "elim"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.module not in ("top", "pot"):
            raise ValueError(f"unknown position rule {self.module!r}")

    def mono_key(self, e):
        if self.kind == "grevlex":
            return _grevlex_key(e)
        if self.kind == "lex":
            return e
        k = self.elim
        return (_grevlex_key(e[:k]), _grevlex_key(e[k:]))

    def term_key(self, t):
        comp, e = t
        if self.module == "pot":
            inner = (-comp, self.mono_key(e))
        else:
            inner = (self.mono_key(e), -comp)
        if self.block:
            return (comp < self.block,) + inner
        return inner

    def with_block(self, block: int) -> "MonomialOrder":
        return MonomialOrder(self.kind, self.elim, self.module, block)


GREVLEX = MonomialOrder()


# --------------------------------------------------------------------------
# rings


class AmbientRing:
    """The polynomial ring ``S = F_p[x_1..x_n]``."""

    def __init__(self, variables: Sequence[str], char: int = DEFAULT_CHAR,
                 order: MonomialOrder = GREVLEX):
        variables = tuple(variables)
        if not variables:
            raise ValueError("a ring needs at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        self.variables = variables
        self.field = PrimeField(char)
        self.order = order
        self.nvars = len(variables)
        self.zero_exp = (0,) * self.nvars

    @property
    def char(self) -> int:
        return self.field.p

    def __eq__(self, other):
        return (isinstance(other, AmbientRing) and self.variables == other.variables
                and self.field == other.field and self.order == other.order)

    def __hash__(self):
        return hash((self.variables, self.field.p, self.order))

    def __repr__(self):
        return f"F_{self.char}[{','.join(self.variables)}]"

    def gen(self, name_or_index) -> "Poly":
        i = self.variables.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def const(self, c: int) -> "Poly":
        c %= self.char
        return Poly(self, {self.zero_exp: c} if c else {})

    def parse(self, text: str) -> "Poly":
        from .polyparse import parse_poly
        return Poly(self, parse_poly(text, self.variables, self.char))

    def extend(self, names: Sequence[str], front: bool = False) -> "AmbientRing":
        """Ring with extra variables (used by elimination tricks)."""
        vs = tuple(names) + self.variables if front else self.variables + tuple(names)
        return AmbientRing(vs, self.char, self.order)


class Poly:
    """Immutable polynomial in an :class:`AmbientRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: AmbientRing, terms: dict):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c % ring.char}

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly(self.ring, poly_add(self.terms, other.terms, self.ring.char))

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.char
        return Poly(self.ring, {e: (-c) % p for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly(self.ring, poly_mul(self.terms, other.terms, self.ring.char))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = self.ring.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return isinstance(other, Poly) and other.ring == self.ring and other.terms == self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def leading_term(self):
        """``(exponents, coefficient)`` of the largest term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = self.ring.order.mono_key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def sorted_terms(self):
        key = self.ring.order.mono_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def __str__(self):
        return format_poly(self.terms, self.ring.variables, self.ring.field, self.ring.order)

    def __repr__(self):
        return f"Poly({self})"


def format_poly(terms: dict, variables, fld: PrimeField, order: MonomialOrder = GREVLEX) -> str:
    if not terms:
        return "0"
    out = []
    for e, c in sorted(terms.items(), key=lambda t: order.mono_key(t[0]), reverse=True):
        c = fld.signed(c)
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(variables, e) if k)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


# --------------------------------------------------------------------------
# raw dict arithmetic


def poly_add(f: dict, g: dict, p: int) -> dict:
    out = dict(f)
    for e, c in g.items():
        v = (out.get(e, 0) + c) % p
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def poly_mul(f: dict, g: dict, p: int) -> dict:
    out: dict = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = (out.get(e, 0) + c1 * c2) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def poly_scale(f: dict, c: int, p: int) -> dict:
    c %= p
    if not c:
        return {}
    return {e: (a * c) % p for e, a in f.items()}


def vec_from_polys(polys: Sequence[dict]) -> dict:
    """Column of polynomial dicts -> module vector."""
    out = {}
    for i, f in enumerate(polys):
        for e, c in f.items():
            out[(i, e)] = c
    return out


def vec_to_polys(v: dict, rank: int) -> list:
    out = [dict() for _ in range(rank)]
    for (i, e), c in v.items():
        out[i][e] = c
    return out


def vec_add(v: dict, w: dict, p: int, coef: int = 1) -> dict:
    out = dict(v)
    for t, c in w.items():
        x = (out.get(t, 0) + coef * c) % p
        if x:
            out[t] = x
        else:
            out.pop(t, None)
    return out


def vec_scale_poly(v: dict, f: dict, p: int) -> dict:
    """Multiply every entry of ``v`` by the polynomial ``f``."""
    out: dict = {}
    for (i, e1), c1 in v.items():
        for e2, c2 in f.items():
            t = (i, tuple(a + b for a, b in zip(e1, e2)))
            x = (out.get(t, 0) + c1 * c2) % p
            if x:
                out[t] = x
            else:
                out.pop(t, None)
    return out


def vec_shift(v: dict, offset: int) -> dict:
    return {(i + offset, e): c for (i, e), c in v.items()}


def vec_restrict(v: dict, lo: int, hi: int, offset: int = 0) -> dict:
    """Entries with component in ``[lo, hi)``, re-indexed by ``-lo + offset``."""
    return {(i - lo + offset, e): c for (i, e), c in v.items() if lo <= i < hi}


def vec_combination(columns: Sequence[dict], coeffs: dict, p: int) -> dict:
    """``sum_i coeffs[i] * columns[i]`` where ``coeffs`` is a module vector."""
    out: dict = {}
    for (i, e), c in coeffs.items():
        for (j, e2), c2 in columns[i].items():
            t = (j, tuple(a + b for a, b in zip(e, e2)))
            x = (out.get(t, 0) + c * c2) % p
            if x:
                out[t] = x
            else:
                out.pop(t, None)
    return out


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _quot(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _sub_mul(f: dict, g: dict, coef: int, mono, p: int) -> None:
    """In place: ``f -= coef * mono * g``."""
    for (i, e), c in g.items():
        t = (i, tuple(x + y for x, y in zip(e, mono)))
        x = (f.get(t, 0) - coef * c) % p
        if x:
            f[t] = x
        else:
            f.pop(t, None)


# --------------------------------------------------------------------------
# Groebner bases


class GroebnerBasis:
    """Reduced Groebner basis of a submodule of ``S^rank``.

    ``elements`` are monic module vectors sorted by leading term (descending).
    """

    __slots__ = ("ring", "order", "rank", "elements", "leads", "_by_comp")

    def __init__(self, ring: AmbientRing, order: MonomialOrder, rank: int, elements: list):
        self.ring = ring
        self.order = order
        self.rank = rank
        key = order.term_key
        leads = [max(g, key=key) for g in elements]
        pairs = sorted(zip(leads, elements), key=lambda t: key(t[0]), reverse=True)
        self.leads = [t for t, _ in pairs]
        self.elements = [g for _, g in pairs]
        by_comp: dict = {}
        for idx, (comp, e) in enumerate(self.leads):
            by_comp.setdefault(comp, []).append((e, idx))
        self._by_comp = by_comp

    def __len__(self):
        return len(self.elements)

    def is_unit(self) -> bool:
        """True when the submodule is everything (``1`` in an ideal)."""
        zero = self.ring.zero_exp
        comps = {c for (c, e) in self.leads if e == zero}
        return len(comps) == self.rank and self.rank > 0

    def divisor(self, term):
        comp, e = term
        for le, idx in self._by_comp.get(comp, ()):
            if _divides(le, e):
                return idx
        return None

    def reduce(self, f: dict, full: bool = True) -> dict:
        return normal_form_raw(f, self, full)

    def polys(self) -> list:
        """Elements as :class:`Poly` (ideal case)."""
        return [Poly(self.ring, {e: c for (_, e), c in g.items()}) for g in self.elements]

    def leading_monomials(self):
        return [e for (_, e) in self.leads]


def normal_form_raw(f: dict, gb: GroebnerBasis, full: bool = True) -> dict:
    p = gb.ring.char
    key = gb.order.term_key
    f = dict(f)
    rem: dict = {}
    leads = gb.leads
    elems = gb.elements
    while f:
        t = max(f, key=key)
        idx = gb.divisor(t)
        if idx is None:
            if not full:
                f.update(rem)
                return f
            rem[t] = f.pop(t)
            continue
        c = f[t]
        _sub_mul(f, elems[idx], c, _quot(t[1], leads[idx][1]), p)
    return rem


def _monic(v: dict, order: MonomialOrder, p: int) -> dict:
    if not v:
        return v
    lt = max(v, key=order.term_key)
    c = v[lt]
    if c == 1:
        return v
    inv = pow(c, p - 2, p)
    return {t: (a * inv) % p for t, a in v.items()}


def _sugar(v: dict) -> int:
    return max(sum(e) for (_, e) in v)


def buchberger(gens: Iterable[dict], ring: AmbientRing, order: MonomialOrder, rank: int) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by ``gens``.

    Normal pair selection by sugar degree, ties broken by the lcm term and
    the pair indices, so the output is deterministic.  Pairs are pruned with
    the Gebauer-Moeller chain criterion; the coprime criterion is only used
    for ideals.
    """
    p = ring.char
    key = order.term_key
    ideal_case = rank == 1

    basis: list = []     # monic vectors
    leads: list = []
    sugars: list = []
    live: list = []      # not made redundant by a later lead
    pairs: list = []     # heap of (sugar, lcm key, i, j, lcm term)
    paircount = itertools.count()

    tmp_gb_state = {"by_comp": {}}

    def reduce_full(f):
        rem = {}
        f = dict(f)
        by_comp = tmp_gb_state["by_comp"]
        while f:
            t = max(f, key=key)
            comp, e = t
            hit = None
            for le, idx in by_comp.get(comp, ()):
                if _divides(le, e):
                    hit = idx
                    break
            if hit is None:
                rem[t] = f.pop(t)
                continue
            _sub_mul(f, basis[hit], f[t], _quot(e, leads[hit][1]), p)
        return rem

    def add(h, sugar):
        h = _monic(h, order, p)
        lt = max(h, key=key)
        idx = len(basis)
        comp, e = lt
        # chain criterion on pending pairs
        survivors = []
        for item in pairs:
            _, _, i, j, lcm_t, _ = item
            if lcm_t[0] == comp and _divides(e, lcm_t[1]):
                lih = _lcm(leads[i][1], e)
                ljh = _lcm(leads[j][1], e)
                if lih != lcm_t[1] and ljh != lcm_t[1]:
                    continue
            survivors.append(item)
        if len(survivors) != len(pairs):
            pairs[:] = survivors
            heapq.heapify(pairs)
        basis.append(h)
        leads.append(lt)
        sugars.append(sugar)
        live.append(True)
        # new pairs
        newp = []
        for i in range(idx):
            if not live[i] or leads[i][0] != comp:
                continue
            li = leads[i][1]
            l = _lcm(li, e)
            if ideal_case and all(a == 0 or b == 0 for a, b in zip(li, e)):
                continue
            s = max(sugars[i] + sum(l) - sum(li), sugar + sum(l) - sum(e))
            newp.append((l, i, s))
        # keep only one pair per lcm among the new ones (GM criterion M/F)
        seen = {}
        for l, i, s in newp:
            if l in seen:
                continue
            if any(_divides(l2, l) and l2 != l for l2 in (x[0] for x in newp)):
                continue
            seen[l] = (i, s)
        for l, (i, s) in seen.items():
            t = (comp, l)
            heapq.heappush(pairs, (s, _neg_key(key(t)), i, idx, t, next(paircount)))
        for i in range(idx):
            if live[i] and leads[i][0] == comp and _divides(e, leads[i][1]):
                live[i] = False
        by_comp = tmp_gb_state["by_comp"]
        by_comp.setdefault(comp, []).append((e, idx))

    start = []
    for g in gens:
        g = {t: c % p for t, c in g.items() if c % p}
        if g:
            start.append(g)
    start.sort(key=lambda v: (_sugar(v), _neg_key(key(max(v, key=key)))))
    for g in start:
        r = reduce_full(g)
        if r:
            add(r, _sugar(g))

    while pairs:
        s, _, i, j, lcm_t, _ = heapq.heappop(pairs)
        gi, gj = basis[i], basis[j]
        li, lj = leads[i][1], leads[j][1]
        spoly = {}
        _sub_mul(spoly, gi, p - 1, _quot(lcm_t[1], li), p)  # + m_i * g_i
        _sub_mul(spoly, gj, 1, _quot(lcm_t[1], lj), p)      # - m_j * g_j
        r = reduce_full(spoly)
        if r:
            add(r, s)

    # minimal + reduced basis
    keep = []
    for idx, lt in enumerate(leads):
        redundant = False
        for jdx, lt2 in enumerate(leads):
            if jdx == idx or lt2[0] != lt[0] or not _divides(lt2[1], lt[1]):
                continue
            if lt2[1] != lt[1] or jdx < idx:
                redundant = True
                break
        if not redundant:
            keep.append(idx)
    minimal = GroebnerBasis(ring, order, rank, [basis[i] for i in keep])
    reduced = []
    for idx, g in enumerate(minimal.elements):
        lt = minimal.leads[idx]
        tail = {t: c for t, c in g.items() if t != lt}
        tail = normal_form_raw(tail, minimal)
        tail[lt] = 1
        reduced.append(tail)
    return GroebnerBasis(ring, order, rank, reduced)


def _neg_key(k):
    """Sort key inverting the order of ``k`` (for a min-heap of largest-first)."""
    return _Rev(k)


class _Rev:
    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return self.k > other.k

    def __eq__(self, other):
        return self.k == other.k


# --------------------------------------------------------------------------
# session cache


class _GBCache:
    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}
        self.hits = 0
        self.misses = 0

    def get(self, gens, ring, order, rank):
        p = ring.char
        canon = []
        for g in gens:
            g = {t: c % p for t, c in g.items() if c % p}
            if g:
                canon.append(tuple(sorted(_monic(g, order, p).items())))
        k = (ring, order, rank, tuple(sorted(set(canon))))
        with self._lock:
            hit = self._store.get(k)
            if hit is not None:
                self.hits += 1
                return hit
        gb = buchberger([dict(c) for c in k[3]], ring, order, rank)
        with self._lock:
            self.misses += 1
            return self._store.setdefault(k, gb)

    def clear(self):
        with self._lock:
            self._store.clear()


GB_CACHE = _GBCache()


def module_gb(gens: Iterable[dict], ring: AmbientRing, rank: int,
              order: MonomialOrder | None = None) -> GroebnerBasis:
    return GB_CACHE.get(list(gens), ring, order or ring.order, rank)


def ideal_vecs(polys: Iterable) -> list:
    out = []
    for f in polys:
        terms = f.terms if isinstance(f, Poly) else f
        if terms:
            out.append({(0, e): c for e, c in terms.items()})
    return out


def ideal_gb(polys: Iterable, ring: AmbientRing, order: MonomialOrder | None = None) -> GroebnerBasis:
    return module_gb(ideal_vecs(polys), ring, 1, order)


# --------------------------------------------------------------------------
# quotient rings


class QuotientRing:
    """``R = S/I`` with ``I`` held as a reduced Groebner basis."""

    def __init__(self, ambient: AmbientRing, ideal: Iterable = ()):
        self.ambient = ambient
        polys = [f if isinstance(f, Poly) else Poly(ambient, f) for f in ideal]
        self.ideal_gb = ideal_gb(polys, ambient)
        if self.ideal_gb.is_unit():
            raise ValueError("defining ideal is the unit ideal")
        self.ideal = self.ideal_gb.polys()

    @classmethod
    def polynomial(cls, variables, char: int = DEFAULT_CHAR) -> "QuotientRing":
        return cls(AmbientRing(variables, char))

    @classmethod
    def from_strings(cls, variables, relations: Sequence[str] = (), char: int = DEFAULT_CHAR):
        S = AmbientRing(variables, char)
        return cls(S, [S.parse(r) for r in relations])

    @property
    def char(self):
        return self.ambient.char

    @property
    def is_polynomial(self) -> bool:
        return not self.ideal

    def __eq__(self, other):
        return (isinstance(other, QuotientRing) and other.ambient == self.ambient
                and other.ideal_gb.elements == self.ideal_gb.elements)

    def __hash__(self):
        return hash((self.ambient, tuple(tuple(sorted(g.items())) for g in self.ideal_gb.elements)))

    def __repr__(self):
        if not self.ideal:
            return repr(self.ambient)
        return f"{self.ambient}/({', '.join(str(f) for f in self.ideal)})"

    def parse(self, text: str) -> Poly:
        return self.reduce(self.ambient.parse(text))

    def reduce(self, f: Poly) -> Poly:
        if not self.ideal:
            return f
        v = normal_form_raw({(0, e): c for e, c in f.terms.items()}, self.ideal_gb)
        return Poly(self.ambient, {e: c for (_, e), c in v.items()})

    def reduce_vec(self, v: dict) -> dict:
        """Entrywise normal form of a module vector modulo ``I``."""
        if not self.ideal or not v:
            return v
        comps: dict = {}
        for (i, e), c in v.items():
            comps.setdefault(i, {})[(0, e)] = c
        out = {}
        for i, f in comps.items():
            for (_, e), c in normal_form_raw(f, self.ideal_gb).items():
                out[(i, e)] = c
        return out

    def ideal_multiples(self, rank: int) -> list:
        """``I * e_j`` for ``j < rank``."""
        out = []
        for g in self.ideal_gb.elements:
            for j in range(rank):
                out.append({(j, e): c for (_, e), c in g.items()})
        return out


# --------------------------------------------------------------------------
# user-facing operations


def groebner_basis(gens: Sequence, ring: QuotientRing, order: MonomialOrder | None = None,
                   rank: int | None = None) -> GroebnerBasis:
    """Groebner basis of the submodule of ``R^rank`` generated by ``gens``.

    ``gens`` are polynomials (ideal case) or module vectors.  Over ``R = S/I``
    the multiples ``I * e_j`` are appended and the basis is computed over ``S``.
    """
    order = order or ring.ambient.order
    vecs = []
    for g in gens:
        if isinstance(g, Poly):
            vecs.extend(ideal_vecs([g]))
            rank = rank or 1
        elif isinstance(g, dict):
            vecs.append(g)
        else:
            raise TypeError(f"cannot use {type(g).__name__} as a generator")
    if rank is None:
        rank = max((i + 1 for v in vecs for (i, _) in v), default=1)
    vecs.extend(ring.ideal_multiples(rank))
    return module_gb(vecs, ring.ambient, rank, order)


def normal_form(f, gb: GroebnerBasis):
    """Fully reduced remainder of ``f`` modulo ``gb`` (Poly in, Poly out)."""
    if isinstance(f, Poly):
        if f.ring != gb.ring:
            raise ValueError("polynomial and basis live in different rings")
        if gb.rank != 1:
            raise ValueError("polynomial reduced against a module basis")
        v = normal_form_raw({(0, e): c for e, c in f.terms.items()}, gb)
        return Poly(gb.ring, {e: c for (_, e), c in v.items()})
    if any(i >= gb.rank for (i, _) in f):
        raise ValueError("vector has more components than the basis module")
    return normal_form_raw(f, gb)


def s_polynomial(f: dict, g: dict, order: MonomialOrder, p: int) -> dict | None:
    key = order.term_key
    lf = max(f, key=key)
    lg = max(g, key=key)
    if lf[0] != lg[0]:
        return None
    l = _lcm(lf[1], lg[1])
    out: dict = {}
    _sub_mul(out, f, -pow(f[lf], p - 2, p), _quot(l, lf[1]), p)
    _sub_mul(out, g, pow(g[lg], p - 2, p), _quot(l, lg[1]), p)
    return out


def buchberger_certificate(gb: GroebnerBasis) -> bool:
    """Every S-polynomial of every pair reduces to zero."""
    p = gb.ring.char
    for a, b in itertools.combinations(gb.elements, 2):
        s = s_polynomial(a, b, gb.order, p)
        if s is not None and normal_form_raw(s, gb):
            return False
    return True


def kernel_raw(columns: Sequence[dict], target_rank: int, target_rels: Sequence[dict],
               ring: QuotientRing) -> list:
    """Generators of ``{c in R^a : sum c_i col_i = 0 in R^b / rels}``.

    Computed by a Groebner basis of ``(col_i, e_i)`` together with
    ``(rel, 0)`` and ``(I e_j, 0)`` under an order in which the first ``b``
    components dominate; basis elements living in the last ``a`` components
    generate the kernel.
    """
    a = len(columns)
    if a == 0:
        return []
    b = target_rank
    gens = []
    for i, col in enumerate(columns):
        v = dict(col)
        v[(b + i, ring.ambient.zero_exp)] = 1
        gens.append(v)
    gens.extend(dict(r) for r in target_rels if r)
    gens.extend(ring.ideal_multiples(b))
    order = ring.ambient.order.with_block(b)
    gb = module_gb(gens, ring.ambient, b + a, order)
    out = []
    for g, lt in zip(gb.elements, gb.leads):
        if lt[0] >= b:
            v = ring.reduce_vec(vec_shift(g, -b))
            if v:
                out.append(v)
    return out


def lift_raw(vectors: Sequence[dict], columns: Sequence[dict], target_rank: int,
             target_rels: Sequence[dict], ring: QuotientRing) -> list:
    """Coefficients ``c`` with ``v = sum c_i col_i`` modulo rels and ``I``.

    Returns one coefficient vector (in ``S^a``) per input vector, or ``None``
    where the vector is not in the span.
    """
    a = len(columns)
    b = target_rank
    gens = []
    for i, col in enumerate(columns):
        v = dict(col)
        v[(b + i, ring.ambient.zero_exp)] = 1
        gens.append(v)
    gens.extend(dict(r) for r in target_rels if r)
    gens.extend(ring.ideal_multiples(b))
    order = ring.ambient.order.with_block(b)
    gb = module_gb(gens, ring.ambient, b + a, order)
    p = ring.char
    out = []
    for v in vectors:
        r = normal_form_raw(v, gb)
        if any(i < b for (i, _) in r):
            out.append(None)
            continue
        out.append(ring.reduce_vec({(i - b, e): (-c) % p for (i, e), c in r.items()}))
    return out


def syzygy_matrix(gb: GroebnerBasis, ring: QuotientRing | None = None) -> list:
    """Columns generating all syzygies of the basis elements over ``ring``.

    ``ring`` defaults to the polynomial ring the basis lives in; over a
    quotient the relation module is computed modulo the defining ideal.
    """
    ring = ring or QuotientRing(gb.ring)
    return kernel_raw(gb.elements, gb.rank, [], ring)


def ideal_intersection(I: Sequence[Poly], J: Sequence[Poly], ring: QuotientRing) -> list:
    """Generators of ``I ∩ J`` via ``t*I + (1-t)*J`` and elimination of ``t``."""
    S = ring.ambient
    I = [f for f in I if f]
    J = [f for f in J if f]
    if not I or not J:
        return []
    T = S.extend(["_t"], front=True)
    T = AmbientRing(T.variables, S.char, MonomialOrder("elim", elim=1))
    lift = lambda f: {(0, (0,) + e): c for e, c in f.terms.items()}
    p = S.char
    t = {(0, (1,) + S.zero_exp): 1}
    one_minus_t = {(0, (0,) + S.zero_exp): 1, (0, (1,) + S.zero_exp): p - 1}
    gens = []
    for f in I:
        gens.append(vec_scale_poly(lift(f), {e: c for (_, e), c in t.items()}, p))
    for g in J:
        gens.append(vec_scale_poly(lift(g), {e: c for (_, e), c in one_minus_t.items()}, p))
    for h in ring.ideal:
        gens.append(lift(h))
    gb = module_gb(gens, T, 1)
    out = []
    for g in gb.elements:
        if all(e[0] == 0 for (_, e) in g):
            f = Poly(S, {e[1:]: c for (_, e), c in g.items()})
            f = ring.reduce(f)
            if f:
                out.append(f)
    return out


def ideal_contains(I_gb: GroebnerBasis, f: Poly) -> bool:
    return not normal_form(f, I_gb)


def radical_membership(f: Poly, I: Sequence[Poly], ring: QuotientRing) -> bool:
    """``f ∈ sqrt(I + defining ideal)``: ``1 ∈ I + (1 - t f)`` in ``S[t]``."""
    S = ring.ambient
    T = S.extend(["_t"])
    p = S.char
    lift = lambda g: {(0, e + (0,)): c for e, c in g.terms.items()}
    gens = [lift(g) for g in list(I) + list(ring.ideal) if g]
    tf = {(0, e + (1,)): (-c) % p for e, c in f.terms.items()}
    tf = vec_add(tf, {(0, T.zero_exp): 1}, p)
    gens.append(tf)
    return module_gb(gens, T, 1).is_unit()


def krull_dimension(I: Sequence[Poly], S: AmbientRing) -> int:
    """Dimension of ``S/I``: largest variable set independent modulo ``lt(I)``."""
    gb = ideal_gb(I, S)
    if gb.is_unit():
        raise ValueError("the unit ideal has no dimension")
    return dimension_from_monomials(gb.leading_monomials(), S.nvars)


def dimension_from_monomials(monos: Sequence[tuple], n: int) -> int:
    supports = [frozenset(i for i, k in enumerate(m) if k) for m in monos]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = set(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0
