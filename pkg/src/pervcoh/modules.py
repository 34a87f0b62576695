"""Finitely presented modules over ``R = S/I`` and maps between them.

A module with ``g`` generators is ``S^g`` modulo its relation columns and
``I * S^g``.  Matrices are lists of columns; a column is a module vector
(see :mod:`pervcoh.groebner`) in the target's generators.
"""

from __future__ import annotations

from typing import Sequence

from .groebner import (
    QuotientRing,
    module_gb,
    normal_form_raw,
    vec_add,
    vec_combination,
    vec_shift,
    kernel_raw,
    lift_raw,
)


def _clean(v: dict, p: int) -> dict:
    return {t: c % p for t, c in v.items() if c % p}


def compose(outer: Sequence[dict], inner: Sequence[dict], p: int) -> list:
    """Matrix of ``outer ∘ inner``."""
    return [vec_combination(outer, col, p) for col in inner]


def identity_matrix(n: int, zero_exp) -> list:
    return [{(i, zero_exp): 1} for i in range(n)]


def scale_matrix(cols: Sequence[dict], c: int, p: int) -> list:
    c %= p
    if not c:
        return [{} for _ in cols]
    return [{t: (a * c) % p for t, a in col.items()} for col in cols]


def add_matrices(a: Sequence[dict], b: Sequence[dict], p: int) -> list:
    return [vec_add(x, y, p) for x, y in zip(a, b)]


class PresentedModule:
    """``coker(S^r -> S^g)`` over ``ring``, with ``I`` implicitly added."""

    __slots__ = ("ring", "ngens", "rels", "_gb", "_zero")

    def __init__(self, ring: QuotientRing, ngens: int, rels: Sequence[dict] = ()):
        self.ring = ring
        self.ngens = ngens
        p = ring.char
        cleaned = []
        seen = set()
        for r in rels:
            r = ring.reduce_vec(_clean(r, p))
            if not r:
                continue
            k = tuple(sorted(r.items()))
            if k in seen:
                continue
            seen.add(k)
            cleaned.append(r)
        self.rels = cleaned
        self._gb = None
        self._zero = None

    @classmethod
    def free(cls, ring: QuotientRing, n: int) -> "PresentedModule":
        return cls(ring, n, [])

    @classmethod
    def zero(cls, ring: QuotientRing) -> "PresentedModule":
        return cls(ring, 0, [])

    @classmethod
    def cyclic(cls, ring: QuotientRing, ideal) -> "PresentedModule":
        """``R/J`` for ``J`` given by polynomials."""
        rels = [{(0, e): c for e, c in f.terms.items()} for f in ideal]
        return cls(ring, 1, rels)

    @property
    def is_free(self) -> bool:
        return not self.rels

    def gb(self):
        if self._gb is None:
            gens = list(self.rels) + self.ring.ideal_multiples(self.ngens)
            self._gb = module_gb(gens, self.ring.ambient, max(self.ngens, 1))
        return self._gb

    def reduce(self, v: dict) -> dict:
        if self.ngens == 0:
            return {}
        return normal_form_raw(v, self.gb())

    def contains_zero(self, v: dict) -> bool:
        """``v`` represents zero in this module."""
        return not self.reduce(v)

    def is_zero(self) -> bool:
        if self._zero is None:
            if self.ngens == 0:
                self._zero = True
            else:
                one = self.ring.ambient.zero_exp
                self._zero = all(not self.reduce({(i, one): 1}) for i in range(self.ngens))
        return self._zero

    def direct_sum(self, other: "PresentedModule") -> "PresentedModule":
        g = self.ngens
        return PresentedModule(self.ring, g + other.ngens,
                               list(self.rels) + [vec_shift(r, g) for r in other.rels])

    def power(self, n: int) -> "PresentedModule":
        out = PresentedModule.zero(self.ring)
        for _ in range(n):
            out = out.direct_sum(self)
        return out

    def prune(self):
        """Drop generators killed by a unit relation.

        Returns ``(M', to_new, from_new)`` with mutually inverse matrices.
        """
        ring = self.ring
        p = ring.char
        one = ring.ambient.zero_exp
        g = self.ngens
        rels = [dict(r) for r in self.rels]
        # images of the original generators, expressed in surviving ones
        images = [{(i, one): 1} for i in range(g)]
        alive = list(range(g))
        changed = True
        while changed:
            changed = False
            for ridx, r in enumerate(rels):
                pivot = None
                for (i, e), c in sorted(r.items()):
                    if e == one and all(j != i or f == one for (j, f) in r):
                        pivot = (i, c)
                        break
                if pivot is None:
                    continue
                i, u = pivot
                inv = pow(u, p - 2, p)
                # e_i = -u^{-1} * sum_{j != i} r_j e_j
                sub = {t: (-c * inv) % p for t, c in r.items() if t[0] != i}

                def eliminate(v):
                    coeff = {e: c for (j, e), c in v.items() if j == i}
                    if not coeff:
                        return v
                    rest = {t: c for t, c in v.items() if t[0] != i}
                    extra = {}
                    for (j, e2), c2 in sub.items():
                        for e1, c1 in coeff.items():
                            t = (j, tuple(a + b for a, b in zip(e1, e2)))
                            extra[t] = (extra.get(t, 0) + c1 * c2) % p
                    return vec_add(rest, extra, p)

                rels = [eliminate(s) for k, s in enumerate(rels) if k != ridx]
                rels = [ring.reduce_vec(s) for s in rels]
                rels = [s for s in rels if s]
                images = [ring.reduce_vec(eliminate(v)) for v in images]
                alive.remove(i)
                changed = True
                break
        index = {old: new for new, old in enumerate(alive)}
        remap = lambda v: {(index[i], e): c for (i, e), c in v.items()}
        new = PresentedModule(ring, len(alive), [remap(r) for r in rels])
        to_new = [remap(v) for v in images]
        from_new = [{(old, one): 1} for old in alive]
        return new, to_new, from_new

    def __repr__(self):
        return f"PresentedModule(gens={self.ngens}, rels={len(self.rels)})"


def free(ring, n):
    return PresentedModule.free(ring, n)


class ModuleMap:
    """Homomorphism given on generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: PresentedModule, target: PresentedModule, matrix: Sequence[dict]):
        if len(matrix) != source.ngens:
            raise ValueError("matrix needs one column per source generator")
        self.source = source
        self.target = target
        self.matrix = [target.ring.reduce_vec(dict(c)) for c in matrix]

    def __call__(self, v: dict) -> dict:
        return vec_combination(self.matrix, v, self.source.ring.char)

    def is_well_defined(self) -> bool:
        return all(self.target.contains_zero(self(r)) for r in self.source.rels)

    def is_zero(self) -> bool:
        return all(self.target.contains_zero(c) for c in self.matrix)

    def kernel(self):
        """``(K, inclusion)`` with ``K`` presented on kernel generators."""
        return submodule(self.source, kernel_raw(self.matrix, self.target.ngens,
                                                 self.target.rels, self.source.ring))

    def cokernel(self) -> PresentedModule:
        return PresentedModule(self.target.ring, self.target.ngens,
                               list(self.target.rels) + list(self.matrix))

    def is_injective(self) -> bool:
        K, _ = self.kernel()
        return K.is_zero()

    def is_surjective(self) -> bool:
        return self.cokernel().is_zero()

    def is_isomorphism(self) -> bool:
        return self.is_surjective() and self.is_injective()


def submodule(ambient: PresentedModule, gens: Sequence[dict]):
    """Submodule of ``ambient`` generated by ``gens``, and its inclusion."""
    ring = ambient.ring
    gens = [g for g in gens if not ambient.contains_zero(g)]
    rels = kernel_raw(gens, ambient.ngens, ambient.rels, ring)
    K = PresentedModule(ring, len(gens), rels)
    return K, ModuleMap(K, ambient, gens)


def subquotient(ambient: PresentedModule, gens: Sequence[dict], modulo: Sequence[dict]):
    """``(<gens> + N) / (<modulo> + N)`` presented on ``gens``.

    Returns the module and the matrix of its generators in ``ambient``.
    """
    ring = ambient.ring
    rels = kernel_raw(gens, ambient.ngens, list(ambient.rels) + list(modulo), ring)
    return PresentedModule(ring, len(gens), rels), list(gens)


def lift(vectors: Sequence[dict], columns: Sequence[dict], target: PresentedModule) -> list:
    """Coefficient vectors expressing each vector through ``columns``.

    Raises ``ValueError`` if some vector is outside the span.
    """
    if not vectors:
        return []
    if not columns:
        for v in vectors:
            if not target.contains_zero(v):
                raise ValueError("vector not in the image")
        return [{} for _ in vectors]
    out = lift_raw(vectors, columns, target.ngens, target.rels, target.ring)
    for c in out:
        if c is None:
            raise ValueError("vector not in the image")
    return out


def minimal_generators(candidates: Sequence[dict], base: Sequence[dict], ambient: PresentedModule) -> list:
    """Greedy subset of ``candidates`` generating ``<candidates> + <base>`` modulo ``ambient``'s relations.

    Candidates are visited by increasing degree so that, for graded input,
    the kept set is minimal.
    """
    ring = ambient.ring
    order = ring.ambient.order

    def weight(v):
        return (max(sum(e) for (_, e) in v), len(v), sorted((order.term_key(t) for t in v), reverse=True))

    cands = [c for c in candidates if not ambient.contains_zero(c)]
    cands.sort(key=weight)
    kept: list = []
    for c in cands:
        span = list(base) + kept + list(ambient.rels) + ring.ideal_multiples(ambient.ngens)
        if span:
            gb = module_gb(span, ring.ambient, max(ambient.ngens, 1))
            if not normal_form_raw(c, gb):
                continue
        kept.append(c)
    # second pass: drop anything the others already generate
    changed = True
    while changed:
        changed = False
        for idx in range(len(kept) - 1, -1, -1):
            others = kept[:idx] + kept[idx + 1:]
            span = list(base) + others + list(ambient.rels) + ring.ideal_multiples(ambient.ngens)
            if span and not normal_form_raw(kept[idx], module_gb(span, ring.ambient, max(ambient.ngens, 1))):
                kept.pop(idx)
                changed = True
                break
    return kept


def annihilator(M: PresentedModule) -> list:
    """Generators (polynomials in the ambient ring) of ``ann(M)``, modulo ``I``.

    ``ann(M) = ∩_i (N : e_i)`` where ``N`` is the relation submodule.
    """
    from .groebner import Poly, ideal_intersection, ideal_gb
    ring = M.ring
    S = ring.ambient
    one = S.zero_exp
    if M.is_zero():
        return [S.const(1)]
    current = None
    for i in range(M.ngens):
        syz = kernel_raw([{(i, one): 1}], M.ngens, M.rels, ring)
        gens = [Poly(S, {e: c for (_, e), c in v.items()}) for v in syz]
        gens = [g for g in gens if g]
        current = gens if current is None else ideal_intersection(current, gens, ring)
    gb = ideal_gb(list(current) + list(ring.ideal), S)
    return [ring.reduce(g) for g in gb.polys() if ring.reduce(g)]
