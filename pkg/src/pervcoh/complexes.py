"""Bounded cochain complexes of presented modules.

Conventions (fixed here, used everywhere):

* differentials raise degree, ``d^k : C^k -> C^{k+1}``;
* ``C[n]^k = C^{k+n}`` with differential ``(-1)^n d``; chain maps shift
  without signs;
* ``cone(f: A -> B)^k = A^{k+1} ⊕ B^k`` with ``d(a, b) = (-d a, f a + d b)``;
  generators of ``A^{k+1}`` come first.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groebner import QuotientRing, vec_shift, vec_restrict, vec_add, kernel_raw
from .modules import (
    PresentedModule,
    ModuleMap,
    compose,
    identity_matrix,
    scale_matrix,
    add_matrices,
    lift,
)


class Complex:
    """A bounded complex; ``terms[k]`` is the module in degree ``k``.

    ``diffs[k]`` is the matrix of ``d^k`` (columns = generators of degree ``k``,
    entries in generators of degree ``k + 1``).
    """

    def __init__(self, ring: QuotientRing, terms: dict, diffs: dict | None = None):
        self.ring = ring
        self.terms = {k: M for k, M in sorted(terms.items()) if M.ngens}
        diffs = diffs or {}
        self.diffs = {}
        for k, M in self.terms.items():
            if k + 1 in self.terms:
                cols = diffs.get(k)
                if cols is None:
                    cols = [{} for _ in range(M.ngens)]
                if len(cols) != M.ngens:
                    raise ValueError(f"differential in degree {k} has wrong size")
                self.diffs[k] = [ring.reduce_vec(dict(c)) for c in cols]

    @classmethod
    def zero(cls, ring: QuotientRing) -> "Complex":
        return cls(ring, {})

    @classmethod
    def concentrated(cls, M: PresentedModule, degree: int = 0) -> "Complex":
        return cls(M.ring, {degree: M})

    def module(self, k: int) -> PresentedModule:
        M = self.terms.get(k)
        return M if M is not None else PresentedModule.zero(self.ring)

    def diff(self, k: int) -> list:
        cols = self.diffs.get(k)
        if cols is not None:
            return cols
        return [{} for _ in range(self.module(k).ngens)]

    def diff_map(self, k: int) -> ModuleMap:
        return ModuleMap(self.module(k), self.module(k + 1), self.diff(k))

    @property
    def degrees(self) -> list:
        return list(self.terms)

    @property
    def lo(self):
        return min(self.terms) if self.terms else None

    @property
    def hi(self):
        return max(self.terms) if self.terms else None

    def ranks(self) -> dict:
        return {k: M.ngens for k, M in self.terms.items()}

    def is_free(self) -> bool:
        return all(M.is_free for M in self.terms.values())

    def check(self) -> bool:
        """``d∘d = 0`` and every differential respects relations."""
        p = self.ring.char
        for k in self.terms:
            if not self.diff_map(k).is_well_defined():
                return False
            dd = compose(self.diff(k + 1), self.diff(k), p)
            tgt = self.module(k + 2)
            if any(not tgt.contains_zero(c) for c in dd):
                return False
        return True

    def __repr__(self):
        body = ", ".join(f"{k}:{M.ngens}" + ("" if M.is_free else f"/{len(M.rels)}")
                         for k, M in self.terms.items())
        return f"Complex({body})"


class ChainMap:
    """Degreewise module maps ``source^k -> target^k``."""

    def __init__(self, source: Complex, target: Complex, comps: dict | None = None):
        self.source = source
        self.target = target
        comps = comps or {}
        ring = source.ring
        self.comps = {}
        for k, M in source.terms.items():
            if k in target.terms:
                cols = comps.get(k)
                if cols is None:
                    cols = [{} for _ in range(M.ngens)]
                if len(cols) != M.ngens:
                    raise ValueError(f"chain map component {k} has wrong size")
                self.comps[k] = [ring.reduce_vec(dict(c)) for c in cols]

    def component(self, k: int) -> list:
        cols = self.comps.get(k)
        if cols is not None:
            return cols
        return [{} for _ in range(self.source.module(k).ngens)]

    def module_map(self, k: int) -> ModuleMap:
        return ModuleMap(self.source.module(k), self.target.module(k), self.component(k))

    def check(self) -> bool:
        """Squares commute and components respect relations."""
        p = self.source.ring.char
        for k in set(self.source.terms) | set(self.target.terms):
            if not self.module_map(k).is_well_defined():
                return False
            left = compose(self.target.diff(k), self.component(k), p)
            right = compose(self.component(k + 1), self.source.diff(k), p)
            tgt = self.target.module(k + 1)
            for a, b in zip(left, right):
                if not tgt.contains_zero(vec_add(a, b, p, -1)):
                    return False
        return True

    def __mul__(self, other: "ChainMap") -> "ChainMap":
        """``self ∘ other``."""
        p = self.source.ring.char
        return ChainMap(other.source, self.target,
                        {k: compose(self.component(k), other.component(k), p) for k in other.source.terms})

    def scaled(self, c: int) -> "ChainMap":
        p = self.source.ring.char
        return ChainMap(self.source, self.target, {k: scale_matrix(v, c, p) for k, v in self.comps.items()})

    def __add__(self, other: "ChainMap") -> "ChainMap":
        p = self.source.ring.char
        return ChainMap(self.source, self.target,
                        {k: add_matrices(self.component(k), other.component(k), p) for k in self.source.terms})

    def is_zero(self) -> bool:
        return all(self.module_map(k).is_zero() for k in self.comps)

    @classmethod
    def identity(cls, C: Complex) -> "ChainMap":
        one = C.ring.ambient.zero_exp
        return cls(C, C, {k: identity_matrix(M.ngens, one) for k, M in C.terms.items()})

    @classmethod
    def zero(cls, source: Complex, target: Complex) -> "ChainMap":
        return cls(source, target, {})


@dataclass
class Triangle:
    """``A -f-> B -g-> C -h-> A[1]``."""

    A: Complex
    B: Complex
    C: Complex
    f: ChainMap
    g: ChainMap
    h: ChainMap
    tag: str = "strict-cone"


# --------------------------------------------------------------------------
# basic constructions


def shift(C: Complex, n: int) -> Complex:
    """``C[n]``: degree ``k`` holds ``C^{k+n}``; differential ``(-1)^n d``."""
    if n == 0:
        return C
    sign = -1 if n % 2 else 1
    p = C.ring.char
    terms = {k - n: M for k, M in C.terms.items()}
    diffs = {k - n: scale_matrix(d, sign, p) for k, d in C.diffs.items()}
    return Complex(C.ring, terms, diffs)


def shift_map(f: ChainMap, n: int, source: Complex | None = None, target: Complex | None = None) -> ChainMap:
    src = source or shift(f.source, n)
    tgt = target or shift(f.target, n)
    return ChainMap(src, tgt, {k - n: v for k, v in f.comps.items()})


def direct_sum(*cs: Complex) -> Complex:
    ring = cs[0].ring
    degrees = sorted(set().union(*(c.terms for c in cs)))
    terms, diffs = {}, {}
    offsets = {}
    for k in degrees:
        M = PresentedModule.zero(ring)
        offs = []
        for c in cs:
            offs.append(M.ngens)
            M = M.direct_sum(c.module(k))
        terms[k] = M
        offsets[k] = offs
    for k in degrees:
        if k + 1 not in terms:
            continue
        cols = []
        for idx, c in enumerate(cs):
            off = offsets[k + 1][idx]
            cols.extend(vec_shift(v, off) for v in c.diff(k))
        diffs[k] = cols
    return Complex(ring, terms, diffs)


def direct_sum_maps(*fs: ChainMap) -> ChainMap:
    """Block-diagonal map between direct sums of sources and targets."""
    src = direct_sum(*(f.source for f in fs))
    tgt = direct_sum(*(f.target for f in fs))
    comps = {}
    for k in src.terms:
        cols = []
        off = 0
        for f in fs:
            cols.extend(vec_shift(v, off) for v in f.component(k))
            off += f.target.module(k).ngens
        comps[k] = cols
    return ChainMap(src, tgt, comps)


def cone(f: ChainMap) -> Triangle:
    """Mapping cone with its canonical maps ``B -> C`` and ``C -> A[1]``."""
    A, B = f.source, f.target
    ring = A.ring
    p = ring.char
    one = ring.ambient.zero_exp
    degrees = sorted({k - 1 for k in A.terms} | set(B.terms))
    terms, diffs = {}, {}
    for k in degrees:
        terms[k] = A.module(k + 1).direct_sum(B.module(k))
    for k in degrees:
        na = A.module(k + 1).ngens
        nb = B.module(k).ngens
        na1 = A.module(k + 2).ngens
        cols = []
        dA = A.diff(k + 1)
        fk = f.component(k + 1)
        for i in range(na):
            col = {(t[0], t[1]): (-c) % p for t, c in dA[i].items()}
            col = vec_add(col, vec_shift(fk[i], na1), p)
            cols.append(col)
        dB = B.diff(k)
        for i in range(nb):
            cols.append(vec_shift(dB[i], na1))
        diffs[k] = cols
    C = Complex(ring, terms, diffs)
    g = ChainMap(B, C, {k: [{(A.module(k + 1).ngens + i, one): 1} for i in range(M.ngens)]
                        for k, M in B.terms.items()})
    A1 = shift(A, 1)
    h = ChainMap(C, A1, {k: [{(i, one): 1} for i in range(A.module(k + 1).ngens)]
                         + [{} for _ in range(B.module(k).ngens)] for k in C.terms})
    return Triangle(A, B, C, f, g, h)


def cocone(f: ChainMap):
    """``cone(f)[-1]`` with its projection to the source of ``f``.

    Returns ``(K, K -> A)``; ``K -> A -> B -> K[1]`` is distinguished.
    """
    T = cone(f)
    K = shift(T.C, -1)
    one = f.source.ring.ambient.zero_exp
    proj = ChainMap(K, f.source, {k: [{(i, one): 1} for i in range(f.source.module(k).ngens)]
                                  + [{} for _ in range(f.target.module(k - 1).ngens)] for k in K.terms})
    return K, proj


# --------------------------------------------------------------------------
# cohomology and truncations


def cycles(C: Complex, k: int) -> list:
    M = C.module(k)
    if not M.ngens:
        return []
    N = C.module(k + 1)
    if not N.ngens:
        one = C.ring.ambient.zero_exp
        return [{(i, one): 1} for i in range(M.ngens)]
    return kernel_raw(C.diff(k), N.ngens, N.rels, C.ring)


def cohomology_with_map(C: Complex, k: int):
    """``H^k(C)`` and the matrix of its generators in ``C^k``."""
    Z = cycles(C, k)
    M = C.module(k)
    Z = [z for z in Z if not M.contains_zero(z)]
    B = C.diff(k - 1)
    H = PresentedModule(C.ring, len(Z), kernel_raw(Z, M.ngens, list(M.rels) + list(B), C.ring)) if Z \
        else PresentedModule.zero(C.ring)
    H2, to_new, from_new = H.prune()
    p = C.ring.char
    return H2, compose(Z, from_new, p)


def cohomology_module(C: Complex, k: int) -> PresentedModule:
    return cohomology_with_map(C, k)[0]


def is_acyclic(C: Complex) -> bool:
    return all(cohomology_module(C, k).is_zero() for k in C.terms)


def nonzero_cohomology(C: Complex) -> list:
    return [k for k in C.terms if not cohomology_module(C, k).is_zero()]


def cohomology_amplitude(C: Complex):
    ks = nonzero_cohomology(C)
    return (min(ks), max(ks)) if ks else None


def quasi_iso_check(f: ChainMap) -> bool:
    return is_acyclic(cone(f).C)


def standard_truncate(C: Complex, n: int, side: str):
    """Smart truncation.

    ``side="<="`` returns ``(τ_{≤n} C, τ_{≤n} C -> C)``; ``side=">="`` returns
    ``(τ_{≥n} C, C -> τ_{≥n} C)``.
    """
    ring = C.ring
    one = ring.ambient.zero_exp
    if side in ("<=", "leq", "≤"):
        if C.hi is None or n >= C.hi:
            return C, ChainMap.identity(C)
        M = C.module(n)
        Z = [z for z in cycles(C, n) if not M.contains_zero(z)]
        K = PresentedModule(ring, len(Z), kernel_raw(Z, M.ngens, M.rels, ring)) if Z \
            else PresentedModule.zero(ring)
        terms = {k: Mk for k, Mk in C.terms.items() if k < n}
        terms[n] = K
        diffs = {k: d for k, d in C.diffs.items() if k < n - 1}
        into = None
        if n - 1 in C.terms and Z:
            into = lift(C.diff(n - 1), Z, M)
            diffs[n - 1] = into
        T = Complex(ring, terms, diffs)
        comps = {k: identity_matrix(Mk.ngens, one) for k, Mk in T.terms.items() if k < n}
        comps[n] = Z
        return T, ChainMap(T, C, comps)
    if side in (">=", "geq", "≥"):
        if C.lo is None or n <= C.lo:
            return C, ChainMap.identity(C)
        M = C.module(n)
        Q = PresentedModule(ring, M.ngens, list(M.rels) + list(C.diff(n - 1)))
        terms = {k: Mk for k, Mk in C.terms.items() if k > n}
        terms[n] = Q
        diffs = {k: d for k, d in C.diffs.items() if k >= n}
        T = Complex(ring, terms, diffs)
        comps = {k: identity_matrix(Mk.ngens, one) for k, Mk in C.terms.items() if k >= n}
        return T, ChainMap(C, T, comps)
    raise ValueError(f"unknown truncation side {side!r}")


def brutal_truncate_above(C: Complex, n: int) -> Complex:
    """``σ_{≥n}``: drop every term below ``n``."""
    return Complex(C.ring, {k: M for k, M in C.terms.items() if k >= n},
                   {k: d for k, d in C.diffs.items() if k >= n})


def prune_complex(C: Complex):
    """Minimize every presentation; returns ``(C', C -> C', C' -> C)``."""
    p = C.ring.char
    terms, to, frm = {}, {}, {}
    for k, M in C.terms.items():
        terms[k], to[k], frm[k] = M.prune()
    diffs = {k: compose(to[k + 1], compose(d, frm[k], p), p) for k, d in C.diffs.items()}
    D = Complex(C.ring, terms, diffs)
    return D, ChainMap(C, D, to), ChainMap(D, C, frm)


def cancel_units(C: Complex):
    """Gaussian elimination of unit entries of ``d`` between free generators.

    Returns ``(C', C -> C', C' -> C)``, a homotopy equivalence.
    """
    ring = C.ring
    one = ring.ambient.zero_exp
    cur = C
    to_maps = []
    from_maps = []
    while True:
        found = None
        for k, d in cur.diffs.items():
            src, tgt = cur.module(k), cur.module(k + 1)
            bound_src = {i for r in src.rels for (i, _) in r}
            bound_tgt = {i for r in tgt.rels for (i, _) in r}
            for j, col in enumerate(d):
                if j in bound_src:
                    continue
                for (i, e), c in sorted(col.items()):
                    if e == one and i not in bound_tgt and all(
                            f == one for (ii, f) in col if ii == i):
                        found = (k, j, i, c)
                        break
                if found:
                    break
            if found:
                break
        if not found:
            break
        k, j, i, u = found
        nxt, to_m, from_m = _cancel_pair(cur, k, j, i, u)
        to_maps.append(to_m)
        from_maps.append(from_m)
        cur = nxt
    to_total = ChainMap.identity(C)
    for m in to_maps:
        to_total = m * to_total
    from_total = ChainMap.identity(cur)
    for m in reversed(from_maps):
        from_total = m * from_total
    return cur, ChainMap(C, cur, to_total.comps), ChainMap(cur, C, from_total.comps)


def _cancel_pair(C: Complex, k: int, j: int, i: int, u: int):
    """Remove free generators ``e_j`` of ``C^k`` and ``f_i`` of ``C^{k+1}`` with ``d e_j = u f_i + ...``."""
    ring = C.ring
    p = ring.char
    one = ring.ambient.zero_exp
    inv = pow(u, p - 2, p)
    d = C.diff(k)
    dj = d[j]                                   # d(e_j) in C^{k+1}
    row_i = [{e: c for (ii, e), c in col.items() if ii == i} for col in d]  # coefficient of f_i in d(e_m)

    def drop(v, idx):
        return {((a - 1) if a > idx else a, e): c for (a, e), c in v.items() if a != idx}

    def polymul_vec(poly, v, coef):
        out = {}
        for (a, e2), c2 in v.items():
            for e1, c1 in poly.items():
                t = (a, tuple(x + y for x, y in zip(e1, e2)))
                out[t] = (out.get(t, 0) + coef * c1 * c2) % p
        return {t: c for t, c in out.items() if c}

    terms = dict(C.terms)
    Mk, Mk1 = C.module(k), C.module(k + 1)
    # generator e_j and f_i are free, so relations never mention them
    terms[k] = PresentedModule(ring, Mk.ngens - 1, [drop(r, j) for r in Mk.rels])
    terms[k + 1] = PresentedModule(ring, Mk1.ngens - 1, [drop(r, i) for r in Mk1.rels])
    diffs = dict(C.diffs)
    # d'^k(e_m) = d(e_m) - row_i(m) u^{-1} d(e_j), then drop f_i
    newd = []
    for m, col in enumerate(d):
        if m == j:
            continue
        v = vec_add(col, polymul_vec(row_i[m], dj, -inv), p) if row_i[m] else col
        newd.append(drop(v, i))
    diffs[k] = newd
    # into degree k: drop coordinate j after correcting by the homotopy
    if k - 1 in C.diffs:
        # the component of d^{k-1} along e_j is killed by substitution
        dprev = C.diff(k - 1)
        fixed = []
        for col in dprev:
            fixed.append(drop(col, j))
        diffs[k - 1] = fixed
    # out of degree k+1: columns lose f_i
    if k + 1 in C.diffs:
        dn = C.diff(k + 1)
        diffs[k + 1] = [c for m, c in enumerate(dn) if m != i]
    D = Complex(ring, terms, diffs)
    # projection C -> D
    to = {}
    for deg, M in C.terms.items():
        if deg == k:
            to[deg] = [drop({(m, one): 1}, j) if m != j else {} for m in range(M.ngens)]
        elif deg == k + 1:
            # f_i  ->  -u^{-1} * (d'-correction):  f_i = u^{-1}(d e_j - rest)
            cols = []
            rest = drop({t: c for t, c in dj.items() if t[0] != i}, i)
            for m in range(M.ngens):
                if m == i:
                    cols.append({t: (-c * inv) % p for t, c in rest.items()})
                else:
                    cols.append(drop({(m, one): 1}, i))
            to[deg] = cols
        else:
            to[deg] = identity_matrix(M.ngens, one)
    frm = {}
    for deg, M in D.terms.items():
        if deg == k:
            # e_m -> e_m - row_i(m) u^{-1} e_j
            cols = []
            for m in range(M.ngens):
                old = m if m < j else m + 1
                v = {(old, one): 1}
                if row_i[old]:
                    v = vec_add(v, {(j, e): (-c * inv) % p for e, c in row_i[old].items()}, p)
                cols.append(v)
            frm[deg] = cols
        elif deg == k + 1:
            frm[deg] = [{((m if m < i else m + 1), one): 1} for m in range(M.ngens)]
        else:
            frm[deg] = identity_matrix(M.ngens, one)
    return D, ChainMap(C, D, to), ChainMap(D, C, frm)


def minimize(C: Complex):
    """Prune presentations then cancel unit differentials.

    Returns ``(C', C -> C', C' -> C)``; both maps are quasi-isomorphisms.
    """
    D, to1, fr1 = prune_complex(C)
    E, to2, fr2 = cancel_units(D)
    return E, to2 * to1, fr1 * fr2


def truncate_map(f: ChainMap, n: int, side: str) -> ChainMap:
    """``tau_{<=n} f`` or ``tau_{>=n} f`` between the truncations built by ``standard_truncate``."""
    ring = f.source.ring
    p = ring.char
    Ts, is_ = standard_truncate(f.source, n, side)
    Tt, it = standard_truncate(f.target, n, side)
    comps = {}
    if side in ("<=", "leq", "≤"):
        for k in Ts.terms:
            if k < n:
                comps[k] = f.component(k)
            elif k == n:
                img = compose(f.component(k), is_.component(k), p)
                comps[k] = lift(img, it.component(k), f.target.module(k)) if k in Tt.terms else []
        return ChainMap(Ts, Tt, comps)
    for k in Ts.terms:
        comps[k] = f.component(k)
    return ChainMap(Ts, Tt, comps)


def induced_on_cohomology(f: ChainMap, k: int) -> ModuleMap:
    """``H^k(f)`` on the presentations returned by ``cohomology_with_map``."""
    p = f.source.ring.char
    Hs, Zs = cohomology_with_map(f.source, k)
    Ht, Zt = cohomology_with_map(f.target, k)
    if not Hs.ngens:
        return ModuleMap(Hs, Ht, [])
    img = compose(f.component(k), Zs, p)
    if not Ht.ngens:
        return ModuleMap(Hs, Ht, [{} for _ in img])
    cols = list(Zt) + list(f.target.diff(k - 1))
    sols = lift(img, cols, f.target.module(k))
    return ModuleMap(Hs, Ht, [vec_restrict(s, 0, len(Zt)) for s in sols])
