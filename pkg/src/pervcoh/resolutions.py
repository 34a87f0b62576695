"""Windowed free approximations and the functors built on them.

Over a singular ring most free resolutions are infinite, so everything here
works in a degree window.  ``free_approximation(C, lo)`` returns a free
complex ``P`` living in degrees ``[lo - 1, top]`` and a chain map ``P -> C``
whose cone is acyclic in degrees ``>= lo - 1``; ``P`` agrees with the brutal
truncation of a full resolution, so ``H^k(P) = H^k(C)`` for ``k >= lo``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    Complex,
    ChainMap,
    standard_truncate,
    cohomology_with_map,
)
from .errors import SpaceError, WindowError
from .groebner import (
    QuotientRing,
    GroebnerBasis,
    ideal_gb,
    kernel_raw,
    normal_form_raw,
    vec_add,
    vec_restrict,
    vec_shift,
    vec_combination,
)
from .modules import (
    PresentedModule,
    lift,
    minimal_generators,
)


@dataclass
class FreeApproximation:
    """``phi: P -> target``, a cohomology isomorphism in degrees ``>= lo``."""

    lo: int
    hi: int
    P: Complex
    phi: ChainMap

    @property
    def target(self) -> Complex:
        return self.phi.target


def free_approximation(C: Complex, lo: int, hi: int | None = None) -> FreeApproximation:
    """Free complex ``P`` and ``P -> C``, exact on cohomology in degrees ``>= lo``.

    Built from the top degree down by killing cycles of the cone, one degree
    at a time, down to degree ``lo - 1``.  A complex that is already free is
    returned with the identity.
    """
    ring = C.ring
    one = ring.ambient.zero_exp
    if hi is None:
        hi = C.hi if C.hi is not None else lo
    if C.hi is None:
        Z = Complex.zero(ring)
        return FreeApproximation(lo, hi, Z, ChainMap(Z, C))
    if C.is_free() and C.hi <= hi:
        return FreeApproximation(lo, hi, C, ChainMap.identity(C))
    source = C
    incl = None
    if C.hi > hi:
        source, incl = standard_truncate(C, hi, "<=")
    p = ring.char
    ranks: dict = {}
    dP: dict = {}
    phi: dict = {}
    top = source.hi
    for k in range(top, lo - 2, -1):
        n1 = ranks.get(k + 1, 0)
        n2 = ranks.get(k + 2, 0)
        Ck, Ck1 = source.module(k), source.module(k + 1)
        # cone^k -> cone^{k+1}: (q, c) -> (-dq, phi q + d c)
        cols = []
        for i in range(n1):
            v = {t: (-c) % p for t, c in dP.get(k + 1, [])[i].items()} if k + 1 in dP else {}
            v = vec_add(v, vec_shift(phi.get(k + 1, [{}] * n1)[i], n2), p)
            cols.append(v)
        for col in source.diff(k):
            cols.append(vec_shift(col, n2))
        tgt_rank = n2 + Ck1.ngens
        tgt_rels = [vec_shift(r, n2) for r in Ck1.rels]
        if not cols:
            continue
        Z = kernel_raw(cols, tgt_rank, tgt_rels, ring) if tgt_rank else \
            [{(i, one): 1} for i in range(len(cols))]
        ambient = PresentedModule(ring, n1 + Ck.ngens, [vec_shift(r, n1) for r in Ck.rels])
        base = [vec_shift(col, n1) for col in source.diff(k - 1)]
        gens = minimal_generators(Z, base, ambient)
        if not gens:
            continue
        ranks[k] = len(gens)
        dcols, pcols = [], []
        for g in gens:
            q = vec_restrict(g, 0, n1)
            c = vec_restrict(g, n1, n1 + Ck.ngens)
            if c:
                dcols.append({t: (-a) % p for t, a in q.items()})
                pcols.append(c)
            else:
                dcols.append(q)
                pcols.append({})
        dP[k] = dcols
        phi[k] = pcols
    terms = {k: PresentedModule.free(ring, n) for k, n in ranks.items()}
    P = Complex(ring, terms, {k: v for k, v in dP.items() if k + 1 in terms})
    f = ChainMap(P, source, phi)
    if incl is not None:
        f = incl * f
    return FreeApproximation(lo, hi, P, f)


@dataclass
class Resolution:
    """Exact replacement ``tau_{>=lo} P -> C`` of a complex living in degrees ``>= lo``.

    ``P`` is a free approximation, so every term of ``Q`` is free except the
    bottom one, a cokernel.
    """

    lo: int
    approx: FreeApproximation
    Q: Complex
    to_Q: ChainMap     # P -> Q
    phi: ChainMap      # Q -> C (quasi-isomorphism)


def resolve(C: Complex, lo: int) -> Resolution:
    if C.lo is not None and lo > C.lo:
        raise WindowError(f"resolution floor {lo} above the lowest term {C.lo}")
    A = free_approximation(C, lo)
    Q, to_Q = standard_truncate(A.P, lo, ">=")
    phi = ChainMap(Q, C, {k: A.phi.component(k) for k in Q.terms})
    return Resolution(lo, A, Q, to_Q, phi)


def lift_to_approximation(g: ChainMap, A: FreeApproximation):
    """Lift ``g: X -> Y`` (``X`` free) through ``A.phi: P -> Y``.

    Returns ``(g_hat, h)`` with ``phi ∘ g_hat - g = h d - d h`` in every degree
    ``>= A.lo - 1`` of ``X``; lower components are left zero.  The source
    is brutally truncated accordingly.
    """
    X = g.source
    Y = g.target
    P = A.P
    phi = A.phi
    ring = X.ring
    p = ring.char
    floor = A.lo - 1
    Xt = Complex(ring, {k: M for k, M in X.terms.items() if k >= floor},
                 {k: d for k, d in X.diffs.items() if k >= floor})
    if not all(M.is_free for M in Xt.terms.values()):
        raise ValueError("lifting needs a free source")
    ghat: dict = {}
    hom: dict = {}
    for k in sorted(Xt.terms, reverse=True):
        nP1 = P.module(k + 1).ngens
        nPk = P.module(k).ngens
        Yk, Yk1 = Y.module(k), Y.module(k - 1)
        dX = Xt.diff(k)
        targets = []
        for e in range(Xt.module(k).ngens):
            de = dX[e]
            a = vec_combination(ghat.get(k + 1, []), de, p) if de and k + 1 in ghat else {}
            a = {t: (-c) % p for t, c in a.items()}
            b = g.component(k)[e] if k in g.comps else {}
            if de and k + 1 in hom:
                b = vec_add(b, vec_combination(hom[k + 1], de, p), p, -1)
            targets.append(vec_add(a, vec_shift(b, nP1), p))
        # d_cone : cone^{k-1} = P^k ⊕ Y^{k-1} -> cone^k = P^{k+1} ⊕ Y^k
        cols = []
        dPk = P.diff(k)
        phik = phi.component(k)
        for i in range(nPk):
            v = {t: (-c) % p for t, c in dPk[i].items()}
            cols.append(vec_add(v, vec_shift(phik[i], nP1), p))
        for col in Y.diff(k - 1):
            cols.append(vec_shift(col, nP1))
        tgt = PresentedModule(ring, nP1 + Yk.ngens, [vec_shift(r, nP1) for r in Yk.rels])
        sols = lift(targets, cols, tgt)
        ghat[k] = [vec_restrict(s, 0, nPk) for s in sols]
        hom[k] = [vec_restrict(s, nPk, nPk + Yk1.ngens) for s in sols]
    G = ChainMap(Xt, P, ghat)
    return G, hom


# --------------------------------------------------------------------------
# Hom complexes


class HomComplex:
    """``Hom(P, Y)`` for a free complex ``P``, in degrees ``[klo, khi]``.

    Generators of degree ``k`` are triples ``(j, c, g)``: the map sending
    basis element ``c`` of ``P^j`` to generator ``g`` of ``Y^{j+k}``.
    Differential ``D phi = d_Y phi - (-1)^k phi d_P``.
    """

    def __init__(self, P: Complex, Y: Complex, klo: int, khi: int):
        if not P.is_free():
            raise ValueError("Hom complexes need a free first argument")
        self.P, self.Y = P, Y
        self.klo, self.khi = klo, khi
        ring = P.ring
        self.ring = ring
        p = ring.char
        self.layout: dict = {}     # k -> list of (j, n_j, g, offset)
        terms = {}
        for k in range(klo, khi + 1):
            blocks = []
            off = 0
            M = PresentedModule.zero(ring)
            for j in sorted(P.terms):
                Yjk = Y.module(j + k)
                if not Yjk.ngens:
                    continue
                nj = P.module(j).ngens
                blocks.append((j, nj, Yjk.ngens, off))
                M = M.direct_sum(Yjk.power(nj))
                off += nj * Yjk.ngens
            self.layout[k] = blocks
            if M.ngens:
                terms[k] = M
        diffs = {}
        for k in range(klo, khi):
            if k not in terms or k + 1 not in terms:
                continue
            sign = -1 if k % 2 else 1
            nxt = {j: (nj, g, off) for j, nj, g, off in self.layout[k + 1]}
            cols = []
            for j, nj, g, off in self.layout[k]:
                dY = Y.diff(j + k)
                dProws = _rows(P.diff(j - 1), nj) if j - 1 in P.terms else None
                for c in range(nj):
                    for gi in range(g):
                        col = {}
                        if j in nxt:
                            _, g2, off2 = nxt[j]
                            for (gg, e), a in dY[gi].items():
                                col[(off2 + c * g2 + gg, e)] = a
                        if dProws is not None and (j - 1) in nxt:
                            _, g2, off2 = nxt[j - 1]
                            for cp, poly in dProws[c]:
                                for e, a in poly.items():
                                    t = (off2 + cp * g2 + gi, e)
                                    col[t] = (col.get(t, 0) - sign * a) % p
                        cols.append({t: a for t, a in col.items() if a})
            diffs[k] = cols
        self.complex = Complex(ring, terms, diffs)

    def index(self, k, j, c, g):
        for jj, nj, gg, off in self.layout[k]:
            if jj == j:
                return off + c * gg + g
        raise KeyError((k, j, c, g))

    def precompose(self, alpha: ChainMap, other: "HomComplex") -> ChainMap:
        """``Hom(alpha, Y): self -> other`` where ``alpha: other.P -> self.P``."""
        p = self.ring.char
        comps = {}
        for k, M in self.complex.terms.items():
            if k not in other.complex.terms:
                continue
            tgt = {j: (nj, g, off) for j, nj, g, off in other.layout[k]}
            cols = []
            for j, nj, g, off in self.layout[k]:
                rows = _rows(alpha.component(j), nj) if j in tgt else None
                for c in range(nj):
                    for gi in range(g):
                        col = {}
                        if rows is not None:
                            _, g2, off2 = tgt[j]
                            for cp, poly in rows[c]:
                                for e, a in poly.items():
                                    col[(off2 + cp * g2 + gi, e)] = a % p
                        cols.append(col)
            comps[k] = cols
        return ChainMap(self.complex, other.complex, comps)

    def postcompose(self, beta: ChainMap, other: "HomComplex") -> ChainMap:
        """``Hom(P, beta): self -> other`` where ``beta: self.Y -> other.Y``."""
        comps = {}
        for k, M in self.complex.terms.items():
            if k not in other.complex.terms:
                continue
            tgt = {j: (nj, g, off) for j, nj, g, off in other.layout[k]}
            cols = []
            for j, nj, g, off in self.layout[k]:
                bcols = beta.component(j + k)
                for c in range(nj):
                    for gi in range(g):
                        col = {}
                        if j in tgt:
                            _, g2, off2 = tgt[j]
                            for (gg, e), a in bcols[gi].items():
                                col[(off2 + c * g2 + gg, e)] = a
                        cols.append(col)
            comps[k] = cols
        return ChainMap(self.complex, other.complex, comps)


def _rows(cols, nrows):
    """Transpose a sparse column matrix into rows of ``(column, poly)``."""
    rows = [[] for _ in range(nrows)]
    for ci, col in enumerate(cols):
        per = {}
        for (r, e), a in col.items():
            per.setdefault(r, {})[e] = a
        for r, poly in per.items():
            rows[r].append((ci, poly))
    return rows


def unit_complex(ring: QuotientRing) -> Complex:
    return Complex(ring, {0: PresentedModule.free(ring, 1)})


def counit_map(H: HomComplex) -> ChainMap:
    """``Hom(B, F) -> F`` induced by ``R -> B^0`` (first generator).

    ``B`` must be a free approximation of a cyclic module whose degree-0
    generator 0 maps to the module generator.
    """
    ring = H.ring
    one = ring.ambient.zero_exp
    R0 = unit_complex(ring)
    eps = ChainMap(R0, H.P, {0: [{(0, one): 1}]})
    H0 = HomComplex(R0, H.Y, H.klo, H.khi)
    pre = H.precompose(eps, H0)
    # Hom(R[0], Y) is Y itself with identical generators and differentials;
    # the map is a chain map below the top degree of the window
    return ChainMap(H.complex, H.Y, dict(pre.comps))


def rhom_window(F: Complex, G: Complex, lo: int, hi: int) -> list:
    """``[(k, H^k RHom(F, G))]`` for ``lo <= k <= hi``.

    ``F`` is freely approximated down to ``G.lo - hi - 2`` so that the
    discarded tail only reaches degrees above ``hi + 1``.
    """
    ring = F.ring
    if F.hi is None or G.hi is None:
        return [(k, PresentedModule.zero(ring)) for k in range(lo, hi + 1)]
    A = free_approximation(F, G.lo - hi - 2)
    H = HomComplex(A.P, G, lo - 1, hi + 1)
    from .complexes import cohomology_module
    return [(k, cohomology_module(H.complex, k)) for k in range(lo, hi + 1)]


def rhom_truncated(F: Complex, G: Complex, n: int):
    """``tau_{<=n} RHom(F, G)`` as a strict complex, plus its Hom-complex data."""
    lo_p = G.lo - n - 2
    A = free_approximation(F, lo_p)
    klo = G.lo - (A.P.hi if A.P.hi is not None else 0)
    H = HomComplex(A.P, G, min(klo, n), n + 1)
    T, incl = standard_truncate(H.complex, n, "<=")
    return A, H, T, incl


# --------------------------------------------------------------------------
# generic ranks and stalks


def rank_over_domain(cols, nrows: int, prime_gb: GroebnerBasis) -> int:
    """Rank over ``Frac(S/prime)`` of a matrix given by sparse columns.

    Fraction-free elimination with zero tests by normal form; meeting a
    zero divisor means the declared ideal is not prime.
    """
    p = prime_gb.ring.char

    def nf(f):
        if not f:
            return {}
        v = normal_form_raw({(0, e): c for e, c in f.items()}, prime_gb)
        return {e: c for (_, e), c in v.items()}

    def mul(f, g):
        out = {}
        for e1, c1 in f.items():
            for e2, c2 in g.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return {e: c for e, c in out.items() if c}

    def sub(f, g):
        out = dict(f)
        for e, c in g.items():
            x = (out.get(e, 0) - c) % p
            if x:
                out[e] = x
            else:
                out.pop(e, None)
        return out

    rows = [[{} for _ in range(len(cols))] for _ in range(nrows)]
    for ci, col in enumerate(cols):
        for (r, e), a in col.items():
            rows[r][ci][e] = a
    rows = [[nf(f) for f in row] for row in rows]
    rows = [r for r in rows if any(r)]
    rank = 0
    ncols = len(cols)
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        a = prow[c]
        for i in range(rank + 1, len(rows)):
            b = rows[i][c]
            if not b:
                continue
            new = []
            for j in range(ncols):
                x = nf(mul(a, rows[i][j])) if rows[i][j] else {}
                if rows[i][j] and not x:
                    raise SpaceError("zero divisor met during generic rank computation: ideal is not prime")
                y = nf(mul(b, prow[j])) if prow[j] else {}
                new.append(nf(sub(x, y)))
            rows[i] = new
        rank += 1
    return rank


def module_generic_rank(M: PresentedModule, prime_gb: GroebnerBasis) -> int:
    """``dim_{Frac(R/p)} M ⊗ Frac(R/p)`` = generators minus relation rank."""
    return M.ngens - rank_over_domain(M.rels, M.ngens, prime_gb)


def prime_basis(ring: QuotientRing, gens) -> GroebnerBasis:
    """Groebner basis in ``S`` of the lift ``p + I`` of an ideal of ``R``."""
    return ideal_gb(list(gens) + list(ring.ideal), ring.ambient)


def stalk_ranks(C: Complex, prime_gb: GroebnerBasis, lo: int) -> dict:
    """``{k: dim H^k(C ⊗^L κ(p))}`` for ``lo <= k <= top``.

    ``prime_gb`` is the basis of ``p + I`` in the ambient ring.
    """
    if C.hi is None:
        return {}
    A = free_approximation(C, lo)
    P = A.P
    ranks = {}
    drank = {}
    for k in range(lo - 1, P.hi + 1 if P.hi is not None else lo):
        if k in P.terms and k + 1 in P.terms:
            drank[k] = rank_over_domain(P.diff(k), P.module(k + 1).ngens, prime_gb)
        else:
            drank[k] = 0
    for k in range(lo, (P.hi if P.hi is not None else lo - 1) + 1):
        n = P.module(k).ngens
        ranks[k] = n - drank.get(k, 0) - drank.get(k - 1, 0)
    return ranks


def stalk_complex(C: Complex, point, lo: int, hi: int | None = None) -> list:
    """``[(k, generic rank of H^k(C ⊗^L κ(x)))]`` for ``lo <= k <= hi``.

    Degrees above the top term of ``C`` are zero by right exactness.
    """
    gb = point.gb if hasattr(point, "gb") else point
    top = C.hi if C.hi is not None else lo - 1
    if hi is None:
        hi = max(top, lo)
    ranks = stalk_ranks(C, gb, lo)
    return [(k, ranks.get(k, 0)) for k in range(lo, hi + 1)]


# --------------------------------------------------------------------------
# finite length


def vector_space_dimension(M: PresentedModule):
    """``dim_k M`` when finite, else ``None`` (counts standard monomials)."""
    if M.ngens == 0:
        return 0
    gb = M.gb()
    n = M.ring.ambient.nvars
    total = 0
    for comp in range(M.ngens):
        leads = [e for (c, e) in gb.leads if c == comp]
        # finite iff every variable has a pure power among the leads
        bounds = []
        for v in range(n):
            pure = [e[v] for e in leads if all(e[w] == 0 for w in range(n) if w != v) and e[v] > 0]
            if not pure and not any(sum(e) == 0 for e in leads):
                return None
            bounds.append(min(pure) if pure else 0)
        if any(sum(e) == 0 for e in leads):
            continue
        total += _count_standard(leads, bounds)
    return total


def _count_standard(leads, bounds):
    import itertools
    count = 0
    for e in itertools.product(*(range(b) for b in bounds)):
        if not any(all(a >= b for a, b in zip(e, l)) for l in leads):
            count += 1
    return count


# --------------------------------------------------------------------------
# sections with supports (advisory)


@dataclass
class GammaDegree:
    """``Ext^k(R/J^t, C)`` for ``t = 1..cutoff`` with the transition maps between them."""

    degree: int
    modules: list
    transitions: list
    stabilized: bool
    stable_from: int | None

    @property
    def module(self) -> PresentedModule:
        return self.modules[-1]

    @property
    def lengths(self) -> list:
        return [vector_space_dimension(M) for M in self.modules]


def _ideal_power(gens, t: int, ring: QuotientRing) -> list:
    out = [ring.ambient.const(1)]
    for _ in range(t):
        out = [ring.reduce(a * b) for a in out for b in gens]
        out = [g for g in out if g]
    gb = ideal_gb(out + list(ring.ideal), ring.ambient)
    return [ring.reduce(g) for g in gb.polys() if ring.reduce(g)]


def gamma_sections_oracle(C: Complex, J, lo: int, hi: int, cutoff: int) -> list:
    """Approximate ``H^k R Gamma_J(C)`` as the colimit of ``Ext^k(R/J^t, C)``.

    A degree counts as stabilized once two consecutive transition maps are
    isomorphisms.  This is a heuristic; nothing downstream relies on it.
    """
    from .complexes import induced_on_cohomology
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    ring = C.ring
    J = [ring.parse(g) if isinstance(g, str) else g for g in J]
    J = [g for g in J if g]
    if ideal_gb(J + list(ring.ideal), ring.ambient).is_unit():
        raise ValueError("J must be a proper ideal")
    if C.hi is None:
        Z = PresentedModule.zero(ring)
        return [GammaDegree(k, [Z] * cutoff, [], True, 1) for k in range(lo, hi + 1)]
    depth = C.lo - hi - 2
    homs, approx = [], []
    for t in range(1, cutoff + 1):
        M = PresentedModule.cyclic(ring, _ideal_power(J, t, ring))
        A = free_approximation(Complex.concentrated(M, 0), depth)
        approx.append(A)
        homs.append(HomComplex(A.P, C, lo - 1, hi + 1))
    maps = []
    one = ring.ambient.zero_exp
    for t in range(1, cutoff):
        src, tgt = approx[t], approx[t - 1]
        surj = ChainMap(src.phi.target, tgt.phi.target, {0: [{(0, one): 1}]})
        shat, _ = lift_to_approximation(surj * src.phi, tgt)
        maps.append(homs[t - 1].precompose(shat, homs[t]))
    out = []
    for k in range(lo, hi + 1):
        mods = [cohomology_with_map(H.complex, k)[0] for H in homs]
        trans = [induced_on_cohomology(m, k) for m in maps]
        iso = [T.is_isomorphism() for T in trans]
        stable_from = None
        for i in range(len(iso) - 1):
            if iso[i] and iso[i + 1]:
                stable_from = i + 1
                break
        out.append(GammaDegree(k, mods, trans, stable_from is not None, stable_from))
    return out
