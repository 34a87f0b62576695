"""Duality over a Cohen-Macaulay quotient ``R = S/I``.

The dualizing complex is ``W = omega[d]``: the canonical module placed in
degree ``-d``.  ``D(F) = RHom(F, W)`` is computed from a free approximation
of ``F`` deep enough that the discarded tail only touches degrees above the
amplitude ``[-d - b, -a]`` of the answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (
    Complex,
    ChainMap,
    cohomology_with_map,
    standard_truncate,
)
from .errors import NotCohenMacaulay, WindowError
from .groebner import QuotientRing, krull_dimension, vec_combination
from .modules import PresentedModule, lift
from .resolutions import (
    FreeApproximation,
    HomComplex,
    free_approximation,
    lift_to_approximation,
)


@dataclass
class DualizingData:
    ring: QuotientRing
    n: int
    d: int
    omega: PresentedModule
    certificate: list = field(default_factory=list)   # (j, Ext^j vanishes)

    @property
    def gorenstein(self) -> bool:
        return self.omega.ngens == 1 and not self.omega.rels

    def complex(self) -> Complex:
        """``omega[d]``."""
        return Complex.concentrated(self.omega, -self.d)


_DD_CACHE: dict = {}


def canonical_module(R: QuotientRing) -> DualizingData:
    """``omega = Ext^{n-d}_S(R, S)``, rejecting rings with more than one nonzero Ext."""
    key = R
    if key in _DD_CACHE:
        return _DD_CACHE[key]
    S = R.ambient
    n = S.nvars
    d = krull_dimension(list(R.ideal), S) if R.ideal else n
    if R.is_polynomial:
        dd = DualizingData(R, n, n, PresentedModule.free(R, 1), [(j, j != 0) for j in range(n + 1)])
        _DD_CACHE[key] = dd
        return dd
    Sq = QuotientRing(S)
    RS = PresentedModule.cyclic(Sq, list(R.ideal))
    A = free_approximation(Complex.concentrated(RS, 0), -n - 1)
    F = A.P
    # Hom(F, S): degree j holds S^{rank F^{-j}}, differential the transpose
    terms, diffs = {}, {}
    for k, M in F.terms.items():
        terms[-k] = PresentedModule.free(Sq, M.ngens)
    for k in F.terms:
        if k - 1 in F.terms:
            dcols = F.diff(k - 1)          # F^{k-1} -> F^k
            cols = [{} for _ in range(F.module(k).ngens)]
            for c, col in enumerate(dcols):
                for (r, e), a in col.items():
                    cols[r][(c, e)] = a
            diffs[-k] = cols
    Hc = Complex(Sq, terms, diffs)
    cert = []
    nonzero = []
    ext = {}
    for j in range(0, n + 1):
        Mj, _ = cohomology_with_map(Hc, j)
        z = Mj.is_zero()
        cert.append((j, z))
        if not z:
            nonzero.append(j)
            ext[j] = Mj
    if nonzero != [n - d]:
        raise NotCohenMacaulay(nonzero)
    E = ext[n - d]
    omega = PresentedModule(R, E.ngens, E.rels)
    omega, _, _ = omega.prune()
    dd = DualizingData(R, n, d, omega, cert)
    _DD_CACHE[key] = dd
    return dd


def dimension_of_point(gens, ring: QuotientRing) -> int:
    """Krull dimension of ``R/p`` for ``p`` given by generators in ``R``."""
    polys = [g for g in gens if g] + list(ring.ideal)
    return krull_dimension(polys, ring.ambient)


# --------------------------------------------------------------------------
# the dual complex with its construction data


@dataclass
class DualTerms:
    """``D(F) = tau_{<=-a} Hom(P, W)`` together with the pieces that built it."""

    F: Complex
    a: int
    approx: FreeApproximation
    hom: HomComplex
    E: Complex
    incl: ChainMap           # E -> hom.complex


def dual_terms(F: Complex, dd: DualizingData, floor: int | None = None,
               depth: int | None = None) -> DualTerms:
    """``depth`` asks for an approximation of ``F`` at least that deep."""
    ring = F.ring
    W = dd.complex()
    if F.hi is None:
        Z = Complex.zero(ring)
        A = FreeApproximation(0, 0, Z, ChainMap(Z, F))
        H = HomComplex(Z, W, 0, 0)
        return DualTerms(F, 0, A, H, Z, ChainMap(Z, H.complex))
    a = F.lo if floor is None else floor
    lo = a - dd.d - 1 if depth is None else min(a - dd.d - 1, depth)
    A = free_approximation(F, lo)
    top = A.P.hi if A.P.hi is not None else F.hi
    H = HomComplex(A.P, W, -dd.d - top, -a + 1)
    E, incl = standard_truncate(H.complex, -a, "<=")
    return DualTerms(F, a, A, H, E, incl)


def dualize(F: Complex, dd: DualizingData) -> Complex:
    return dual_terms(F, dd).E


def dual_map(f: ChainMap, dd: DualizingData):
    """``D(f): D(B) -> D(A)`` for ``f: A -> B``, with both duals on a common window.

    Returns ``(DB, DA, Df)`` where ``DB`` and ``DA`` are the ``DualTerms``.
    """
    A, B = f.source, f.target
    if A.hi is None or B.hi is None:
        DA, DB = dual_terms(A, dd), dual_terms(B, dd)
        return DB, DA, ChainMap(DB.E, DA.E)
    a = min(A.lo, B.lo)
    DA = dual_terms(A, dd, floor=a)
    DB = dual_terms(B, dd, floor=a)
    fhat, _ = lift_to_approximation(f * DA.approx.phi, DB.approx)
    pre = DB.hom.precompose(fhat, DA.hom) * DB.incl
    return DB, DA, lift_into_truncation(pre, DA.E, DA.incl, -a)


def lift_into_truncation(g: ChainMap, T: Complex, incl: ChainMap, n: int) -> ChainMap:
    """Factor ``g: X -> Y`` through ``incl: tau_{<=n} Y -> Y``.

    ``g`` must vanish above ``n``; in degree ``n`` its image lies in the cycles.
    """
    comps = {}
    for k, M in g.source.terms.items():
        if k not in T.terms:
            if k > n and any(not g.target.module(k).contains_zero(v) for v in g.component(k)):
                raise WindowError(f"map does not factor through truncation at degree {k}")
            continue
        if k < n:
            comps[k] = g.component(k)
        else:
            comps[k] = lift(g.component(k), incl.component(k), g.target.module(k))
    return ChainMap(g.source, T, comps)


def evaluation_map(DF: DualTerms, AE: FreeApproximation, H2: HomComplex, d: int) -> ChainMap:
    """``P -> Hom(P_E, W)``: evaluation ``p |-> (psi |-> ±psi(p))`` pulled back along ``P_E -> E``.

    ``P`` is the approximation of ``F`` inside ``DF``; ``AE`` approximates ``DF.E``.
    """
    P = DF.approx.P
    H1 = DF.hom
    p = P.ring.char
    ng = H1.Y.module(-d).ngens
    comps = {}
    for j, Pj in P.terms.items():
        if j not in H2.complex.terms:
            continue
        i = -d - j
        blk2 = next((b for b in H2.layout[j] if b[0] == i), None)
        cols = [{} for _ in range(Pj.ngens)]
        if blk2 is not None and i in H1.layout:
            _, ni, _, off2 = blk2
            blk1 = next((b for b in H1.layout[i] if b[0] == j), None)
            if blk1 is not None:
                _, nj, _, off1 = blk1
                sign = -1 if (j * (d + 1)) % 2 else 1
                phiE = AE.phi.component(i)
                inc = DF.incl.component(i)
                for b in range(ni):
                    v = vec_combination(inc, phiE[b], p)
                    for (idx, e), a in v.items():
                        r = idx - off1
                        if r < 0 or r >= nj * ng:
                            continue
                        c, g = divmod(r, ng)
                        t = (off2 + b * ng + g, e)
                        cols[c][t] = (cols[c].get(t, 0) + sign * a) % p
        comps[j] = [{t: a for t, a in col.items() if a} for col in cols]
    return ChainMap(P, H2.complex, comps)


@dataclass
class Biduality:
    """Witness ``Q -> D(D(F))`` with ``Q -> F`` a certified replacement."""

    source: Complex
    to_F: ChainMap
    witness: ChainMap
    first: DualTerms
    second: DualTerms
    AE: FreeApproximation


def biduality_data(F: Complex, dd: DualizingData) -> Biduality:
    D1 = dual_terms(F, dd)
    E = D1.E
    D2 = dual_terms(E, dd)
    AE = D2.approx
    ev = evaluation_map(D1, AE, D2.hom, dd.d)
    # restrict the source to tau_{>= lo} P, an exact replacement of F
    A = D1.approx
    if F.hi is None:
        Q = F
        to_F = ChainMap.identity(F)
    elif A.P is F:
        Q, to_F = F, ChainMap.identity(F)
    else:
        lo = A.lo
        Q, to_Q = standard_truncate(A.P, lo, ">=")
        to_F = ChainMap(Q, F, {k: A.phi.component(k) for k in Q.terms if k >= F.lo})
        ev = ChainMap(Q, ev.target, {k: ev.component(k) for k in Q.terms if k > lo})
    top = -E.lo if E.lo is not None else 0
    ev = ChainMap(Q, ev.target, {k: ev.component(k) for k in Q.terms})
    w = lift_into_truncation(ev, D2.E, D2.incl, top)
    return Biduality(Q, to_F, w, D1, D2, AE)


def biduality_witness(F: Complex, dd: DualizingData) -> ChainMap:
    """Chain map ``F -> D(D(F))`` (from a free replacement of ``F`` when ``F`` is not free)."""
    return biduality_data(F, dd).witness
