"""Perverse truncation by induction on the support, and what is built on it.

``perverse_truncate`` picks a declared generic point ``x`` of the support,
splits off ``F^- = tau_{<=p(x)} F``, builds ``F^+ = D(tau_{<pbar(x)} D F_1)``
for the cone ``F_1``, and recurses on the cocone ``F^0`` of ``F_1 -> F^+``,
whose support has lost ``x``.  Everything is a strict chain map so the final
pieces are honest cones; every result is checked before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (
    Complex,
    ChainMap,
    Triangle,
    cone,
    cocone,
    shift,
    shift_map,
    standard_truncate,
    quasi_iso_check,
    is_acyclic,
    minimize,
)
from .duality import (
    DualizingData,
    dual_terms,
    evaluation_map,
    lift_into_truncation,
)
from .errors import CertificateFailure, PerversityError, SpaceError, UnsupportedSupport
from .resolutions import (
    HomComplex,
    free_approximation,
    lift_to_approximation,
    rhom_window,
)
from .space import (
    DeclaredSpace,
    Perversity,
    TopPoint,
    check_perversity,
    check_support,
    member,
    member_gt,
    stalk_bound,
    costalk_bound,
)


@dataclass
class TruncationResult:
    """``L -u-> F -v-> M`` with ``L`` in ``D^{p,<=0}`` and ``M`` in ``D^{p,>0}``.

    ``L`` is the cocone of ``v``, so the triangle is distinguished on the
    nose; ``reassembly`` is the certified quasi-isomorphism ``cone(u) -> M``.
    """

    F: Complex
    L: Complex
    M: Complex
    u: ChainMap
    v: ChainMap
    reassembly: ChainMap | None = None
    trace: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)


def _cocone_with_projection(v: ChainMap):
    """``L = cone(v)[-1]`` with ``u: L -> F`` and ``cone(u) -> M``."""
    F, M = v.source, v.target
    L, u = cocone(v)
    C = cone(u).C
    ring = F.ring
    one = ring.ambient.zero_exp
    p = ring.char
    # cone(u)^k = L^{k+1} ⊕ F^k = (F^{k+1} ⊕ M^k) ⊕ F^k  ->  M^k : (f', m, f) -> -m + v f
    comps = {}
    for k in C.terms:
        nf1 = F.module(k + 1).ngens
        nm = M.module(k).ngens
        nf = F.module(k).ngens
        cols = [{} for _ in range(nf1)]
        cols += [{(i, one): p - 1} for i in range(nm)]
        cols += [dict(c) for c in v.component(k)] if nf else []
        comps[k] = cols
    psi = ChainMap(C, M, comps)
    return L, u, psi


def _check(flag: bool, message: str, trace):
    if not flag:
        raise CertificateFailure(message, trace)


def _generic_point(F: Complex, space: DeclaredSpace, P: Perversity):
    """A declared generic point of the support minimizing both ``p`` and ``pbar``.

    With that choice ``tau_{<=p(x)} F`` lies in ``D^{p,<=0}`` and the dual
    step stays in ``D^{pbar,<0}``, because every support point specializes
    from a generic one and both perversities are monotone.
    """
    J, mins = check_support(F, space)
    if not mins:
        return None, J, []
    pmin = min(P(y) for y in mins)
    pbmin = min(-y.dim - P(y) for y in mins)
    good = [y for y in mins if P(y) == pmin and -y.dim - P(y) == pbmin]
    if not good:
        raise UnsupportedSupport(
            "no generic point of the support minimizes both p and its dual: "
            + ", ".join(f"{y.name}(p={P(y)}, dim={y.dim})" for y in mins))
    best = max(good, key=lambda x: (x.dim, -space.points.index(x)))
    support = [y for y in space.points if y.contains_ideal(J)]
    return best, J, support


def perverse_truncate(F: Complex, P: Perversity, space: DeclaredSpace | None = None,
                      dd: DualizingData | None = None, shortcuts: bool = True,
                      _depth: int = 0, _trace=None, _parent_support=None) -> TruncationResult:
    """``tau^p_{<=0} F -> F -> tau^p_{>0} F`` as strict chain maps, checked."""
    if space is None:
        space = P.space
    if dd is None:
        from .duality import canonical_module
        dd = canonical_module(F.ring)
    P.require_t_structure()
    trace = [] if _trace is None else _trace
    ring = F.ring
    Z = Complex.zero(ring)

    if F.hi is None or is_acyclic(F):
        trace.append({"depth": _depth, "step": "acyclic", "support": 0})
        v = ChainMap.identity(F)
        L, u, psi = _cocone_with_projection(v)
        return TruncationResult(F, L, F, u, v, psi, trace, {"acyclic": True})

    x, J, support = _generic_point(F, space, P)
    entry = {"depth": _depth, "point": x.name, "support": len(support),
             "support_points": [y.name for y in support]}
    trace.append(entry)
    if _parent_support is not None and len(support) >= _parent_support:
        raise CertificateFailure("support did not shrink during recursion", trace)

    if shortcuts:
        if member(F, P, "leq", dd):
            entry["step"] = "already <=0"
            v = ChainMap(F, Z)
            L, u, psi = _cocone_with_projection(v)
            return TruncationResult(F, L, Z, u, v, psi, trace, {"member_leq": True})
        if member_gt(F, P, dd):
            entry["step"] = "already >0"
            v = ChainMap.identity(F)
            L, u, psi = _cocone_with_projection(v)
            return TruncationResult(F, L, F, u, v, psi, trace, {"member_gt": True})

    d = dd.d
    n = P(x)
    nbar = -x.dim - n
    entry["step"] = "split"

    # F^- = tau_{<=p(x)} F with its inclusion
    Fm, um = standard_truncate(F, n, "<=")
    T1 = cone(um)
    F1 = T1.C
    to_F1 = T1.g                                      # F -> F_1
    F1m, F1_to, F1_from = minimize(F1)
    entry["F_minus"] = repr(Fm)

    # E = D(F_1), with the approximation of F_1 deep enough for the final map
    lo1 = min(F1m.lo if F1m.lo is not None else 0, -nbar + 1 - d) - 1
    D1 = dual_terms(F1m, dd, depth=lo1)
    E = D1.E
    A1 = D1.approx

    # G = tau_{<pbar(x)} E with its inclusion c; F^+ = D(G)
    HG = None
    if E.hi is None:
        Fplus = Z
    else:
        G, c = standard_truncate(E, nbar - 1, "<=")
        D2 = dual_terms(E, dd)
        AE = D2.approx
        T = -E.lo
        ev = evaluation_map(D1, AE, D2.hom, d)               # P_1 -> Hom(P_E, W)
        if G.hi is None:
            Fplus = Z
        else:
            AG = free_approximation(G, E.lo - d - 1)
            chat, _ = lift_to_approximation(c * AG.phi, AE)   # P_G -> P_E
            HG = HomComplex(AG.P, dd.complex(), -d - AG.P.hi, T + 1)
            Dc = D2.hom.precompose(chat, HG)                  # Hom(P_E, W) -> Hom(P_G, W)
            f_map = Dc * ev
            Fplus, Fplus_incl = standard_truncate(HG.complex, T, "<=")
    entry["F_plus"] = repr(Fplus)

    # replace F_1 by tau_{>=lo1} P_1 and map it to F^+
    Q1, _ = standard_truncate(A1.P, lo1, ">=")
    phi1 = ChainMap(Q1, F1m, {k: A1.phi.component(k) for k in Q1.terms})
    phi1 = F1_from * phi1                                   # Q_1 -> F_1
    if Fplus.hi is None:
        Fplus = Z
        f = ChainMap(Q1, Z)
    else:
        comps = {k: f_map.component(k) for k in Q1.terms if k > lo1}
        f_q = ChainMap(Q1, HG.complex, comps)
        f = lift_into_truncation(f_q, Fplus, Fplus_incl, -E.lo)
    _check(f.check(), "map to F^+ is not a chain map", trace)

    # F^0 = cocone(F_1 -> F^+), smaller support
    F0, pr0 = cocone(f)
    F0m, _, F0_from = minimize(F0)
    sub = perverse_truncate(F0m, P, space, dd, shortcuts, _depth + 1, trace, len(support))
    # A = L_0 -> F^0 -> Q_1 -> F_1
    a = phi1 * (pr0 * (F0_from * sub.u))
    Ta = cone(a)
    Mraw = Ta.C
    v_raw = Ta.g * to_F1                                    # F -> F_1 -> M
    M, M_to, _ = minimize(Mraw)
    v = M_to * v_raw
    L, u, psi = _cocone_with_projection(v)
    res = TruncationResult(F, L, M, u, v, psi, trace)
    _certify(res, P, dd, trace)
    return res


def _certify(res: TruncationResult, P: Perversity, dd: DualizingData, trace):
    _check(res.u.check() and res.v.check(), "truncation maps are not chain maps", trace)
    ok_l = member(res.L, P, "leq", dd)
    _check(ok_l, "truncation L is not in D^{p,<=0}", trace)
    ok_m = member_gt(res.M, P, dd)
    _check(ok_m, "truncation M is not in D^{p,>0}", trace)
    ok_r = res.reassembly.check() and quasi_iso_check(res.reassembly)
    _check(ok_r, "triangle does not reassemble the input", trace)
    res.certificates.update({"member_leq(L)": ok_l, "member_gt(M)": ok_m, "reassembly_qiso": ok_r})


def triangle_compose(outer: Triangle, inner: Triangle) -> Triangle:
    """Octahedron on strict cones: ``cone(q) -> cone(r q) -> cone(r)``.

    ``outer.f = q: A -> B`` and ``inner.f = r: B -> C`` must be strictly composable.
    """
    q, r = outer.f, inner.f
    if q.target is not r.source:
        raise ValueError("triangle_compose needs strictly composable maps")
    rq = r * q
    Cq, Crq, Cr = outer.C, cone(rq).C, inner.C
    A, B, C = q.source, q.target, r.target
    ring = A.ring
    one = ring.ambient.zero_exp
    alpha, beta, gamma = {}, {}, {}
    for k in Cq.terms:
        na = A.module(k + 1).ngens
        cols = [{(i, one): 1} for i in range(na)]
        cols += [{(na + t, e): c for (t, e), c in col.items()} for col in r.component(k)]
        alpha[k] = cols
    for k in Crq.terms:
        nb1 = B.module(k + 1).ngens
        cols = [{t: c for t, c in col.items()} for col in q.component(k + 1)]
        cols += [{(nb1 + i, one): 1} for i in range(C.module(k).ngens)]
        beta[k] = cols
    Cq1 = shift(Cq, 1)
    for k in Cr.terms:
        na2 = A.module(k + 2).ngens
        cols = [{(na2 + i, one): 1} for i in range(B.module(k + 1).ngens)]
        cols += [{} for _ in range(C.module(k).ngens)]
        gamma[k] = cols
    return Triangle(Cq, Crq, Cr, ChainMap(Cq, Crq, alpha), ChainMap(Crq, Cr, beta),
                    ChainMap(Cr, Cq1, gamma), "composed")


def truncate_geq(F: Complex, P: Perversity, dd: DualizingData, **kw):
    """``tau^p_{>=0} F = (tau^p_{>0} F[-1])[1]`` with the map ``F -> tau^p_{>=0} F``."""
    res = perverse_truncate(shift(F, -1), P, P.space, dd, **kw)
    return shift(res.M, 1), shift_map(res.v, 1, F, shift(res.M, 1)), res


def perverse_cohomology(F: Complex, P: Perversity, k: int, dd: DualizingData | None = None, **kw) -> Complex:
    """``pH^k(F) = tau^p_{>=0} tau^p_{<=0} (F[k])``, checked to lie in the heart."""
    if dd is None:
        from .duality import canonical_module
        dd = canonical_module(F.ring)
    res = perverse_truncate(shift(F, k), P, P.space, dd, **kw)
    H, _, _ = truncate_geq(res.L, P, dd, **kw)
    if not (member(H, P, "leq", dd) and member(H, P, "geq", dd)):
        raise CertificateFailure("perverse cohomology is not in the heart")
    return H


@dataclass
class AuxPerversity:
    base: Perversity
    boundary: list
    perversity: Perversity
    sign: int

    @property
    def values(self):
        return self.perversity.values


def aux_perversity(P: Perversity, Z) -> tuple:
    """``(p^-, p^+)``: ``p -/+ 1`` on the closed boundary set ``Z``, ``p`` elsewhere."""
    space = P.space
    names = [z.name if isinstance(z, TopPoint) else z for z in Z]
    for z in names:
        space.point(z)
    if not space.closed(names):
        raise SpaceError(f"boundary {sorted(names)} is not closed under specialization")
    minus = {k: v - 1 if k in names else v for k, v in P.values.items()}
    plus = {k: v + 1 if k in names else v for k, v in P.values.items()}
    return (AuxPerversity(P, names, check_perversity(minus, space), -1),
            AuxPerversity(P, names, check_perversity(plus, space), +1))


def ic_extend(G: Complex, P: Perversity, Z, space: DeclaredSpace | None = None,
              dd: DualizingData | None = None, **kw) -> Complex:
    """``J_{!*} G = tau^{p-}_{<=0} tau^{p+}_{>=0} G``, checked against both auxiliary perversities."""
    if dd is None:
        from .duality import canonical_module
        dd = canonical_module(G.ring)
    pm, pp = aux_perversity(P, Z)
    for aux, label in ((pm, "p-"), (pp, "p+")):
        if not (aux.perversity.monotone and aux.perversity.comonotone):
            raise PerversityError(f"{label} is not monotone and comonotone: strictness fails across the boundary")
    X, _, _ = truncate_geq(G, pp.perversity, dd, **kw)
    res = perverse_truncate(X, pm.perversity, pm.perversity.space, dd, **kw)
    out = res.L
    if not member(out, pm.perversity, "leq", dd):
        raise CertificateFailure("extension is not in D^{p-,<=0}")
    if not member(out, pp.perversity, "geq", dd):
        raise CertificateFailure("extension is not in D^{p+,>=0}")
    return out


def in_heart(F: Complex, P: Perversity, dd: DualizingData) -> bool:
    return member(F, P, "leq", dd) and member(F, P, "geq", dd)


def minimality_check(F: Complex, P: Perversity, Z, space: DeclaredSpace | None = None,
                     dd: DualizingData | None = None) -> tuple:
    """``(no_sub, no_quot)`` for a heart object relative to boundary points ``Z``."""
    if space is None:
        space = P.space
    if dd is None:
        from .duality import canonical_module
        dd = canonical_module(F.ring)
    if not in_heart(F, P, dd):
        raise PerversityError("minimality check needs an object of the heart")
    pts = [space.point(z.name if isinstance(z, TopPoint) else z) for z in Z]
    no_quot = all(stalk_bound(F, x, P(x) - 1) for x in pts)
    no_sub = all(costalk_bound(F, x, P(x) + 1, dd) for x in pts)
    return no_sub, no_quot


def orthogonality_check(F: Complex, G: Complex, P: Perversity, dd: DualizingData | None = None,
                        check_pre: bool = True) -> bool:
    """``Hom(F, G) = 0`` for ``F`` in ``D^{p,<=0}`` and ``G`` in ``D^{p,>0}``."""
    if dd is None:
        from .duality import canonical_module
        dd = canonical_module(F.ring)
    if check_pre:
        if not member(F, P, "leq", dd):
            raise PerversityError("first argument is not in D^{p,<=0}")
        if not member_gt(G, P, dd):
            raise PerversityError("second argument is not in D^{p,>0}")
    if F.hi is None or G.hi is None:
        return True
    [(_, H0)] = rhom_window(F, G, 0, 0)
    return H0.is_zero()
