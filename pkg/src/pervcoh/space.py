"""Declared points, perversities, and the two membership tests.

Points are prime ideals of ``R`` declared by the user; primality is assumed,
not verified (rank computations abort if they meet a zero divisor).  The
specialization order is ``x <= y`` iff ``p_y ⊆ p_x``, i.e. ``x`` lies in the
closure of ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import Complex, cohomology_module, shift
from .duality import DualizingData, dualize, dimension_of_point
from .errors import PerversityError, SpaceError, UndeclaredGenericPoint
from .groebner import (
    GroebnerBasis,
    Poly,
    QuotientRing,
    ideal_gb,
    normal_form,
    radical_membership,
    ideal_intersection,
)
from .modules import annihilator
from .resolutions import free_approximation, rank_over_domain


@dataclass(eq=False)
class TopPoint:
    name: str
    gens: list
    gb: GroebnerBasis
    dim: int

    def contains(self, f: Poly) -> bool:
        return not normal_form(f, self.gb)

    def contains_ideal(self, gens) -> bool:
        return all(self.contains(g) for g in gens)

    def __repr__(self):
        return f"TopPoint({self.name}, dim={self.dim})"


@dataclass(eq=False)
class DeclaredSpace:
    ring: QuotientRing
    points: list
    below: dict       # name -> set of names in its closure (excluding itself)

    def point(self, name: str) -> TopPoint:
        for x in self.points:
            if x.name == name:
                return x
        raise SpaceError(f"unknown point {name!r}")

    @property
    def names(self):
        return [x.name for x in self.points]

    def leq(self, x: str, y: str) -> bool:
        """``x`` lies in the closure of ``y``."""
        return x == y or x in self.below[y]

    def comparable_pairs(self):
        """Pairs ``(x', x)`` with ``x'`` in the closure of ``x``, ``x' != x``."""
        for y in self.points:
            for x in self.points:
                if x.name in self.below[y.name]:
                    yield x, y

    def closed(self, names) -> bool:
        names = set(names)
        return all(self.below[n] <= names for n in names)

    def without(self, names) -> "DeclaredSpace":
        keep = [x for x in self.points if x.name not in set(names)]
        return DeclaredSpace(self.ring, keep, {x.name: self.below[x.name] - set(names) for x in keep})


def build_space(points, R: QuotientRing) -> DeclaredSpace:
    """``points`` is a list of ``(name, generators)``; generators are strings or polys in ``R``."""
    S = R.ambient
    built = []
    seen = set()
    for name, gens in points:
        if name in seen:
            raise SpaceError(f"duplicate point name {name!r}")
        seen.add(name)
        polys = [R.parse(g) if isinstance(g, str) else g for g in gens]
        gb = ideal_gb([g for g in polys if g] + list(R.ideal), S)
        if gb.is_unit():
            raise SpaceError(f"point {name!r} has the unit ideal")
        dim = dimension_of_point(polys, R)
        built.append(TopPoint(name, [g for g in polys if g], gb, dim))
    below = {x.name: set() for x in built}
    for x in built:
        for y in built:
            if x is y:
                continue
            if x.contains_ideal(y.gens):       # p_y ⊆ p_x
                if y.contains_ideal(x.gens):
                    raise SpaceError(f"points {y.name!r} and {x.name!r} have the same ideal")
                below[y.name].add(x.name)
    if built:
        d = max(x.dim for x in built)
        if R.is_polynomial:
            top = S.nvars
        else:
            from .groebner import krull_dimension
            top = krull_dimension(list(R.ideal), S)
        if d != top:
            raise SpaceError(f"no declared point of maximal dimension {top}")
    return DeclaredSpace(R, built, below)


@dataclass(eq=False)
class Perversity:
    space: DeclaredSpace
    values: dict
    monotone: bool = False
    comonotone: bool = False
    strictly_monotone: bool = False
    strictly_comonotone: bool = False

    def __call__(self, x) -> int:
        return self.values[x.name if isinstance(x, TopPoint) else x]

    @property
    def dual_values(self) -> dict:
        return {x.name: -x.dim - self.values[x.name] for x in self.space.points}

    def dual(self) -> "Perversity":
        return check_perversity(self.dual_values, self.space)

    def flags(self) -> dict:
        return {"monotone": self.monotone, "comonotone": self.comonotone,
                "strictly_monotone": self.strictly_monotone,
                "strictly_comonotone": self.strictly_comonotone}

    def require_t_structure(self):
        if not self.monotone:
            raise PerversityError("perversity is not monotone")
        if not self.comonotone:
            raise PerversityError("perversity is not comonotone")


def check_perversity(values: dict, space: DeclaredSpace) -> Perversity:
    vals = {}
    for x in space.points:
        if x.name not in values:
            raise PerversityError(f"perversity has no value at {x.name!r}")
        vals[x.name] = int(values[x.name])
    extra = set(values) - set(vals)
    if extra:
        raise PerversityError(f"perversity names undeclared points: {sorted(extra)}")
    dual = {x.name: -x.dim - vals[x.name] for x in space.points}
    mono = comono = smono = scomono = True
    for xp, x in space.comparable_pairs():
        # x' in the closure of x
        if vals[xp.name] < vals[x.name]:
            mono = False
        if vals[xp.name] <= vals[x.name]:
            smono = False
        if dual[xp.name] < dual[x.name]:
            comono = False
        if dual[xp.name] <= dual[x.name]:
            scomono = False
    return Perversity(space, vals, mono, comono, smono, scomono)


# --------------------------------------------------------------------------
# supports


def minimal_points_over(J, space: DeclaredSpace) -> list:
    over = [x for x in space.points if x.contains_ideal(J)]
    return [x for x in over if not any(y is not x and x.name in space.below[y.name] for y in over)]


def support_covered_by_declared(J, space: DeclaredSpace):
    """``(covered, minimal declared points over J, witness)``.

    ``V(J)`` is covered when ``sqrt(J)`` equals the intersection of the
    minimal declared primes containing ``J``.
    """
    R = space.ring
    J = [g for g in J if g]
    if ideal_gb(J + list(R.ideal), R.ambient).is_unit():
        return True, [], None
    mins = minimal_points_over(J, space)
    if not mins:
        return False, [], R.ambient.const(1)
    inter = mins[0].gens
    for x in mins[1:]:
        inter = ideal_intersection(inter, x.gens, R) if inter and x.gens else []
    for g in inter:
        if not radical_membership(g, J, R):
            return False, mins, g
    return True, mins, None


def format_ideal(gens) -> str:
    return "(" + ", ".join(str(g) for g in gens) + ")" if gens else "(0)"


def support_ideal(F: Complex) -> list:
    """An ideal with ``V`` equal to the support of ``F`` (product of cohomology annihilators)."""
    R = F.ring
    S = R.ambient
    J = [S.const(1)]
    for k in F.terms:
        H = cohomology_module(F, k)
        if H.is_zero():
            continue
        ann = annihilator(H)
        J = [R.reduce(a * b) for a in J for b in ann]
        J = [g for g in J if g]
        if not J:
            break
    gb = ideal_gb(J + list(R.ideal), S)
    return [R.reduce(g) for g in gb.polys() if R.reduce(g)]


def check_support(F: Complex, space: DeclaredSpace):
    """Raise ``UndeclaredGenericPoint`` unless the support of ``F`` is covered."""
    J = support_ideal(F)
    ok, mins, witness = support_covered_by_declared(J, space)
    if not ok:
        raise UndeclaredGenericPoint(format_ideal(J), [x.name for x in mins], witness)
    return J, mins


# --------------------------------------------------------------------------
# stalks and costalks


def _stalk_degrees(P: Complex, x: TopPoint, lo: int) -> dict:
    drank = {}
    for k in range(lo - 1, (P.hi if P.hi is not None else lo - 1) + 1):
        if k in P.terms and k + 1 in P.terms:
            drank[k] = rank_over_domain(P.diff(k), P.module(k + 1).ngens, x.gb)
    out = {}
    for k in range(lo, (P.hi if P.hi is not None else lo - 1) + 1):
        r = P.module(k).ngens - drank.get(k, 0) - drank.get(k - 1, 0)
        if r:
            out[k] = r
    return out


def stalk_degrees(F: Complex, x: TopPoint, lo: int) -> dict:
    """Nonzero stalk ranks ``{k: rank}`` of ``F`` at ``x`` in degrees ``>= lo``."""
    if F.hi is None or lo > F.hi:
        return {}
    A = free_approximation(F, lo)
    return _stalk_degrees(A.P, x, lo)


def stalk_bound(F: Complex, x: TopPoint, n: int) -> bool:
    """Stalk of ``F`` at ``x`` vanishes in degrees ``> n``."""
    return not stalk_degrees(F, x, n + 1)


def costalk_bound(F: Complex, x: TopPoint, n: int, dd: DualizingData, DF: Complex | None = None) -> bool:
    """Costalk of ``F`` at ``x`` vanishes in degrees ``< n``.

    ``H^k(i_x^! F) != 0`` iff ``H^{-k-dim x}(i_x^* DF) != 0``; degrees
    ``k < n`` correspond to stalk degrees ``> -n - dim x``.
    """
    if DF is None:
        DF = dualize(F, dd)
    return stalk_bound(DF, x, -n - x.dim)


def costalk_degrees(F: Complex, x: TopPoint, hi: int, dd: DualizingData, DF: Complex | None = None) -> dict:
    """Nonzero costalk ranks of ``F`` at ``x`` in degrees ``<= hi``."""
    if DF is None:
        DF = dualize(F, dd)
    st = stalk_degrees(DF, x, -hi - x.dim)
    return {-m - x.dim: r for m, r in st.items()}


def membership_details(F: Complex, P: Perversity, side: str, dd: DualizingData | None = None,
                       check_cover: bool = True) -> dict:
    """Per point: ``{"bound": n, "ok": bool, "degrees": {k: rank}}``.

    For ``side="leq"`` the degrees are the stalk degrees above ``p(x)``; for
    ``side="geq"`` the costalk degrees below ``p(x)``.
    """
    space = P.space
    if check_cover and F.hi is not None:
        check_support(F, space)
    out = {}
    if side in ("leq", "<=", "≤0", "<=0"):
        if F.hi is None:
            return {x.name: {"bound": P(x), "ok": True, "degrees": {}} for x in space.points}
        lo = min(P(x) for x in space.points) + 1
        A = free_approximation(F, min(lo, F.hi + 1))
        for x in space.points:
            n = P(x)
            st = {k: r for k, r in _stalk_degrees(A.P, x, max(lo, n + 1)).items() if k > n}
            out[x.name] = {"bound": n, "ok": not st, "degrees": st}
        return out
    if side in ("geq", ">=", "≥0", ">=0"):
        if dd is None:
            raise ValueError("costalk tests need dualizing data")
        if F.hi is None:
            return {x.name: {"bound": P(x), "ok": True, "degrees": {}} for x in space.points}
        DF = dualize(F, dd)
        if DF.hi is None:
            return {x.name: {"bound": P(x), "ok": True, "degrees": {}} for x in space.points}
        lo = min(-P(x) - x.dim for x in space.points) + 1
        A = free_approximation(DF, min(lo, DF.hi + 1))
        for x in space.points:
            n = P(x)
            m = -n - x.dim
            st = {k: r for k, r in _stalk_degrees(A.P, x, max(lo, m + 1)).items() if k > m}
            cost = {-k - x.dim: r for k, r in st.items()}
            out[x.name] = {"bound": n, "ok": not cost, "degrees": cost}
        return out
    raise ValueError(f"unknown side {side!r}")


def member(F: Complex, P: Perversity, side: str, dd: DualizingData | None = None) -> bool:
    """``F`` in ``D^{p,<=0}`` (``side="leq"``) or ``D^{p,>=0}`` (``side="geq"``)."""
    return all(v["ok"] for v in membership_details(F, P, side, dd).values())


def member_gt(F: Complex, P: Perversity, dd: DualizingData) -> bool:
    """``F`` in ``D^{p,>0}``, i.e. ``F[1]`` in ``D^{p,>=0}``."""
    return member(shift(F, 1), P, "geq", dd)
