"""Acceptance battery: one test per criterion, each printing a single PASS/FAIL line."""

import itertools
import random

from pervcoh.complexes import (
    Complex,
    direct_sum,
    is_acyclic,
    nonzero_cohomology,
    quasi_iso_check,
    standard_truncate,
    truncate_map,
)
from pervcoh.duality import biduality_data, canonical_module, dual_map, dualize
from pervcoh.engine import ic_extend, in_heart, minimality_check, perverse_truncate
from pervcoh.errors import UndeclaredGenericPoint
from pervcoh.groebner import (
    GB_CACHE,
    AmbientRing,
    buchberger_certificate,
    krull_dimension,
    syzygy_matrix,
    vec_combination,
)
from pervcoh.resolutions import gamma_sections_oracle, resolve, rhom_window
from pervcoh.space import check_perversity, costalk_degrees, member

from battery import _cyc, all_settings, cone_ring, perversities, plane


def _verdict(number, label, ok, detail=""):
    print(f"criterion {number} ({label}): {'PASS' if ok else 'FAIL'}{' - ' + detail if detail else ''}")
    assert ok, detail


def _run(number, label, body):
    """Run ``body() -> (ok, detail)``; an exception counts as a failure with its message."""
    try:
        ok, detail = body()
    except Exception as e:          # report, then fail
        ok, detail = False, f"{type(e).__name__}: {e}"
    _verdict(number, label, ok, detail)


def _battery():
    for R, space, dd, cx in all_settings():
        for name, F in cx.items():
            yield R, space, dd, name, F


def _lower_qiso(L, u, F, n):
    """Certify ``L ~ tau_{<=n} F`` through ``L <- tau_{<=n} L -> tau_{<=n} F``."""
    TL, incl = standard_truncate(L, n, "<=")
    if not quasi_iso_check(incl):
        return False
    g = truncate_map(u * incl, n, "<=")
    return g.check() and quasi_iso_check(g)


def test_standard_recovery():
    def body():
        count, bad = 0, []
        for R, space, dd, name, F in _battery():
            zero = perversities(space)["zero"]
            res = perverse_truncate(F, zero, space, dd)
            ok = _lower_qiso(res.L, res.u, F, 0) and quasi_iso_check(res.reassembly)
            count += 1
            if not ok:
                bad.append(name)
        return count >= 10 and not bad, f"{count} complexes, failures: {bad}"
    _run(1, "standard recovery with p = 0", body)


def test_dual_standard_recovery():
    def body():
        count, bad = 0, []
        for R, space, dd, name, F in _battery():
            P = perversities(space)["-dim"]
            res = perverse_truncate(F, P, space, dd)
            L = res.L
            ok = True
            if L.hi is not None and F.hi is not None:
                # D(u): DF -> DL induces tau_{>=0} DF ~ DL, and L ~ DDL
                DF, DL, Du = dual_map(res.u, dd)
                ok = Du.check()
                top = truncate_map(Du, 0, ">=")
                _, to_top = standard_truncate(DL.E, 0, ">=")
                ok = ok and top.check() and quasi_iso_check(top) and quasi_iso_check(to_top)
                ok = ok and quasi_iso_check(biduality_data(L, dd).witness)
            else:
                T, _ = standard_truncate(dualize(F, dd), 0, ">=")
                ok = is_acyclic(T)
            count += 1
            if not ok:
                bad.append(name)
        return count >= 10 and not bad, f"{count} complexes, failures: {bad}"
    _run(2, "dual-standard recovery with p = -dim", body)


def test_orthogonality():
    def body():
        pairs, nonzero, bad = 0, 0, []
        for R, space, dd, cx in all_settings():
            for pname, P in perversities(space).items():
                if not (P.monotone and P.comonotone):
                    continue
                outs = [perverse_truncate(F, P, space, dd) for F in cx.values()]
                for (i, a), (j, b) in itertools.product(enumerate(outs), repeat=2):
                    pairs += 1
                    if a.L.hi is None or b.M.hi is None:
                        continue
                    nonzero += 1
                    [(_, H0)] = rhom_window(a.L, b.M, 0, 0)
                    if not H0.is_zero():
                        bad.append((pname, i, j))
        ok = pairs >= 25 and nonzero >= 25 and not bad
        return ok, f"{pairs} ordered pairs ({nonzero} with both sides nonzero), failures: {bad}"
    _run(3, "Hom vanishing between truncation halves", body)


def test_duality_exchange():
    def body():
        checks, bad = 0, []
        for R, space, dd, name, F in _battery():
            DF = dualize(F, dd)
            for pname, P in perversities(space).items():
                checks += 2
                if member(F, P, "leq", dd) != member(DF, P.dual(), "geq", dd):
                    bad.append((name, pname, "leq"))
                if member(F, P, "geq", dd) != member(DF, P.dual(), "leq", dd):
                    bad.append((name, pname, "geq"))
        # 21 complexes, each with the perversities its space carries
        return not bad and checks == 112, f"{checks} checks, failures: {bad}"
    _run(4, "duality exchanges the two halves", body)


def test_reassembly_and_idempotence():
    def body():
        count, bad = 0, []
        for R, space, dd, name, F in _battery():
            for pname, P in perversities(space).items():
                if not (P.monotone and P.comonotone):
                    continue
                for shortcuts in (True, False):
                    res = perverse_truncate(F, P, space, dd, shortcuts=shortcuts)
                    ok = res.reassembly.check() and quasi_iso_check(res.reassembly)
                    again = perverse_truncate(res.L, P, space, dd, shortcuts=False)
                    ok = ok and is_acyclic(again.M) and quasi_iso_check(again.u)
                    upper = perverse_truncate(res.M, P, space, dd, shortcuts=False)
                    ok = ok and is_acyclic(upper.L) and quasi_iso_check(upper.v)
                    count += 1
                    if not ok:
                        bad.append((name, pname, shortcuts))
        return not bad, f"{count} truncations, failures: {bad}"
    _run(5, "reassembly and idempotence", body)


def _iso_to_shifted_ring(B, R):
    """Certify ``B ~ O[1]``: ``tau_{<=-1} B -> B`` and ``tau_{<=-1} B -> H[1]`` are
    quasi-isomorphisms and ``H`` prunes to a free module of rank one."""
    if nonzero_cohomology(B) != [-1]:
        return False
    T, incl = standard_truncate(B, -1, "<=")
    H, proj = standard_truncate(T, -1, ">=")
    if not (quasi_iso_check(incl) and proj.check() and quasi_iso_check(proj)):
        return False
    if set(H.terms) != {-1}:
        return False
    M = H.module(-1).prune()[0]
    return M.ngens == 1 and not M.rels


def test_flagship_nilcone():
    def body():
        R, space, cx = cone_ring()
        dd = canonical_module(R)
        mid = check_perversity({"eta": -1, "o": 0}, space)
        facts = {}
        facts["strict"] = mid.strictly_monotone and mid.strictly_comonotone
        Q1, k = cx["O[1]"], cx["k"]
        facts["heart"] = in_heart(Q1, mid, dd) and in_heart(k, mid, dd)
        facts["minimal"] = minimality_check(Q1, mid, ["o"], space, dd) == (True, True)
        A = ic_extend(Q1, mid, ["o"], space, dd)
        B = ic_extend(direct_sum(Q1, k), mid, ["o"], space, dd)
        facts["ic(Q[1])"] = in_heart(A, mid, dd) and _iso_to_shifted_ring(A, R)
        facts["ic(Q[1]+k)"] = in_heart(B, mid, dd) and _iso_to_shifted_ring(B, R)
        [(_, h1)] = rhom_window(Q1, k, 0, 0)
        [(_, h2)] = rhom_window(k, Q1, 0, 0)
        facts["simples orthogonal"] = h1.is_zero() and h2.is_zero()
        bad = [k for k, v in facts.items() if not v]
        return not bad, "failed: " + ", ".join(bad) if bad else "all six facts hold"
    _run(6, "nilpotent cone of sl2", body)


def test_local_cohomology_finiteness():
    def body():
        R, space, cx = plane()
        dd = canonical_module(R)
        P = perversities(space)["A2"]
        O = cx["O"]
        rows = {r.degree: r for r in gamma_sections_oracle(O, ["u", "v"], 0, 2, 4)}
        # below the boundary shift the sections vanish and the oracle stabilizes
        low_ok = all(rows[k].stabilized and all(M.is_zero() for M in rows[k].modules) for k in (0, 1))
        top = rows[2]
        growing = all(a < b for a, b in zip(top.lengths, top.lengths[1:]))
        high_ok = not top.stabilized and growing and top.lengths == [1, 3, 6, 10]
        # the costalk at the origin agrees: first nonzero degree is 2 = p(o) + 1
        cost = costalk_degrees(O, space.point("o"), 3, dd)
        cost_ok = min(cost) == 2 and P("o") + 1 == 2
        ok = P.monotone and P.comonotone and low_ok and high_ok and cost_ok
        detail = (f"degrees 0,1 zero and stable: {low_ok}; degree 2 lengths {top.lengths}, "
                  f"stabilized={top.stabilized}; costalk degrees {sorted(cost)}")
        return ok, detail
    _run(7, "local cohomology desk check", body)


def _hitting_set_dimension(gens, n):
    supports = [{i for i, k in enumerate(g) if k} for g in gens]
    for size in range(n + 1):
        for cover in itertools.combinations(range(n), size):
            if all(s & set(cover) for s in supports):
                return n - size
    return 0


def test_kernel_soundness():
    def body():
        # resolution exactness in a window over the battery
        res_bad = []
        for R, space, dd, name, F in _battery():
            if F.hi is None:
                continue
            res = resolve(F, F.lo - 2)
            P = res.approx.P
            ok = res.phi.check() and quasi_iso_check(res.phi) and P.is_free()
            if not ok:
                res_bad.append(name)
        # krull dimension against a hitting-set search
        rng = random.Random(20)
        krull_bad = 0
        for _ in range(20):
            n = rng.randint(2, 6)
            names = [f"v{i}" for i in range(n)]
            S = AmbientRing(names)
            gens = [e for e in (tuple(rng.choice([0, 0, 1, 2]) for _ in range(n)) for _ in range(rng.randint(1, 4)))
                    if any(e)] or [(1,) + (0,) * (n - 1)]
            I = [S.parse("*".join(f"{names[i]}^{k}" for i, k in enumerate(e) if k)) for e in gens]
            if krull_dimension(I, S) != _hitting_set_dimension(gens, n):
                krull_bad += 1
        # every basis computed so far: Buchberger criterion and syzygy identity
        bases = list(GB_CACHE._store.values())
        cert_bad = sum(1 for gb in bases if not buchberger_certificate(gb))
        syz_bad = 0
        for gb in bases[:200]:
            if gb.is_unit() or len(gb.elements) > 12:
                continue
            p = gb.ring.char
            for col in syzygy_matrix(gb):
                if vec_combination(gb.elements, col, p):
                    syz_bad += 1
        ok = not res_bad and not krull_bad and not cert_bad and not syz_bad and len(bases) > 50
        detail = (f"{len(bases)} bases certified ({cert_bad} bad), syzygy failures {syz_bad}, "
                  f"krull mismatches {krull_bad}/20, resolution failures {res_bad}")
        return ok, detail
    _run(8, "kernel soundness", body)


def test_equivariance_guard():
    def body():
        R, space, cx = cone_ring()
        dd = canonical_module(R)
        mid = check_perversity({"eta": -1, "o": 0}, space)
        F = Complex.concentrated(_cyc(R, ["x"]), 0)
        try:
            perverse_truncate(F, mid, space, dd)
        except UndeclaredGenericPoint as e:
            return e.witness is not None, f"aborted with witness {e.witness}"
        return False, "no abort"
    _run(9, "undeclared generic point guard", body)
