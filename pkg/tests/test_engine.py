import pytest

from pervcoh.complexes import (
    ChainMap,
    Complex,
    cohomology_module,
    cone,
    direct_sum,
    is_acyclic,
    nonzero_cohomology,
    quasi_iso_check,
)
from pervcoh.duality import canonical_module, dualize
from pervcoh.engine import (
    aux_perversity,
    ic_extend,
    in_heart,
    minimality_check,
    orthogonality_check,
    perverse_cohomology,
    perverse_truncate,
    triangle_compose,
    truncate_geq,
)
from pervcoh.errors import PerversityError, SpaceError, UnsupportedSupport
from pervcoh.groebner import QuotientRing
from pervcoh.resolutions import rhom_window, vector_space_dimension
from pervcoh.space import build_space, check_perversity, member, member_gt

from battery import _cyc, all_settings, cone_ring, line, perversities, plane


def _profile(C):
    """Cohomology as ``{k: (generators, length or None)}``."""
    out = {}
    for k in nonzero_cohomology(C):
        H = cohomology_module(C, k).prune()[0]
        out[k] = (H.ngens, vector_space_dimension(H))
    return out


def _cone_mid():
    R, space, cx = cone_ring()
    dd = canonical_module(R)
    return R, space, dd, cx, check_perversity({"eta": -1, "o": 0}, space)


def test_ring_on_the_cone_is_strictly_positive():
    R, space, dd, cx, mid = _cone_mid()
    for shortcuts in (True, False):
        res = perverse_truncate(cx["O"], mid, space, dd, shortcuts=shortcuts)
        assert is_acyclic(res.L)
        assert quasi_iso_check(res.v)


def test_ring_plus_point_splits():
    R, space, dd, cx, mid = _cone_mid()
    F = direct_sum(cx["O"], cx["k"])
    for shortcuts in (True, False):
        res = perverse_truncate(F, mid, space, dd, shortcuts=shortcuts)
        assert list(nonzero_cohomology(res.L)) == [0]
        assert vector_space_dimension(cohomology_module(res.L, 0)) == 1
        H = cohomology_module(res.M, 0)
        assert list(nonzero_cohomology(res.M)) == [0]
        assert vector_space_dimension(H) is None and H.ngens >= 1
        if not shortcuts:
            assert res.certificates["reassembly_qiso"]


def test_certificates_on_the_battery():
    for R, space, dd, cx in all_settings():
        for P in perversities(space).values():
            if not (P.monotone and P.comonotone):
                continue
            for name, F in cx.items():
                for shortcuts in (True, False):
                    res = perverse_truncate(F, P, space, dd, shortcuts=shortcuts)
                    assert res.u.check() and res.v.check()
                    assert member(res.L, P, "leq", dd), name
                    assert member_gt(res.M, P, dd), name
                    assert quasi_iso_check(res.reassembly), name


def test_zero_perversity_recovers_standard_truncation():
    for R, space, dd, cx in all_settings():
        zero = perversities(space)["zero"]
        if not zero.comonotone:
            continue
        for name, F in cx.items():
            res = perverse_truncate(F, zero, space, dd)
            want = {k: v for k, v in _profile(F).items() if k <= 0}
            assert _profile(res.L) == want, name
            assert _profile(res.M) == {k: v for k, v in _profile(F).items() if k > 0}, name


def test_truncation_is_idempotent():
    for R, space, dd, cx in all_settings():
        for P in perversities(space).values():
            for F in cx.values():
                res = perverse_truncate(F, P, space, dd)
                again = perverse_truncate(res.L, P, space, dd, shortcuts=False)
                assert is_acyclic(again.M) and quasi_iso_check(again.u)
                upper = perverse_truncate(res.M, P, space, dd, shortcuts=False)
                assert is_acyclic(upper.L) and quasi_iso_check(upper.v)


def test_orthogonality_between_halves():
    R, space, dd, cx, mid = _cone_mid()
    results = [perverse_truncate(F, mid, space, dd) for F in cx.values()]
    pairs = 0
    for a in results:
        for b in results:
            if a.L.hi is None or b.M.hi is None:
                continue
            [(_, H0)] = rhom_window(a.L, b.M, 0, 0)
            assert H0.is_zero()
            pairs += 1
    assert pairs >= 9


def test_duality_conjugates_the_truncations():
    for R, space, dd, cx in all_settings():
        for P in perversities(space).values():
            Pd = P.dual()
            for name, F in cx.items():
                res = perverse_truncate(F, P, space, dd)
                dual_side, _, _ = truncate_geq(dualize(F, dd), Pd, dd)
                assert _profile(dualize(res.L, dd)) == _profile(dual_side), name


def test_truncation_trace_support_shrinks():
    R, space, cx = plane()
    dd = canonical_module(R)
    A2 = perversities(space)["A2"]
    res = perverse_truncate(cx["O+k"], A2, space, dd, shortcuts=False)
    depths = {}
    for entry in res.trace:
        depths.setdefault(entry["depth"], entry["support"])
    sizes = [depths[d] for d in sorted(depths)]
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    assert res.trace[0]["point"] == "eta"


def test_unsupported_support_is_reported():
    S = QuotientRing.from_strings(["u", "v"])
    space = build_space([("eta", []), ("a", ["u"]), ("b", ["v"]), ("o", ["u", "v"])], S)
    dd = canonical_module(S)
    P = check_perversity({"eta": -1, "a": -1, "b": 0, "o": 0}, space)
    F = Complex.concentrated(_cyc(S, ["u*v"]), 0)
    assert P.monotone and P.comonotone
    with pytest.raises(UnsupportedSupport):
        perverse_truncate(F, P, space, dd, shortcuts=False)


def test_requires_a_t_structure():
    R, space, cx = plane()
    dd = canonical_module(R)
    bad = check_perversity({"eta": 1, "l": 0, "o": 0}, space)
    with pytest.raises(PerversityError):
        perverse_truncate(cx["O"], bad, space, dd)


def test_triangle_compose_with_identities():
    R, space, cx = line()
    F = cx["[t]"]
    one = ChainMap.identity(F)
    T = triangle_compose(cone(one), cone(one))
    assert T.f.check() and T.g.check() and T.h.check()
    assert is_acyclic(T.A) and is_acyclic(T.B) and is_acyclic(T.C)
    f = ChainMap(F, cx["k"], {0: [_col_one(R)]})
    T = triangle_compose(cone(one), cone(f))
    assert T.f.check() and T.g.check() and T.h.check()
    # cone(q) is acyclic, so cone(r q) -> cone(r) is a quasi-isomorphism
    assert quasi_iso_check(T.g)
    with pytest.raises(ValueError):
        triangle_compose(cone(f), cone(one))


def _col_one(R):
    return {(0, R.ambient.zero_exp): 1}


def test_perverse_cohomology_examples():
    R, space, dd, cx, mid = _cone_mid()
    H1 = perverse_cohomology(cx["O"], mid, 1, dd)
    assert _profile(H1) == _profile(cx["O[1]"])
    assert is_acyclic(perverse_cohomology(cx["O"], mid, 0, dd))
    H0 = perverse_cohomology(direct_sum(cx["O[1]"], cx["k"]), mid, 0, dd)
    assert in_heart(H0, mid, dd)
    assert _profile(H0) == _profile(direct_sum(cx["O[1]"], cx["k"]))


def test_aux_perversity_examples():
    R, space, dd, cx, mid = _cone_mid()
    pm, pp = aux_perversity(mid, ["o"])
    assert pm.values == {"eta": -1, "o": -1} and pp.values == {"eta": -1, "o": 1}
    assert pm.perversity.monotone and pm.perversity.comonotone
    assert pp.perversity.monotone and pp.perversity.comonotone
    R, space, cx = plane()
    zero = perversities(space)["zero"]
    pm, pp = aux_perversity(zero, ["o"])
    assert not pm.perversity.monotone
    assert pp.perversity.comonotone and not pp.perversity.strictly_comonotone
    with pytest.raises(SpaceError):
        aux_perversity(zero, ["l"])


def test_intersection_extension_on_the_cone():
    R, space, dd, cx, mid = _cone_mid()
    for G in (cx["O[1]"], cx["O[1]+k"]):
        IC = ic_extend(G, mid, ["o"], space, dd)
        assert in_heart(IC, mid, dd)
        assert list(nonzero_cohomology(IC)) == [-1]
        H = cohomology_module(IC, -1)
        assert vector_space_dimension(H) is None
        assert minimality_check(IC, mid, ["o"], space, dd) == (True, True)


def test_minimality_detects_the_point():
    R, space, dd, cx, mid = _cone_mid()
    F = direct_sum(cx["O[1]"], cx["k"])
    no_sub, no_quot = minimality_check(F, mid, ["o"], space, dd)
    assert not no_sub and not no_quot
    with pytest.raises(PerversityError):
        minimality_check(cx["O"], mid, ["o"], space, dd)


def test_extension_rejects_non_strict_perversity():
    R, space, cx = plane()
    dd = canonical_module(R)
    zero = perversities(space)["zero"]
    with pytest.raises(PerversityError):
        ic_extend(cx["O"], zero, ["o"], space, dd)


def test_orthogonality_check_examples():
    R, space, dd, cx, mid = _cone_mid()
    assert orthogonality_check(cx["O[1]"], cx["O"], mid, dd)
    assert orthogonality_check(cx["k"], cx["O"], mid, dd)
    with pytest.raises(PerversityError):
        orthogonality_check(cx["O"], cx["O"], mid, dd)
    # Ext^1(k, O) vanishes at a depth-two point, Hom(O, k) does not
    assert orthogonality_check(cx["k"], cx["O[1]"], mid, dd, check_pre=False)
    assert not orthogonality_check(cx["O"], cx["k"], mid, dd, check_pre=False)
