import pytest
from hypothesis import given, settings, strategies as st

from pervcoh.complexes import Complex, shift
from pervcoh.duality import canonical_module, dualize
from pervcoh.errors import PerversityError, SpaceError, UndeclaredGenericPoint
from pervcoh.groebner import QuotientRing
from pervcoh.modules import PresentedModule
from pervcoh.space import (
    build_space,
    check_perversity,
    check_support,
    costalk_bound,
    member,
    member_gt,
    membership_details,
    minimal_points_over,
    stalk_bound,
    support_covered_by_declared,
    support_ideal,
)

from battery import _cyc, all_settings, cone_ring, line, perversities, plane


def test_build_space_orders_points():
    R, space, _ = plane()
    assert [x.dim for x in space.points] == [2, 1, 0]
    assert space.leq("o", "l") and space.leq("l", "eta") and space.leq("o", "eta")
    assert not space.leq("eta", "o")
    assert space.closed(["o", "l"]) and not space.closed(["l"])


def test_build_space_rejects_bad_declarations():
    R = QuotientRing.from_strings(["u", "v"])
    with pytest.raises(SpaceError):
        build_space([("a", ["u"]), ("a", ["v"])], R)
    with pytest.raises(SpaceError):
        build_space([("a", ["u"]), ("b", ["u^2"])], R)
    with pytest.raises(SpaceError):
        build_space([("a", ["1"])], R)
    with pytest.raises(SpaceError):
        build_space([("o", ["u", "v"])], R)


def test_perversity_flags():
    R, space, _ = plane()
    zero = check_perversity({"eta": 0, "l": 0, "o": 0}, space)
    assert zero.monotone and zero.comonotone
    assert not zero.strictly_monotone and zero.strictly_comonotone
    dimless = check_perversity({"eta": -2, "l": -1, "o": 0}, space)
    assert dimless.strictly_monotone and not dimless.strictly_comonotone
    steep = check_perversity({"eta": -3, "l": -1, "o": 0}, space)
    assert steep.monotone and not steep.comonotone
    bad = check_perversity({"eta": 1, "l": 0, "o": 0}, space)
    assert not bad.monotone
    R, space, _ = cone_ring()
    mid = check_perversity({"eta": -1, "o": 0}, space)
    assert mid.monotone and mid.comonotone
    assert mid.strictly_monotone and mid.strictly_comonotone
    with pytest.raises(PerversityError):
        check_perversity({"eta": 0}, space)
    with pytest.raises(PerversityError):
        check_perversity({"eta": 0, "o": 0, "q": 1}, space)


def test_dual_perversity_is_an_involution():
    for R, space, dd, cx in all_settings():
        for P in perversities(space).values():
            assert P.dual().dual().values == P.values
            assert P.dual().monotone == P.comonotone


def test_support_coverage():
    R, space, cx = cone_ring()
    ok, mins, w = support_covered_by_declared(support_ideal(cx["k"]), space)
    assert ok and [x.name for x in mins] == ["o"]
    ok, mins, w = support_covered_by_declared([], space)
    assert ok and [x.name for x in mins] == ["eta"]
    ok, mins, w = support_covered_by_declared([R.parse("x")], space)
    # V(x) is the line x = z = 0, which only meets the declared points at o
    assert not ok and [x.name for x in mins] == ["o"] and w is not None
    with pytest.raises(UndeclaredGenericPoint) as err:
        check_support(Complex.concentrated(_cyc(R, ["x"]), 0), space)
    assert err.value.minimal_points == ["o"]


def test_support_of_acyclic_complex_is_empty():
    R, space, cx = line()
    ok, mins, w = support_covered_by_declared(support_ideal(Complex.zero(R)), space)
    assert ok and mins == []


def test_minimal_points_over():
    R, space, _ = plane()
    assert [x.name for x in minimal_points_over([R.parse("u")], space)] == ["l"]
    assert [x.name for x in minimal_points_over([R.parse("u"), R.parse("v")], space)] == ["o"]


def test_stalk_and_costalk_bounds_on_the_cone():
    R, space, cx = cone_ring()
    dd = canonical_module(R)
    o = space.point("o")
    F = cx["O[1]"]
    assert stalk_bound(F, o, 0) and stalk_bound(F, o, -1)
    assert not stalk_bound(F, o, -2)
    assert costalk_bound(F, o, 1, dd)
    assert not costalk_bound(F, o, 2, dd)
    k = cx["k"]
    assert stalk_bound(k, o, 0) and not stalk_bound(k, o, -1)
    assert costalk_bound(k, o, 0, dd) and not costalk_bound(k, o, 1, dd)
    assert stalk_bound(k, space.point("eta"), -10)


def test_membership_examples():
    R, space, cx = cone_ring()
    dd = canonical_module(R)
    mid = check_perversity({"eta": -1, "o": 0}, space)
    assert member(cx["O[1]"], mid, "leq", dd) and member(cx["O[1]"], mid, "geq", dd)
    assert member(cx["k"], mid, "leq", dd) and member(cx["k"], mid, "geq", dd)
    assert not member(cx["O"], mid, "leq", dd)
    assert member(cx["O"], mid, "geq", dd)
    # O = (O[1])[-1] with O[1] perverse
    assert member_gt(cx["O"], mid, dd)
    assert not member_gt(cx["O[1]"], mid, dd)
    det = membership_details(cx["O"], mid, "leq", dd)
    assert det["eta"] == {"bound": -1, "ok": False, "degrees": {0: 1}}
    with pytest.raises(ValueError):
        membership_details(cx["O"], mid, "sideways", dd)
    with pytest.raises(UndeclaredGenericPoint):
        member(Complex.concentrated(_cyc(R, ["x"]), 0), mid, "leq", dd)


def test_duality_exchanges_the_halves():
    count = 0
    for R, space, dd, cx in all_settings():
        for P in perversities(space).values():
            Pd = P.dual()
            for F in cx.values():
                DF = dualize(F, dd)
                assert member(F, P, "leq", dd) == member(DF, Pd, "geq", dd)
                assert member(F, P, "geq", dd) == member(DF, Pd, "leq", dd)
                count += 1
    assert count >= 20


def _shifted(P, n):
    return check_perversity({k: v + n for k, v in P.values.items()}, P.space)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["line", "plane", "cone"]), st.integers(0, 6), st.integers(-2, 2), st.integers(0, 3))
def test_shift_covariance(which, idx, n, pidx):
    make = {"line": line, "plane": plane, "cone": cone_ring}[which]
    R, space, cx = make()
    dd = canonical_module(R)
    F = list(cx.values())[idx % len(cx)]
    Ps = list(perversities(space).values())
    P = Ps[pidx % len(Ps)]
    # F[-n] lives in degrees n higher, so it is bounded by p + n
    for side in ("leq", "geq"):
        assert member(F, P, side, dd) == member(shift(F, -n), _shifted(P, n), side, dd)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.integers(-3, 3), st.integers(-3, 3))
def test_raising_a_bound_keeps_membership(idx, a, b):
    R, space, cx = line()
    dd = canonical_module(R)
    F = list(cx.values())[idx]
    lo = check_perversity({"eta": min(a, b), "o": min(a, b)}, space)
    hi = check_perversity({"eta": max(a, b), "o": max(a, b)}, space)
    if member(F, lo, "leq", dd):
        assert member(F, hi, "leq", dd)
    if member(F, hi, "geq", dd):
        assert member(F, lo, "geq", dd)


def test_free_module_is_in_the_heart_on_the_plane():
    R, space, cx = plane()
    dd = canonical_module(R)
    A2 = check_perversity({"eta": 0, "l": 0, "o": 1}, space)
    F = Complex.concentrated(PresentedModule.free(R, 2), 0)
    assert member(F, A2, "leq", dd)
    assert member(F, A2, "geq", dd)
    assert not member(shift(F, -2), A2, "leq", dd)
