import csv
import io
import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodrec.errors import BudgetExceeded, Cancelled, PreconditionError
from prodrec.systems import (
    ETA, GOLDEN, Arc, Ball, CodedShift, Cylinder, Fiber, FinitePoints, FullShift, Interval,
    IntervalSet, Odometer, OnePoint, Product, ProductBox, Residue, Rotation, SpecError,
    SymbolicPoint, TentMap, ToeplitzSpec, Whole, WholeSpace, aperiodic_positions, aperiodic_readout,
    cancel_token, circle_distance, containment_times, hole_density, iterate, limit_set_probe,
    make_toeplitz, open_set_from_json, periodic_positions, restricted_transfer, return_times,
    rotation_coding, shift_distance, spec_hash, system_from_spec, tent_iterate_interval,
    tent_periodic_points, transfer_times,
)

from . import oracles

FS = FullShift()
ALT = SymbolicPoint.periodic_point("01")  # x[0] = 0, x[1] = 1, ...


def words(min_size=1, max_size=4):
    return st.text(alphabet="01", min_size=min_size, max_size=max_size)


def random_point(rng, radius):
    return SymbolicPoint(rng.integers(0, 2, 2 * radius + 1), -radius, "explicit")


# --- symbolic points ---------------------------------------------------------


def test_point_tails():
    z = SymbolicPoint.from_word("1", 0)
    assert z.word(-3, 4) == "0001000"
    p = SymbolicPoint("101", -1, "explicit")
    with pytest.raises(IndexError):
        p.window(-2, 0)
    assert ALT.word(-2, 4) == "010101"


def test_shift_moves_symbols_left():
    x = SymbolicPoint.from_word("0011", 0)
    assert x.shifted(2).word(0, 2) == "11"
    assert ALT.shifted(1) == SymbolicPoint.periodic_point("10")


def test_point_json_round_trip():
    for p in (ALT.shifted(3), SymbolicPoint("1101", -2, "explicit"), SymbolicPoint.from_word("1", 5)):
        assert SymbolicPoint.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_shift_distance_rule():
    x = SymbolicPoint.from_word("0000000", -3)
    y = x.with_symbols({-2: 1})
    assert shift_distance(x, y) == F(1, 4)
    assert shift_distance(x, x.with_symbols({0: 1})) == 1
    assert shift_distance(x, x) == 0


def test_cylinder_rejects_empty_pattern():
    with pytest.raises(ValueError):
        Cylinder(0, "")
    with pytest.raises(ValueError):
        Cylinder(0, "012")


# --- iterate -----------------------------------------------------------------


def test_iterate_identity_on_full_shift():
    assert iterate(FS, ALT, 0) == ALT


def test_tent_single_step():
    assert iterate(TentMap(), F(2, 5), 1) == F(4, 5)


def test_odometer_adds_mod_each_level():
    assert iterate(Odometer((2, 4, 8)), (0, 0, 0), 3) == (1, 3, 3)


def test_iterate_rejects_foreign_point():
    with pytest.raises(ValueError):
        iterate(FS, F(1, 2), 1)
    with pytest.raises(ValueError):
        iterate(TentMap(), F(3, 2), 1)
    with pytest.raises(ValueError):
        iterate(FS, ALT, -1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 2**16))
def test_semigroup_law(m, n, seed):
    rng = np.random.default_rng(seed)
    x = random_point(rng, 120)
    rot = Rotation()
    odo = Odometer.dyadic(5)
    tent = TentMap()
    cases = [
        (FS, x),
        (rot, F(int(rng.integers(0, 1000)), 1000)),
        (odo, odo.point(int(rng.integers(0, 32)))),
        (tent, F(int(rng.integers(0, 81)), 81)),
        (Product(rot, odo), (F(1, 3), odo.point(5))),
    ]
    for system, p in cases:
        assert iterate(system, p, m + n) == iterate(system, iterate(system, p, m), n)


# --- return times ------------------------------------------------------------


def test_period_two_returns():
    assert return_times(FS, ALT, Cylinder(0, "0"), 10).times.members == (2, 4, 6, 8, 10)


def test_golden_rotation_returns_at_13():
    rt = return_times(Rotation(), F(0), Arc(F(-5, 100), F(5, 100)), 100)
    assert 13 in rt
    assert abs(float((13 * GOLDEN) % 1) - 0.034) < 1e-3


@pytest.mark.parametrize("system,point", [
    (FS, ALT), (Rotation(), F(1, 7)), (TentMap(), F(1, 3)), (Odometer((2, 4)), (1, 1)), (OnePoint(), 0),
])
def test_whole_space_returns_everything(system, point):
    assert return_times(system, point, Whole(), 5).times.members == (1, 2, 3, 4, 5)


def test_returns_reverify_by_iteration():
    rng = np.random.default_rng(3)
    systems = [
        (FS, random_point(rng, 300), Cylinder(-1, "10")),
        (Rotation(), F(1, 9), Arc(F(1, 10), F(3, 10))),
        (TentMap(), F(1, 7), Interval.open(F(1, 5), F(3, 5))),
        (Odometer.dyadic(4), (0, 0, 0, 0), Residue(3, 5)),
    ]
    for system, x, u in systems:
        rt = return_times(system, x, u, 200)
        for n in range(1, 201):
            inside = system.member(u, iterate(system, x, n))
            if n in rt.excluded:
                assert n not in rt
            else:
                assert (n in rt) == bool(inside), (system.kind, n)


def test_rotation_boundary_times_are_excluded():
    # 1/4 rotated by 1/4 lands exactly on the arc end 1/2
    rt = return_times(Rotation(F(1, 4)), F(0), Arc(F(1, 4), F(1, 2)), 8)
    assert 2 in rt.excluded and 1 in rt.excluded
    assert 2 not in rt and 1 not in rt


def test_return_times_export_csv_and_json():
    rt = return_times(FS, ALT, Cylinder(0, "1"), 4)
    rows = list(csv.reader(io.StringIO(rt.to_csv())))
    assert rows[0] == ["n", "inside", "margin"]
    assert rows[1:] == [["1", "1", ""], ["2", "0", ""], ["3", "1", ""], ["4", "0", ""]]
    doc = rt.to_json()
    assert doc["times"] == "W=5;1,3" and doc["query"] == "PointToSet"


def test_horizon_must_be_positive():
    with pytest.raises(ValueError):
        return_times(FS, ALT, Whole(), 0)


def test_cancel_token_stops_generic_scan():
    token = cancel_token()
    token.set()
    with pytest.raises(Cancelled):
        return_times(TentMap(), F(1, 3), Interval.open(0, F(1, 2)), 10, cancel=token)


# --- transfer and containment -------------------------------------------------


def test_free_language_transfers_everywhere():
    assert transfer_times(FS, Cylinder(0, "1"), Cylinder(0, "0"), 10).times.members == tuple(range(1, 11))
    assert transfer_times(FS, Cylinder(0, "1"), Cylinder(0, "1"), 10).times.members == tuple(range(1, 11))


def test_tent_interval_image_transfer():
    rt = transfer_times(TentMap(), Interval.open(F(2, 5), F(3, 5)), Interval.open(F(9, 10), 1), 4)
    assert 1 in rt


def test_full_shift_containment_aligns_pattern():
    # left shift: the pattern fixed at position 3 sits at position 0 after 3 steps
    rt = containment_times(FS, Cylinder(3, "101"), Cylinder(0, "101"), 10)
    assert rt.times.members == (3,)


def test_tent_images_touch_the_boundary():
    u = Interval.open(F(2, 5), F(3, 5))
    images = [tent_iterate_interval(u, k) for k in range(1, 5)]
    assert [str(i) for i in images] == ["(4/5, 1]", "[0, 2/5)", "[0, 4/5)", "[0, 1]"]
    assert containment_times(TentMap(), u, Interval.open(0, 1), 6).times.members == ()
    assert containment_times(TentMap(), u, Interval(0, 1, True, False), 6).times.members == (2, 3)


@pytest.mark.parametrize("system,u", [
    (FS, Cylinder(0, "1")), (Rotation(), Arc(0, F(1, 10))), (TentMap(), Interval.open(0, F(1, 3))),
    (Odometer((2, 4)), Residue(1, 0)),
])
def test_everything_contained_in_whole(system, u):
    assert containment_times(system, u, Whole(), 5).times.members == (1, 2, 3, 4, 5)


@settings(max_examples=200, deadline=None)
@given(st.integers(-4, 4), words(), st.integers(-4, 4), words(), st.integers(1, 12))
def test_full_shift_queries_match_brute_force(ou, pu, ov, pv, n):
    u, v = Cylinder(ou, pu), Cylinder(ov, pv)
    assert (n in containment_times(FS, u, v, 12)) == oracles.full_shift_contains(ou, pu, ov, pv, n)
    assert (n in transfer_times(FS, u, v, 12)) == oracles.full_shift_meets(ou, pu, ov, pv, n)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_return_then_contain_law(seed):
    rng = np.random.default_rng(seed)
    x = random_point(rng, 200)
    u = Cylinder(int(rng.integers(-2, 3)), "".join(map(str, rng.integers(0, 2, int(rng.integers(1, 4))))))
    v = Cylinder(int(rng.integers(-2, 3)), "".join(map(str, rng.integers(0, 2, int(rng.integers(1, 4))))))
    horizon = 100
    nu = return_times(FS, x, u, horizon)
    cuv = containment_times(FS, u, v, horizon)
    nv = return_times(FS, x, v, horizon)
    for l in nu:
        for s in cuv:
            if l + s <= horizon:
                assert l + s in nv


def test_coded_shift_language_matches_concatenations():
    gens = ["01", "011", "0111"]
    cs = CodedShift(gens)
    for length in range(1, 7):
        lang = oracles.coded_language(gens, length)
        for bits in range(2**length):
            w = format(bits, f"0{length}b")
            assert cs.admissible(Cylinder(0, w).constraints()) == (w in lang), w


def test_coded_shift_transfer_and_containment_by_brute_force():
    gens = ["01", "011"]
    cs = CodedShift(gens)
    for p in ["1", "01", "11"]:
        for q in ["0", "1", "11"]:
            tr = transfer_times(cs, Cylinder(0, p), Cylinder(0, q), 6)
            ct = containment_times(cs, Cylinder(0, p), Cylinder(0, q), 6)
            for n in range(1, 7):
                length = max(len(p), n + len(q))
                lang = [w for w in oracles.coded_language(gens, length) if w.startswith(p)]
                meets = any(w[n : n + len(q)] == q for w in lang)
                contained = all(w[n : n + len(q)] == q for w in lang)
                assert (n in tr) == meets
                assert (n in ct) == contained


def test_coded_shift_budget_is_named():
    cs = CodedShift(["01", "011"], span_budget=8)
    with pytest.raises(BudgetExceeded, match="span_budget=8") as info:
        transfer_times(cs, Cylinder(0, "1"), Cylinder(0, "1"), 20)
    assert info.value.budget == 8


def test_empty_cylinder_rejected_for_containment():
    with pytest.raises(PreconditionError):
        containment_times(CodedShift(["01", "011"]), Cylinder(0, "00"), Cylinder(0, "1"), 3)


def test_rotation_arcs_exact():
    rot = Rotation(F(1, 3))
    a = Arc(0, F(1, 10))
    assert transfer_times(rot, a, Arc(F(1, 3), F(2, 5)), 6).times.members == (1, 4)
    assert containment_times(rot, Arc(F(1, 30), F(1, 20)), Arc(F(1, 3), F(2, 5)), 6).times.members == (1, 4)
    # an image whose end lands on the target boundary is excluded, not reported
    edge = containment_times(rot, Arc(F(1, 30), F(2, 30)), Arc(F(1, 3), F(2, 5)), 6)
    assert edge.times.members == () and edge.excluded == (1, 4)


def test_odometer_cylinder_queries():
    odo = Odometer((2, 4, 8))
    assert transfer_times(odo, Residue(2, 1), Residue(3, 7), 8).times.members == (2, 6)
    assert containment_times(odo, Residue(2, 1), Residue(1, 0), 4).times.members == (1, 3)
    assert containment_times(odo, Residue(1, 0), Residue(2, 1), 4).times.members == ()


# --- metrics and structural properties ---------------------------------------


def test_rotation_is_isometry():
    rot = Rotation()
    x, y = F(1, 5), F(7, 11)
    d = circle_distance(x, y)
    for n in (1, 10, 1000):
        assert rot.distance(rot.iterate(x, n), rot.iterate(y, n)) == d


def _is_unit(image):
    return (image.lo, image.hi, image.lo_closed, image.hi_closed) == (0, 1, True, True)


def test_tent_covering_property():
    grid = [F(k, 64) for k in range(64)]
    for k in range(1, 6):
        length = F(2, 2**k)
        for lo in grid:
            # length 2^(1-k) contains a closed dyadic interval of length 2^-(k+1)
            if lo + length <= 1:
                assert _is_unit(tent_iterate_interval(Interval.open(lo, lo + length), k + 1))
            # anything longer already contains one of length 2^-k
            if lo + length + F(1, 128) <= 1:
                assert _is_unit(tent_iterate_interval(Interval.open(lo, lo + length + F(1, 128)), k))


def test_tent_covering_threshold_is_sharp():
    # the aligned interval of length exactly 2^(1-k) misses 0 after k steps
    image = tent_iterate_interval(Interval.open(0, F(1, 2)), 2)
    assert str(image) == "(0, 1]"


def test_tent_exact_matches_float_on_dyadics():
    for num in range(0, 33):
        x = F(num, 32)
        assert float(TentMap().iterate(x, 3)) == oracles.tent_float_orbit(num / 32, 3)


def test_tent_periodic_points():
    assert tent_periodic_points(1) == [F(0), F(2, 3)]
    assert tent_periodic_points(2) == [F(2, 5), F(4, 5)]
    assert len(tent_periodic_points(3)) == 6


def test_product_metric_and_box_returns():
    rot, tent = Rotation(), TentMap()
    prod = Product(rot, tent)
    a, b = (F(1, 10), F(1, 3)), (F(3, 10), F(1, 2))
    assert prod.distance(a, b) == max(rot.distance(a[0], b[0]), tent.distance(a[1], b[1]))
    u_left, u_right = Arc(0, F(1, 5)), Interval.open(0, F(1, 2))
    both = return_times(prod, a, ProductBox(u_left, u_right), 300)
    left = return_times(rot, a[0], u_left, 300)
    right = return_times(tent, a[1], u_right, 300)
    assert set(both) == set(left) & set(right)


def test_product_ball_is_box_of_balls():
    prod = Product(FS, Odometer.dyadic(3))
    box = prod.basic(Ball((ALT, (0, 0, 0)), F(1, 3)))
    assert box.left == Cylinder(-1, "101") and box.right == Residue(2, 0)


def test_odometer_needs_divisibility_chain():
    with pytest.raises(ValueError):
        Odometer((2, 6, 8))


def test_odometer_distance_counts_agreeing_levels():
    odo = Odometer.dyadic(3)
    assert odo.distance((0, 0, 0), (0, 2, 2)) == F(1, 2)
    assert odo.distance((1, 1, 1), (1, 1, 5)) == F(1, 4)
    assert odo.distance((1, 1, 1), (1, 1, 1)) == 0


def test_restricted_transfer_on_fiber():
    prod = Product(Rotation(), TentMap())
    fiber = Fiber(F(0))
    v = ProductBox(Arc(F(-1, 20), F(1, 20)), Interval.open(F(2, 5), F(1, 2)))
    u = ProductBox(Arc(F(-1, 20), F(1, 20)), Interval.open(F(1, 10), F(1, 5)))
    times, _ = restricted_transfer(prod, fiber, v, u, 200)
    base = return_times(Rotation(), F(0), u.left, 200)
    assert times and set(times) <= set(base)


def test_restricted_transfer_on_points():
    odo = Odometer.dyadic(3)
    pts = FinitePoints(((0, 0, 0), (1, 1, 1)))
    times, _ = restricted_transfer(odo, pts, Residue(3, 0), Residue(3, 1), 20)
    assert times == [1, 9, 17]
    assert restricted_transfer(FS, WholeSpace(), Cylinder(0, "1"), Cylinder(0, "0"), 3)[0] == [1, 2, 3]


# --- limit sets ---------------------------------------------------------------


def test_limit_set_of_fixed_point():
    zero = SymbolicPoint()
    probe = limit_set_probe(FS, zero, 5, 50, F(1, 8))
    assert len(probe) == 1 and probe.representatives[0] == zero


def test_limit_set_of_single_one():
    x = SymbolicPoint.from_word("1", 0)
    probe = limit_set_probe(FS, x, 20, 200, F(1, 8))
    assert len(probe) == 1
    assert shift_distance(probe.representatives[0], SymbolicPoint(), 4) == 0


def test_limit_set_of_golden_rotation_covers_circle():
    probe = limit_set_probe(Rotation(), F(0), 100, 5000, F(1, 100))
    assert len(probe) >= 100


def test_limit_set_requires_burn_in_below_horizon():
    with pytest.raises(ValueError):
        limit_set_probe(FS, ALT, 10, 10, F(1, 2))


# --- Toeplitz -----------------------------------------------------------------


def test_purely_periodic_toeplitz():
    flow = make_toeplitz(ToeplitzSpec((2,), "0", "1"), 40)
    assert flow.point == SymbolicPoint.from_window(40, "01" * 40 + "0")
    assert flow.point.word(0, 6) == "010101"
    assert aperiodic_positions(flow.point, (2,), -40, 41).size == 0
    assert aperiodic_readout(flow.point, (2,), -40, 41) == ""


def test_hole_doubling_density_and_per2():
    spec = ToeplitzSpec.standard(5, seed=2)
    for stage in range(1, 6):
        assert hole_density(spec, stage) == 2.0**-stage
    flow = make_toeplitz(spec, 2000)
    per2 = set(periodic_positions(flow.point, 2, -2000, 2001).tolist())
    assert all(n in per2 for n in range(-2000, 2001, 2))


def test_depth_six_readout():
    flow = make_toeplitz(ToeplitzSpec.standard(6, seed=7), 5000)
    aper = aperiodic_positions(flow.point, (64,), 0, 1000).tolist()
    assert aper == [n for n in range(1000) if n % 64 == 63]
    word = aperiodic_readout(flow.point, (64,), 0, 1000)
    assert word == "".join(str(flow.point[n]) for n in aper)
    assert flow.project(3) == (1, 3, 3, 3, 3, 3)


def test_toeplitz_rejects_bad_chain():
    with pytest.raises(ValueError):
        ToeplitzSpec((2, 6, 8))
    with pytest.raises(ValueError):
        ToeplitzSpec.standard(0)


def test_toeplitz_language_is_sampled():
    flow = make_toeplitz(ToeplitzSpec.standard(3, seed=1), 500)
    word = flow.point.word(0, 8)
    ref = flow.point.word(-500, 501)
    starts = [i for i in range(len(ref) - 16) if ref[i : i + 8] == word]
    expected = tuple(n for n in range(1, 9) if all(ref[i + n] == "0" for i in starts))
    assert containment_times(flow.system, Cylinder(0, word), Cylinder(0, "0"), 8).times.members == expected
    assert 2 in expected and 4 in expected


# --- JSON specs ---------------------------------------------------------------


@pytest.mark.parametrize("doc", [
    {"kind": "FullShift"},
    {"kind": "SubshiftFromGenerators", "words": ["01", "011"], "span_budget": 64},
    {"kind": "Rotation", "alpha": "golden"},
    {"kind": "Rotation", "alpha": "1/3"},
    {"kind": "TentMap"},
    {"kind": "Odometer", "periods": [2, 4, 8]},
    {"kind": "OnePoint"},
    {"kind": "Toeplitz", "periods": [2, 4], "stage_word": "01", "hole_fill": "random", "seed": 0, "radius": 32},
    {"kind": "Product", "left": {"kind": "FullShift"}, "right": {"kind": "Odometer", "periods": [2, 4]}},
])
def test_system_spec_round_trip(doc):
    system = system_from_spec(doc)
    assert system.to_spec() == doc
    assert system_from_spec(system.to_spec()) == system
    assert spec_hash(doc) == spec_hash(json.loads(json.dumps(doc)))


@pytest.mark.parametrize("doc", [{}, {"kind": "Nope"}, {"kind": "Odometer"}, {"kind": "Odometer", "periods": [2, 3]}])
def test_bad_system_specs(doc):
    with pytest.raises(SpecError):
        system_from_spec(doc)


def test_open_set_documents():
    prod = system_from_spec({"kind": "Product", "left": {"kind": "Rotation"}, "right": {"kind": "TentMap"}})
    box = open_set_from_json(prod, {"type": "ProductBox",
                                    "left": {"type": "Arc", "lo": "-0.05", "hi": "0.05"},
                                    "right": {"type": "Interval", "lo": "0.4", "hi": "0.6"}})
    assert box.right == Interval.open(F(2, 5), F(3, 5))
    assert open_set_from_json(prod, box.to_json()) == box
    cyl = open_set_from_json(FS, {"type": "Cylinder", "offset": -1, "pattern": "10"})
    assert cyl == Cylinder(-1, "10") and open_set_from_json(FS, cyl.to_json()) == cyl
    ball = open_set_from_json(TentMap(), {"type": "Ball", "center": "1/2", "radius": "1/8"})
    assert TentMap().basic(ball) == Interval.open(F(3, 8), F(5, 8))
    merged = IntervalSet((Interval.open(0, F(1, 4)), Interval(F(1, 4), F(1, 2), True, False)))
    assert merged.pieces == (Interval.open(0, F(1, 2)),)
    with pytest.raises(SpecError):
        open_set_from_json(FS, {"type": "Hexagon"})


def test_eta_margin_value():
    assert ETA == F(1, 10**9)


def test_rotation_coding_is_balanced():
    x = rotation_coding(GOLDEN, 200)
    ones = [int(x.window(i, i + 20).sum()) for i in range(-200, 181)]
    assert max(ones) - min(ones) <= 1
