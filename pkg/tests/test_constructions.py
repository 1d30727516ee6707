import json
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from prodrec.constructions import (ThickBlockSpec, arc_grid, build_ip_return_point, build_md_point,
                                   build_toeplitz_counterexample, check_md_construction, cylinder_grid,
                                   diagonal_order, disjointness_probe, extend_ip_ladder,
                                   omega_limit_escape_example, residue_grid, search_wpr_points,
                                   synchronization_check, verify_weak_mixing_order_n)
from prodrec.constructions.toeplitz_counterexample import toeplitz_transcript
from prodrec.errors import BudgetExceeded, PreconditionError
from prodrec.families import WindowSet, is_ip_at_depth
from prodrec.harness.replay import replay_document
from prodrec.recurrence import Verdict, distality_probe
from prodrec.systems import (GOLDEN, Arc, Cylinder, CylinderSubset, Fiber, FinitePoints, FullShift,
                             Interval, Odometer, OnePoint, Product, ProductBox, Residue, Rotation,
                             SymbolicPoint, TentMap, Whole, WholeSpace, containment_times, restricted_transfer,
                             return_times, rotation_coding, tent_periodic_points)

from . import oracles

FS = FullShift()
RT = Product(Rotation(), TentMap())
X0 = F(1, 3)
ALT = SymbolicPoint.periodic_point("01")


def replayed(transcript):
    return replay_document(json.loads(transcript.dumps()))


def fiber_box(lo, width=F(1, 10), arc_width=F(1, 10)):
    return ProductBox(Arc(X0 - arc_width / 2, X0 + arc_width / 2), Interval.open(lo, lo + width))


# -- diagonal order and blocks -----------------------------------------------------

def test_diagonal_order_starts_along_antidiagonals():
    assert diagonal_order(None, None, 6) == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]
    assert diagonal_order(2, 4) == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (1, 4), (2, 3), (2, 4)]


def test_cube_blocks_rows_follow_the_order_constraint():
    spec = ThickBlockSpec.cubes(10**4)
    assert len(spec.blocks) == 21
    assert [b.start for b in spec.row(1)] == [1, 8, 64, 343, 1331, 4096]
    for i in range(1, 6):
        row, nxt = spec.row(i), spec.row(i + 1)
        assert all(a.col < b.col for a, b in zip(row, row[1:]))
        assert row[0].start < nxt[0].start


def test_block_gap_condition_is_enforced():
    with pytest.raises(ValueError, match="n_\\(j\\+1\\)"):
        ThickBlockSpec.from_starts([1, 2, 10])


# -- md point --------------------------------------------------------------------

def test_md_point_alternating_returns_are_even_and_in_blocks():
    result = build_md_point(ALT, Cylinder(0, "0"), ThickBlockSpec.cubes(10**4), 4)
    assert result.complete
    blocks = ThickBlockSpec.cubes(10**4).union_mask(10**4)
    returns = result.returns_to_target()
    assert returns.members
    assert all(n % 2 == 0 and blocks[n] for n in returns)
    # frozen from the construction; the independent replayer re-checks every invariant
    assert result.stages[-1].times.members == (1004, 2748, 6862, 6872)
    replay = replayed(result.transcript())
    assert replay.ok, replay.failures


def test_md_point_depth_one_is_the_stage_one_formula():
    result = build_md_point(ALT, Cylinder(0, "0"), ThickBlockSpec.cubes(10**4), 1)
    assert len(result.stages) == 1
    row1 = [(1, 1), (8, 2), (64, 4), (343, 7), (1331, 11), (4096, 16)]
    expected = [i for s, n in row1 for i in range(s, s + n) if i % 2 == 0 and i >= 1]
    assert list(result.stages[0].times.members) == expected


def test_md_point_sturmian_passes_replay():
    x = rotation_coding(GOLDEN, 10100)
    result = build_md_point(x, Cylinder(0, "0"), ThickBlockSpec.cubes(10**4), 3)
    assert result.complete
    checks = check_md_construction(result)
    assert checks["returns_inside_S1_S2"]
    assert all(s["A_in_returns"] and s["piecewise_syndetic"] for s in checks["stages"])
    assert replayed(result.transcript()).ok


def test_md_point_rejects_a_non_minimal_point_naming_the_gap():
    x = SymbolicPoint.from_word("1")
    with pytest.raises(PreconditionError, match="gap of"):
        build_md_point(x, Cylinder(0, "1"), ThickBlockSpec.cubes(1000), 2)


def test_md_point_runs_out_of_rows_and_flags_inconclusive():
    result = build_md_point(ALT, Cylinder(0, "0"), ThickBlockSpec.cubes(10**4), 8)
    assert not result.complete
    assert result.transcript().body["status"] == "inconclusive"


def test_md_point_is_deterministic():
    a = build_md_point(ALT, Cylinder(0, "0"), ThickBlockSpec.cubes(10**4), 4).transcript().dumps()
    b = build_md_point(ALT, Cylinder(0, "0"), ThickBlockSpec.cubes(10**4), 4).transcript().dumps()
    assert a == b


def test_md_limit_is_proximal_to_the_zero_point():
    result = build_md_point(ALT, Cylinder(0, "0"), ThickBlockSpec.cubes(2000), 2, window=2000)
    report = distality_probe(FS, result.limit, F(1, 8), 3000, candidates=[SymbolicPoint(())], orbit_budget=0)
    assert report.verdict is Verdict.FAILS


def test_md_replay_catches_a_corrupted_stage():
    doc = json.loads(build_md_point(ALT, Cylinder(0, "0"), ThickBlockSpec.cubes(10**4), 4).transcript().dumps())
    doc["stages"][3]["A"] = "W=10000;1004,2748,6862,6870"
    res = replay_document(doc)
    assert not res.ok
    assert {f["stage"] for f in res.failures} == {"stage 4"}


# -- IP ladder -------------------------------------------------------------------

def _brute_returns(z, cyl, n):
    return all(z[cyl.offset + n + i] == s for i, s in enumerate(cyl.pattern))


def test_ladder_two_targets_depth_three():
    targets = [Cylinder(0, "0"), Cylinder(0, "11")]
    ladder = build_ip_return_point(FS, WholeSpace(), Cylinder(0, "1"), targets, 3)
    assert ladder.order == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3)]
    for i, v in enumerate(targets, start=1):
        sums = oracles.all_sums(ladder.generators(i))
        assert len(sums) == 7
        assert all(_brute_returns(ladder.limit, v, s) for s in sums)
    assert ladder.limit[0] == 1
    assert replayed(ladder.transcript()).ok


def test_ladder_single_step_is_one_transfer_time():
    ladder = build_ip_return_point(FS, WholeSpace(), Cylinder(0, "1"), [Cylinder(0, "0")], 1)
    assert ladder.generators(1) == [1]
    assert ladder.check()["ok"]


def test_ladder_on_the_rotation_tent_fiber():
    u = ProductBox(Arc(X0 - F(1, 20), X0 + F(1, 20)), Interval.open(F(2, 5), F(3, 5)))
    v = fiber_box(F(1, 10))
    ladder = build_ip_return_point(RT, Fiber(X0), u, [v], 2)
    check = ladder.check()
    assert check["ok"], check
    for s in ladder.sums(1):
        assert RT.member(v, RT.iterate(ladder.limit, s)) is True
    assert replayed(ladder.transcript()).ok


def test_ladder_return_sets_pass_the_ip_classifier():
    targets = [Cylinder(0, "01"), Cylinder(0, "110")]
    ladder = build_ip_return_point(FS, WholeSpace(), Cylinder(0, "1"), targets, 4)
    for i, v in enumerate(targets, start=1):
        top = max(ladder.sums(i)) + 1
        returns = return_times(FS, ladder.limit, v, top).times
        assert set(ladder.sums(i)) <= set(returns.members)
        assert is_ip_at_depth(WindowSet.of(returns.members, top), 4)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.tuples(st.integers(-2, 2), st.text("01", min_size=1, max_size=3)), min_size=1, max_size=3),
       st.integers(1, 3), st.integers(0, 2**32))
def test_ladder_invariants_hold_for_random_targets(targets, depth, seed):
    cyls = [Cylinder(o, w) for o, w in targets]
    ladder = build_ip_return_point(FS, WholeSpace(), Cylinder(0, "1"), cyls, depth, seed=seed)
    check = ladder.check()
    assert check["ok"], check
    for t in check["targets"]:
        assert t["sums"] == 2**depth - 1
    assert replayed(ladder.transcript()).ok


def test_extend_from_the_empty_ladder():
    one = SymbolicPoint.periodic_point("1")
    p, u2, v2 = extend_ip_ladder(FS, WholeSpace(), Cylinder(0, "1"), Cylinder(0, "1"), [], one, one)
    assert p == 1


def test_extend_ladder_two():
    one = SymbolicPoint.periodic_point("1")
    v = Cylinder(0, "1")
    p, u2, v2 = extend_ip_ladder(FS, WholeSpace(), Cylinder(0, "1"), v, [2], one, one)
    assert p >= 3
    for cyl in (u2, v2):
        inside = set(containment_times(FS, cyl, v, 2 + p).times.members)
        assert {2, p, 2 + p} <= inside


def test_extend_rejects_sums_outside_the_return_set():
    x = SymbolicPoint.periodic_point("10")
    with pytest.raises(PreconditionError, match="sum 1"):
        extend_ip_ladder(FS, WholeSpace(), Cylinder(0, "1"), Cylinder(0, "1"), [1], x, x)


def test_ladder_search_budget_names_the_budget():
    with pytest.raises(BudgetExceeded) as info:
        build_ip_return_point(FS, WholeSpace(), Cylinder(0, "10"), [Cylinder(0, "1")], 1, budget=1)
    assert info.value.budget == 1


def test_ladder_replay_fails_at_the_stage_missing_a_sum():
    targets = [Cylinder(0, "01"), Cylinder(0, "110")]
    doc = json.loads(build_ip_return_point(FS, WholeSpace(), Cylinder(0, "1"), targets, 4).transcript().dumps())
    doc["steps"][3]["sums"].pop()
    res = replay_document(doc)
    assert not res.ok
    assert res.failures[0]["stage"] == "step (1,3)"
    assert res.failures[0]["set"] == "sums"


# -- weak mixing of order n ---------------------------------------------------------

def test_full_shift_order_three_is_found_within_the_span():
    us = [Cylinder(0, "101"), Cylinder(2, "0"), Cylinder(-1, "11")]
    vs = [Cylinder(0, "1"), Cylinder(0, "00"), Cylinder(1, "0110")]
    report = verify_weak_mixing_order_n(FS, WholeSpace(), us, vs, 100)
    span = max(c.end for c in us + vs) - min(c.offset for c in us + vs)
    assert report.verdict is Verdict.HOLDS
    assert report.evidence["k"] <= span + 1
    k = report.evidence["k"]
    for u, v in zip(us, vs):
        assert oracles.full_shift_meets(v.offset, v.word, u.offset, u.word, k)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.text("01", min_size=1, max_size=4)), min_size=6, max_size=6))
def test_full_shift_weak_mixing_matches_brute_force(cyls):
    cyls = [Cylinder(o, w) for o, w in cyls]
    us, vs = cyls[:3], cyls[3:]
    report = verify_weak_mixing_order_n(FS, WholeSpace(), us, vs, 20)
    first = next((k for k in range(1, 21)
                  if all(oracles.full_shift_meets(v.offset, v.word, u.offset, u.word, k) for u, v in zip(us, vs))),
                 None)
    assert report.evidence.get("k") == first


def test_rotation_tent_fiber_order_three():
    us = [fiber_box(F(1, 10)), fiber_box(F(1, 2)), fiber_box(F(4, 5))]
    vs = [fiber_box(F(3, 10)), fiber_box(F(0)), fiber_box(F(9, 10))]
    report = verify_weak_mixing_order_n(RT, Fiber(X0), us, vs, 10**4, induction=True)
    assert report.verdict is Verdict.HOLDS
    assert [c["k"] is not None for c in report.evidence["induction"]] == [True] * 3


def test_odometer_two_points_are_not_weakly_mixing():
    odo = Odometer.dyadic(8)
    a = FinitePoints((odo.point(0), odo.point(1)))
    report = verify_weak_mixing_order_n(odo, a, [Residue(3, 0), Residue(3, 1)], [Residue(3, 0), Residue(3, 0)], 10**4)
    assert report.verdict is Verdict.FAILS


def test_weak_mixing_needs_sets_meeting_the_subset():
    far = ProductBox(Arc(F(7, 10), F(8, 10)), Interval.open(0, 1))
    with pytest.raises(PreconditionError, match="U_1"):
        verify_weak_mixing_order_n(RT, Fiber(X0), [far], [fiber_box(F(0))], 100)


def test_cylinder_subset_transfer_matches_brute_force():
    b = CylinderSubset(Cylinder(0, "1"))
    times, _ = restricted_transfer(FS, b, Cylinder(0, "11"), Cylinder(0, "0"), 8)
    assert times == [k for k in range(1, 9) if oracles.full_shift_meets(0, "11", 0, "0", k) and k >= 2]


# -- disjointness ------------------------------------------------------------------

@pytest.fixture(scope="module")
def ladder_point():
    targets = [Cylinder(0, "01"), Cylinder(0, "110")]
    return build_ip_return_point(FS, WholeSpace(), Cylinder(0, "1"), targets, 4, horizon=20000)


def test_disjointness_against_the_odometer(ladder_point):
    odo = Odometer.dyadic(8)
    report = disjointness_probe(FS, ladder_point.limit, odo, odo.zero, cylinder_grid(4), residue_grid(odo, 4),
                                20000, ladder_point)
    assert report.verdict is Verdict.HOLDS
    assert report.evidence["pairs"] == 900
    assert report.evidence["w_containing_y"] == 4


def test_disjointness_one_point_is_trivial(ladder_point):
    report = disjointness_probe(FS, ladder_point.limit, OnePoint(), 0, cylinder_grid(3), [Whole()], 1000)
    assert report.verdict is Verdict.HOLDS


def test_disjointness_against_the_golden_rotation(ladder_point):
    report = disjointness_probe(FS, ladder_point.limit, Rotation(), F(1, 20), cylinder_grid(3),
                                arc_grid(F(1, 10)), 10**4)
    assert report.verdict is Verdict.HOLDS


def test_disjointness_reports_the_offending_pair():
    odo = Odometer.dyadic(4)
    report = disjointness_probe(FS, SymbolicPoint(()), odo, odo.zero, [Cylinder(0, "1")], residue_grid(odo, 1), 500)
    assert report.verdict is Verdict.FAILS
    assert report.evidence["offending_pair"]["V"]["pattern"] == "1"


def test_disjointness_needs_a_distal_handle(ladder_point):
    with pytest.raises(PreconditionError, match="TentMap"):
        disjointness_probe(FS, ladder_point.limit, TentMap(), F(1, 3), cylinder_grid(1),
                           [Interval.open(0, F(1, 2))], 10)


# -- distal sample search -------------------------------------------------------------

def test_wpr_search_on_the_fiber_with_sync_leg():
    points = [(X0, q) for period in (1, 2, 3) for q in tent_periodic_points(period)]
    out = search_wpr_points(RT, Fiber(X0), points, [1, 2, 3], 10**4)
    assert out["verdict"] is Verdict.HOLDS
    assert out["candidates"]
    z = out["candidates"][0].point
    sync = synchronization_check(RT, z, (X0, F(2, 3)), Rotation(), F(0), Arc(F(-1, 4), F(1, 4)), F(1, 4), 10**4)
    assert sync["ok"] and sync["j"] <= sync["M"]


def test_wpr_search_rejects_a_periodic_orbit():
    odo = Odometer.dyadic(3)
    with pytest.raises(PreconditionError):
        search_wpr_points(odo, FinitePoints(tuple(odo.point(n) for n in range(8))), [], [1], 100)


# -- Toeplitz counterexample -------------------------------------------------------------

def test_toeplitz_pair_has_a_sharp_threshold():
    report = build_toeplitz_counterexample(6, 10**5)
    e = report.evidence
    assert report.verdict is Verdict.HOLDS
    assert e["K"] == 63 and e["threshold"] == 64
    assert e["scan"][-1] == {"length": 64, "common": 0, "first": None}
    assert e["control_common"] > 0
    assert e["same_fiber"]
    assert replayed(toeplitz_transcript(report)).ok


def test_toeplitz_rejects_bad_depths():
    with pytest.raises(ValueError, match="depth"):
        build_toeplitz_counterexample(0, 100)
    with pytest.raises(ValueError, match="no aperiodic"):
        build_toeplitz_counterexample(3, 1000, hole_fill="0")


# -- omega-limit escape ----------------------------------------------------------------------

def test_omega_escape_at_eps_one_sixteenth():
    report = omega_limit_escape_example(F(1, 16))
    assert report.verdict is Verdict.HOLDS
    assert F(report.evidence["distance_to_omega"]) == 1
    assert report.evidence["omega_is_zero"] and report.evidence["omega_cells"] == 1


def test_omega_escape_needs_eps_below_half_the_gap():
    with pytest.raises(PreconditionError):
        omega_limit_escape_example(F(1, 2))
