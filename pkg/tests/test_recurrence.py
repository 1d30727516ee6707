from fractions import Fraction as F

import numpy as np
import pytest

from prodrec.errors import PreconditionError
from prodrec.families import Family
from prodrec.recurrence import (RecurrenceReport, Verdict, cylinder_net, distality_probe,
                                eventual_cycle, f_recurrence_probe, orbit_distance_lower_bound,
                                pair_recurrence_probe, property_p_probe, proximal_cell_density_probe,
                                proximality_probe)
from prodrec.systems import (GOLDEN, Arc, Cylinder, Fiber, FinitePoints, FullShift, Interval, Odometer,
                             Product, ProductBox, Residue, Rotation, SymbolicPoint, TentMap, Whole,
                             WholeSpace, tent_periodic_points)

FS = FullShift()
RT = Product(Rotation(), TentMap())


def test_periodic_point_is_syndetic_with_gap_period():
    for word in ("01", "011", "0010"):
        x = SymbolicPoint.periodic_point(word)
        for width in (1, 2, 3, 5):
            u = Cylinder(0, x.word(0, width))
            report = f_recurrence_probe(FS, x, u, Family.SYNDETIC, 200, gap_bound=len(word))
            assert report.verdict is Verdict.HOLDS


def test_single_one_never_returns():
    x = SymbolicPoint.from_word("1", 0)
    report = f_recurrence_probe(FS, x, Cylinder(0, "1"), "Infinite", 10**4)
    assert report.verdict is Verdict.FAILS
    assert report.evidence["times"] == "W=10001;"


def test_recurrence_needs_neighborhood_of_x():
    with pytest.raises(PreconditionError):
        f_recurrence_probe(FS, SymbolicPoint(), Cylinder(0, "1"), "Infinite", 10)


def test_eventually_equal_points_are_proximal():
    x = SymbolicPoint.from_word("1011", -4)
    y = SymbolicPoint.from_word("0110", -4)
    for eps in (F(1, 2), F(1, 64), F(1, 2**40)):
        report = proximality_probe(FS, x, y, eps, 200)
        assert report.verdict is Verdict.HOLDS
        assert F(report.evidence["distance"]) < eps


def test_rotation_refutes_proximality():
    report = proximality_probe(Rotation(), F(0), F(1, 10), F(1, 20), 500)
    assert report.verdict is Verdict.FAILS
    assert F(report.evidence["lower_bound"]) == F(1, 10)


def test_periodic_tent_fiber_pair_is_not_proximal():
    p, q = tent_periodic_points(2)
    x0 = F(1, 7)
    report = proximality_probe(RT, (x0, p), (x0, q), F(1, 4), 100)
    assert report.verdict is Verdict.FAILS
    assert F(report.evidence["lower_bound"]) == F(2, 5)


def test_unrefutable_miss_is_inconclusive():
    x = SymbolicPoint.periodic_point("01")
    y = SymbolicPoint.periodic_point("0011")
    report = proximality_probe(FS, x, y, F(1, 2**20), 50)
    # both exactly periodic: the orbit-distance table is finite and exact
    assert report.verdict is Verdict.FAILS
    z = SymbolicPoint.from_word("1", 0)
    report = proximality_probe(TentMap(), F(1, 3), F(1, 5), F(1, 10**6), 5)
    assert report.verdict in (Verdict.FAILS, Verdict.INCONCLUSIVE)
    with pytest.raises(ValueError):
        RecurrenceReport("X", Verdict.INCONCLUSIVE, 1, {})
    assert z != x


def test_distinct_points_required():
    with pytest.raises(PreconditionError):
        proximality_probe(FS, SymbolicPoint(), SymbolicPoint(), F(1, 2), 5)


def test_rotation_points_are_distal():
    assert distality_probe(Rotation(), F(1, 3), F(1, 100), 200).verdict is Verdict.HOLDS


def test_fixed_point_is_distal():
    report = distality_probe(FS, SymbolicPoint(), F(1, 8), 100)
    assert report.verdict is Verdict.HOLDS and report.evidence["candidates"] == 0


def test_distality_witness_reverifies():
    x = SymbolicPoint.from_word("1", 0)
    report = distality_probe(FS, x, F(1, 8), 200, candidates=[SymbolicPoint()], orbit_budget=0)
    assert report.verdict is Verdict.FAILS
    again = proximality_probe(FS, x, SymbolicPoint.from_json(report.evidence["point"]), F(1, 8), 200)
    assert again.verdict is Verdict.HOLDS


def test_pair_recurrence_with_fixed_point():
    zero = SymbolicPoint()
    y = SymbolicPoint.periodic_point("011")
    report = pair_recurrence_probe(FS, zero, FS, y, Cylinder(0, "0"), Cylinder(0, "01"), 20)
    assert report.verdict is Verdict.HOLDS and report.evidence["time"] == 3


def test_pair_recurrence_is_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = SymbolicPoint(rng.integers(0, 2, 201), -100, "explicit")
        y = SymbolicPoint(rng.integers(0, 2, 201), -100, "explicit")
        ux, vy = Cylinder(0, x.word(0, 3)), Cylinder(0, y.word(0, 3))
        a = pair_recurrence_probe(FS, x, FS, y, ux, vy, 60)
        b = pair_recurrence_probe(FS, y, FS, x, vy, ux, 60)
        assert a.verdict == b.verdict and a.evidence.get("time") == b.evidence.get("time")


def test_pair_recurrence_with_rotation_partner():
    rot = Rotation()
    x = SymbolicPoint.periodic_point("0110")
    report = pair_recurrence_probe(FS, x, rot, F(0), Cylinder(0, "01"), Arc(F(-1, 20), F(1, 20)), 500)
    assert report.verdict is Verdict.HOLDS


def test_horizon_monotone_for_existential_probes():
    x = SymbolicPoint.from_word("1011", -4)
    y = SymbolicPoint.from_word("0110", -4)
    first = proximality_probe(FS, x, y, F(1, 16), 200)
    for longer in (250, 400):
        assert proximality_probe(FS, x, y, F(1, 16), longer).verdict is first.verdict


def test_property_p_full_shift_fixed_point():
    report = property_p_probe(FS, WholeSpace(), Cylinder(0, "1"), 5, 100)
    assert report.verdict is Verdict.HOLDS and report.evidence["K"] == 1
    assert SymbolicPoint.from_json(report.evidence["point"]) == SymbolicPoint.periodic_point("1")


def test_property_p_period_three_orbit():
    odo = Odometer((3,))
    orbit = FinitePoints(tuple(odo.point(k) for k in range(3)))
    report = property_p_probe(odo, orbit, Residue(1, 0), 10, 99)
    assert report.verdict is Verdict.HOLDS and report.evidence["K"] == 3


def test_property_p_fails_on_rotation_tent_fiber():
    fiber = Fiber(F(0))
    u = ProductBox(Arc(F(-1, 20), F(1, 20)), Interval.open(F(2, 5), F(1, 2)))
    report = property_p_probe(RT, fiber, u, 50, 10**4)
    assert report.verdict is Verdict.FAILS
    exits = report.evidence["base_exit"]
    assert len(exits) == 50
    rot = Rotation()
    for k, n in exits.items():
        assert n % int(k) == 0 and rot.member(u.left, rot.iterate(F(0), n)) is False


def test_proximal_cells_full_shift():
    rng = np.random.default_rng(1)
    x = SymbolicPoint(rng.integers(0, 2, 401), -200, "explicit")
    report = proximal_cell_density_probe(FS, WholeSpace(), x, F(1, 8), cylinder_net(3), 100)
    assert report.verdict is Verdict.HOLDS and report.evidence["cells"] == 8
    for w in report.evidence["witnesses"]:
        y = SymbolicPoint.from_json(w["point"])
        assert FS.member(cylinder_net(3)[w["cell"]], y)
        assert FS.distance(x.shifted(w["time"]), y.shifted(w["time"])) <= F(1, 8)


def test_proximal_cells_reject_finite_sets():
    with pytest.raises(PreconditionError):
        proximal_cell_density_probe(FS, FinitePoints((SymbolicPoint(),)), SymbolicPoint(), F(1, 8),
                                    cylinder_net(3), 10)


def test_proximal_cells_on_tent_fiber():
    x = (F(0), F(1, 3))
    net = [ProductBox(Whole(), Interval.open(F(k, 10), F(k + 1, 10))) for k in range(10)]
    report = proximal_cell_density_probe(RT, Fiber(F(0)), x, F(1, 100), net, 20)
    assert report.verdict is Verdict.HOLDS and report.evidence["cells"] == 10
    for w in report.evidence["witnesses"]:
        y = RT.point_from_json(w["point"])
        n = w["time"]
        assert RT.distance(RT.iterate(x, n), RT.iterate(y, n)) <= F(1, 100)


def test_eventual_cycle_detection():
    assert eventual_cycle(TentMap(), F(2, 5)) == (0, 2)
    assert eventual_cycle(TentMap(), F(1, 8)) == (4, 1)
    assert eventual_cycle(Odometer((2, 4)), (1, 3)) == (0, 4)
    assert eventual_cycle(FS, SymbolicPoint.from_word("1", 0)) is None
    assert orbit_distance_lower_bound(Rotation(GOLDEN), F(0), F(1, 4)) == F(1, 4)


def test_report_json():
    report = proximality_probe(Rotation(), F(0), F(1, 10), F(1, 20), 5)
    doc = report.to_json()
    assert doc["verdict"] == "FailsAtScale" and doc["notion"] == "ProximalPair"
