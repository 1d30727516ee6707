"""A point of a weakly mixing set whose omega-limit set stays away from the set."""

from __future__ import annotations

from fractions import Fraction

from ..errors import PreconditionError
from ..recurrence import RecurrenceReport, Verdict
from ..systems import (Cylinder, CylinderSubset, FullShift, SymbolicPoint, fraction_text, limit_set_probe,
                       meets, shift_distance)
from ..systems.symbolic import ball_radius_to_width
from .common import Transcript
from .weak_mixing import verify_weak_mixing_order_n


def omega_limit_escape_example(eps, horizon: int = 200) -> RecurrenceReport:
    """``x = 1·0^∞`` inside ``B = Cyl(0, "1")``; ``ω(x) = {0^∞}`` lies at distance 1 from ``B``.

    ``B`` is a clopen cylinder of the full shift, hence weakly mixing, and it
    sits inside ``U = X \\ closed ball(0^∞, eps)``.
    """
    eps = Fraction(eps)
    shift = FullShift()
    x = SymbolicPoint.from_word("1")
    zero = SymbolicPoint(())
    gap = shift_distance(x, zero)
    if eps <= 0 or eps >= gap / 2:
        raise PreconditionError(f"eps must lie in (0, {fraction_text(gap / 2)}); got {fraction_text(eps)}")
    core = Cylinder(0, "1")
    subset = CylinderSubset(core)

    # net of cylinders fine enough to resolve eps, restricted to those meeting B
    r = ball_radius_to_width(eps)
    width = 2 * r + 1
    net = [Cylinder(-r, format(b, f"0{width}b")) for b in range(2**width)]
    net = [c for c in net if meets(shift, subset, c)]
    reps = [SymbolicPoint(c.pattern, c.offset, "zeros") for c in net]
    dist = min(shift_distance(p, zero) for p in reps)

    # order-2 weak mixing of B on two sample pairs
    us = [Cylinder(0, "10"), Cylinder(-1, "011")]
    vs = [Cylinder(0, "11"), Cylinder(0, "1")]
    mixing = verify_weak_mixing_order_n(shift, subset, us, vs, horizon)

    probe = limit_set_probe(shift, x, width + 1, horizon, eps)
    omega = sorted({tuple(p.window(-r, r + 1).tolist()) == (0,) * width for _, p in probe.cells.values()})
    evidence = {
        "x": x.to_json(), "eps": fraction_text(eps), "B": core.to_json(),
        "instantiation": "B is the cylinder Cyl(0,'1'), one concrete weakly mixing choice",
        "net_radius": r, "burn_in": width + 1,
        "net_size": len(net), "distance_to_omega": fraction_text(dist),
        "weak_mixing_k": mixing.evidence.get("k"), "omega_cells": len(probe.cells),
        "omega_is_zero": omega == [True],
    }
    ok = dist > eps and mixing.verdict is Verdict.HOLDS and omega == [True] and shift.member(core, x)
    return RecurrenceReport("OmegaEscape", Verdict.HOLDS if ok else Verdict.FAILS, horizon, evidence)


def omega_transcript(report: RecurrenceReport) -> Transcript:
    e = report.evidence
    return Transcript("omega-escape", {k: e[k] for k in ("x", "eps", "B", "net_radius", "burn_in", "distance_to_omega")}
                      | {"horizon": report.horizon, "verdict": report.verdict.value})
