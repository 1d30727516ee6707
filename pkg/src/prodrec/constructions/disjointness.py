"""Common return times between a ladder point and a distal point, over grids of open sets."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from ..errors import PreconditionError
from ..recurrence import RecurrenceReport, Verdict
from .common import Transcript, system_doc
from ..systems import Arc, Cylinder, Odometer, OnePoint, Product, Residue, Rotation, Whole


def cylinder_grid(max_length: int) -> list[Cylinder]:
    """Every ``Cyl(0, w)`` with ``1 <= |w| <= max_length``."""
    return [Cylinder(0, "".join(w)) for n in range(1, max_length + 1)
            for w in itertools.product("01", repeat=n)]


def residue_grid(odometer: Odometer, max_level: int) -> list[Residue]:
    out = []
    for level in range(1, min(max_level, len(odometer.periods)) + 1):
        out.extend(Residue(level, v) for v in range(odometer.periods[level - 1]))
    return out


def arc_grid(width) -> list[Arc]:
    width = Fraction(width)
    count = int(1 / width)
    return [Arc(k * width, (k + 1) * width) for k in range(count)]


def _distal_handle(system) -> bool:
    if isinstance(system, (Rotation, Odometer, OnePoint)):
        return True
    return isinstance(system, Product) and _distal_handle(system.left) and _distal_handle(system.right)


def disjointness_probe(system_x, x, system_y, y, v_grid, w_grid, horizon: int, ladder=None) -> RecurrenceReport:
    """Check ``N(x, V) ∩ N(y, W) ≠ ∅`` for every ``V`` in ``v_grid`` and ``W`` in ``w_grid``.

    With a ladder, targets that appear in ``v_grid`` also report whether a
    recorded finite sum is itself a common time.
    """
    if not _distal_handle(system_y):
        raise PreconditionError(
            f"{type(system_y).__name__} is not a supported distal system (rotation, odometer, one-point or products)")
    x_masks = [system_x.orbit_mask(x, v, horizon)[0].astype(bool) for v in v_grid]
    y_masks = [system_y.orbit_mask(y, w, horizon)[0].astype(bool) for w in w_grid]
    empty, first = [], {}
    for a, mx in enumerate(x_masks):
        for b, my in enumerate(y_masks):
            common = np.flatnonzero(mx[1:] & my[1:])
            if common.size == 0:
                empty.append((a, b))
            else:
                first[(a, b)] = int(common[0]) + 1
    evidence = {
        "first_times": [[first.get((a, b)) for b in range(len(y_masks))] for a in range(len(x_masks))],
        "pairs": len(x_masks) * len(y_masks),
        "empty": len(empty),
        "latest_first_time": max(first.values(), default=0),
        "w_containing_y": sum(1 for w in w_grid if isinstance(w, Whole) or system_y.member(w, y)),
    }
    if ladder is not None:
        evidence["ip_witnesses"] = _ip_witnesses(ladder, v_grid, w_grid, y_masks)
    if empty:
        a, b = empty[0]
        evidence["offending_pair"] = {"V": v_grid[a].to_json(), "W": w_grid[b].to_json()}
        return RecurrenceReport("Disjointness", Verdict.FAILS, horizon, evidence)
    return RecurrenceReport("Disjointness", Verdict.HOLDS, horizon, evidence)


def _ip_witnesses(ladder, v_grid, w_grid, y_masks) -> list[dict]:
    out = []
    for i, target in enumerate(ladder.targets, start=1):
        if target not in v_grid:
            continue
        sums = [s for s in ladder.sums(i) if s < len(y_masks[0])]
        hits = sum(1 for my in y_masks if any(my[s] for s in sums))
        out.append({"target": i, "sums": len(sums), "w_with_sum_witness": hits, "w_total": len(y_masks)})
    return out


def disjointness_transcript(system_x, x, system_y, y, v_grid, w_grid, report: RecurrenceReport) -> Transcript:
    return Transcript("disjointness", {
        "x_system": system_doc(system_x), "x": system_x.point_to_json(x),
        "y_system": system_doc(system_y), "y": system_y.point_to_json(y),
        "V": [v.to_json() for v in v_grid], "W": [w.to_json() for w in w_grid],
        "first_times": report.evidence["first_times"], "horizon": report.horizon,
        "verdict": report.verdict.value,
    })
