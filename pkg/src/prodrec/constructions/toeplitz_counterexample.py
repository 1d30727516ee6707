"""Two points in one Toeplitz fiber that never return synchronously to long cylinders."""

from __future__ import annotations

import numpy as np

from ..recurrence import RecurrenceReport, Verdict
from .common import Transcript
from ..systems import (Cylinder, FullShift, ToeplitzSpec, aperiodic_positions, make_toeplitz,
                       skeleton)


def _returns(point, cyl: Cylinder, window: int) -> np.ndarray:
    return FullShift().orbit_mask(point, cyl, window)[0].astype(bool)


def build_toeplitz_counterexample(depth: int, window: int, seed: int = 0, hole_fill: str = "random",
                                  max_length: int | None = None) -> RecurrenceReport:
    """Flip the first aperiodic symbol at or after 0 and scan cylinder lengths ``1..K+1``.

    Holds when length ``K+1`` has no common return up to ``window`` while
    every shorter length has one.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1; try depth 6")
    spec = ToeplitzSpec.standard(depth, seed=seed, hole_fill=hole_fill)
    probe = 4 * spec.hole_period
    flow = make_toeplitz(spec, window + probe + 1)
    x = flow.point
    aper = aperiodic_positions(x, spec.periods, 0, probe)
    if aper.size == 0:
        raise ValueError(f"no aperiodic positions at depth {depth} with hole_fill={hole_fill!r}; "
                         "use random hole filling or a larger depth")
    k = int(aper[0])
    y = x.with_symbols({k: 1 - x[k]})

    # same fiber: the periodic skeleton is untouched
    _, is_hole = skeleton(spec, -flow.radius, flow.radius + 1)
    diff = np.flatnonzero(x.window(-flow.radius, flow.radius + 1) != y.window(-flow.radius, flow.radius + 1))
    same_fiber = bool(diff.size == 1 and is_hole[diff[0]])

    top = k + 1 if max_length is None else max_length
    counts = []
    for length in range(1, top + 1):
        u, v = Cylinder(0, x.word(0, length)), Cylinder(0, y.word(0, length))
        common = _returns(x, u, window)[1:] & _returns(y, v, window)[1:]
        counts.append({"length": length, "common": int(common.sum()),
                       "first": int(np.argmax(common)) + 1 if common.any() else None})
    threshold = next((c["length"] for c in counts if c["common"] == 0), None)
    evidence = {
        "spec": spec.to_json(), "window": window, "K": k, "flipped": k,
        "same_fiber": same_fiber, "threshold": threshold,
        "control_common": counts[0]["common"], "scan": counts,
    }
    evidence["x"] = {"lo": 0, "data": x.word(0, window + k + 2)}
    ok = same_fiber and threshold == k + 1 and counts[0]["common"] > 0
    return RecurrenceReport("ToeplitzSynchronization", Verdict.HOLDS if ok else Verdict.FAILS, window, evidence)


def toeplitz_transcript(report: RecurrenceReport) -> Transcript:
    e = report.evidence
    keep = {c["length"]: c for c in e["scan"]}
    k = e["K"]
    return Transcript("toeplitz-sync", {
        "spec": e["spec"], "window": e["window"], "K": k, "x": e["x"],
        "scan": [keep[n] for n in sorted({1, k, k + 1} & set(keep))],
        "verdict": report.verdict.value,
    })
