"""Candidates that share a return time with every sampled distal point, plus the synchronization check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import PreconditionError
from ..recurrence import Verdict, distality_probe
from ..systems import (Arc, Ball, Fiber, Interval, Product, ProductBox, Rotation, TentMap,
                       fraction_text, require_perfect)
from .common import Transcript, system_doc
from .ip_ladder import build_ip_return_point

# odd prime denominator used to push a candidate off the dyadic grid
_GENERIC = 1_000_000_007


@dataclass(frozen=True)
class WprCandidate:
    point: tuple
    memberships: tuple[dict, ...]

    def to_json(self) -> dict:
        return {"point": [fraction_text(c) for c in self.point], "memberships": list(self.memberships)}


def _orbit_in(system, point, open_set, horizon) -> np.ndarray:
    return system.orbit_mask(point, open_set, horizon)[0].astype(bool)


def _fiber_ball(base, centre, radius) -> ProductBox:
    piece = Interval(max(Fraction(0), centre - radius), min(Fraction(1), centre + radius),
                     centre - radius <= 0, centre + radius >= 1)
    return ProductBox(Arc(base - radius, base + radius) if radius < Fraction(1, 2) else Arc(base - Fraction(1, 2) + Fraction(1, 10**12), base + Fraction(1, 2) - Fraction(1, 10**12)), piece)


def search_wpr_points(system, subset, distal_points, radii, horizon: int, start_box=None, seed: int = 0,
                      distal_eps=Fraction(1, 8)) -> dict:
    """Search the fiber for a point in every ``D_{i,j}`` with ``j`` in ``radii``.

    Returns ``{"verdict", "candidates", "distal", "ladder"}``; an empty candidate
    list comes back as Inconclusive.
    """
    require_perfect(subset)
    if not (isinstance(system, Product) and isinstance(subset, Fiber)
            and isinstance(system.left, Rotation) and isinstance(system.right, TentMap)):
        raise PreconditionError("the search runs on a rotation x tent fiber")
    base = Fraction(subset.base)
    distal = []
    for p in distal_points:
        if p[0] != base:
            raise PreconditionError("sample points must lie on the fiber")
        report = distality_probe(system, p, distal_eps, horizon)
        if report.verdict is not Verdict.HOLDS:
            raise PreconditionError(f"sample point {[fraction_text(c) for c in p]} is not distal at scale")
        distal.append(report.evidence)
    targets, labels = [], []
    for i, p in enumerate(distal_points, start=1):
        for j in radii:
            targets.append(_fiber_ball(base, p[1], Fraction(1, j)))
            labels.append((i, j))
    if start_box is None:
        start_box = ProductBox(Arc(base - Fraction(1, 20), base + Fraction(1, 20)),
                               Interval.open(Fraction(2, 5), Fraction(3, 5)))
    ladder = build_ip_return_point(system, subset, start_box, targets, 1, seed=seed)
    piece = ladder.final_u.interval
    centre = (piece.lo + piece.hi) / 2
    z = (base, centre + (piece.hi - piece.lo) / 4 * Fraction(seed % 97 + 1, _GENERIC))
    memberships = []
    for (i, j), target, p in zip(labels, targets, [q for q in distal_points for _ in radii]):
        common = np.flatnonzero(_orbit_in(system, z, target, horizon)[1:] & _orbit_in(system, p, target, horizon)[1:])
        memberships.append({"i": i, "j": j, "time": int(common[0]) + 1 if common.size else None})
    found = all(m["time"] is not None for m in memberships)
    out = {"ladder_generators": [ladder.generators(k)[0] for k in range(1, len(targets) + 1)]}
    if found:
        out.update(verdict=Verdict.HOLDS, candidates=[WprCandidate(z, tuple(memberships))])
    else:
        out.update(verdict=Verdict.INCONCLUSIVE, candidates=[],
                   budget={"horizon": horizon}, missing=[m for m in memberships if m["time"] is None])
    out["distal"] = distal
    return out


def synchronization_check(system, x, xi, system_y, y, v, eps, horizon: int) -> dict:
    """Follow the synchronization argument for one distal ``xi``, one ``y`` and one ``V ∋ y``.

    ``M`` bounds the gaps of ``N(xi, B(xi, eps)) ∩ N(y, V)``; ``W`` is a box
    around ``xi`` whose first ``M`` images have diameter below ``eps``; ``t`` is
    a common return of ``x`` and ``xi`` to ``W``; some ``t + j`` (``j <= M``) then
    puts ``x`` within ``2 eps`` of ``xi`` while ``y`` is in ``V``.
    """
    eps = Fraction(eps)
    ball = Ball(xi, eps)
    both = _orbit_in(system, xi, ball, horizon) & _orbit_in(system_y, y, v, horizon)
    times = np.flatnonzero(both)
    if times.size < 2:
        return {"ok": False, "reason": "no synchronized returns of xi and y in the horizon"}
    gaps = np.diff(np.concatenate(([0], times)))
    m = int(gaps.max())
    # rotation is an isometry, tent doubles lengths: shrink the interval by 2^M
    rho = eps / 4 / 2**m
    w = ProductBox(Arc(xi[0] - eps / 4, xi[0] + eps / 4),
                   Interval.open(max(Fraction(0), xi[1] - rho), min(Fraction(1), xi[1] + rho)))
    common = np.flatnonzero(_orbit_in(system, x, w, horizon)[1:] & _orbit_in(system, xi, w, horizon)[1:]) + 1
    if common.size == 0:
        return {"ok": False, "M": m, "reason": "no common return to W in the horizon"}
    t = int(common[0])
    sync = set(times.tolist())
    for j in range(m + 1):
        if t + j in sync:
            point = system.iterate(x, t + j)
            close = system.distance(point, xi) < 2 * eps
            return {"ok": bool(close), "M": m, "t": t, "j": j, "xi": [fraction_text(c) for c in xi],
                    "y": fraction_text(y), "V": v.to_json(), "y_system": system_doc(system_y),
                    "distance": float(system.distance(point, xi)), "eps": fraction_text(eps)}
    return {"ok": False, "M": m, "t": t, "reason": "no synchronized time within M of t"}


def wpr_transcript(system, subset, distal_points, radii, result: dict, sync: dict | None = None) -> Transcript:
    cands = result["candidates"]
    return Transcript("wpr-search", {
        "system": system_doc(system),
        "base": fraction_text(subset.base),
        "points": [[fraction_text(c) for c in p] for p in distal_points],
        "radii": list(radii),
        "candidate": cands[0].to_json() if cands else None,
        "sync": sync,
        "verdict": result["verdict"].value,
    })
