"""Finite-horizon probes for recurrence, proximality, distality and their relatives.

Every probe answers with a three-way verdict.  Existential facts are
confirmed by explicit witnesses.  A negative answer is only given when it
is backed by structure that holds for all times (an isometry, an exactly
periodic pair, a singleton orbit) or when the notion itself is a
statement about the scanned window; otherwise the probe is inconclusive
and names the budget it used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .errors import PreconditionError
from .families import Family, classify
from .systems import (Cylinder, Fiber, FinitePoints, FullShift, Interval, Product, ShiftSpace,
                      SymbolicPoint, System, TentMap, Whole, WholeSpace, meets, require_perfect,
                      return_times, spec_hash, tent_preimages_in)
from .systems.base import Ball


class Verdict(str, Enum):
    HOLDS = "HoldsAtScale"
    FAILS = "FailsAtScale"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RecurrenceReport:
    notion: str
    verdict: Verdict
    horizon: int
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict is Verdict.INCONCLUSIVE and "budget" not in self.evidence:
            raise ValueError("an inconclusive report must name the exhausted budget")

    def __bool__(self):
        return self.verdict is Verdict.HOLDS

    def to_json(self) -> dict:
        return {"notion": self.notion, "verdict": self.verdict.value, "horizon": self.horizon,
                "evidence": self.evidence}


def _frac(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else str(q)


def _require_member(system, open_set, point, what="neighborhood"):
    if system.member(open_set, point) is not True:
        raise PreconditionError(f"the {what} must contain the point")


def f_recurrence_probe(system: System, x, u, family, horizon: int, **params) -> RecurrenceReport:
    """Classify ``N(x, U)`` up to ``horizon`` in the requested family at the given scale."""
    family = Family(family)
    _require_member(system, u, x)
    rt = return_times(system, x, u, horizon)
    verdict = classify(rt.times, family, **params)
    return RecurrenceReport(
        f"FRecurrent({family.value})",
        Verdict.HOLDS if verdict.holds_at_scale else Verdict.FAILS,
        horizon,
        {"system": spec_hash(system.to_spec()), "times": rt.times.to_text(),
         "excluded": list(rt.excluded), "classifier": verdict.to_json()},
    )


def eventual_cycle(system: System, point, budget: int = 4096):
    """(preperiod, period) of an exactly repeating orbit, or None within ``budget`` steps."""
    if isinstance(point, SymbolicPoint):
        # only purely periodic sequences repeat exactly under the shift
        if point.tail == "periodic" and point.data.size == 0:
            return 0, len(point.period)
        if point.tail == "zeros" and not point.data.any():
            return 0, 1
        return None
    if isinstance(system, Product):
        a = eventual_cycle(system.left, point[0], budget)
        b = eventual_cycle(system.right, point[1], budget)
        if a is None or b is None:
            return None
        return max(a[0], b[0]), math.lcm(a[1], b[1])
    seen = {}
    p = point
    for n in range(budget + 1):
        try:
            if p in seen:
                return seen[p], n - seen[p]
        except TypeError:
            return None
        seen[p] = n
        p = system.iterate(p, 1)
    return None


def orbit_distance_lower_bound(system: System, x, y, budget: int = 4096):
    """A bound ``L`` with ``d(f^n x, f^n y) >= L`` for every ``n >= 0``, or None.

    Sources: isometries keep the distance; exactly eventually periodic pairs
    have a finite distance table; products take the larger coordinate bound.
    """
    if system.is_isometry:
        return system.distance(x, y)
    if isinstance(system, Product):
        left = orbit_distance_lower_bound(system.left, x[0], y[0], budget)
        right = orbit_distance_lower_bound(system.right, x[1], y[1], budget)
        bounds = [b for b in (left, right) if b is not None]
        return max(bounds) if bounds else None
    cx, cy = eventual_cycle(system, x, budget), eventual_cycle(system, y, budget)
    if cx is None or cy is None:
        return None
    length = max(cx[0], cy[0]) + math.lcm(cx[1], cy[1])
    best = None
    a, b = x, y
    for _ in range(length):
        d = system.distance(a, b)
        best = d if best is None else min(best, d)
        a, b = system.iterate(a, 1), system.iterate(b, 1)
    return best


def _same_point(system, x, y) -> bool:
    if isinstance(x, SymbolicPoint):
        return x == y
    return system.distance(x, y) == 0 and x == y


def proximality_probe(system: System, x, y, eps, horizon: int) -> RecurrenceReport:
    """Look for ``n <= horizon`` with ``d(f^n x, f^n y) < eps``."""
    eps = Fraction(eps)
    if _same_point(system, x, y):
        raise PreconditionError("proximality needs two distinct points")
    bound = orbit_distance_lower_bound(system, x, y)
    if bound is not None and bound >= eps:
        # the orbits never come closer than the bound, so no scan is needed
        return RecurrenceReport("ProximalPair", Verdict.FAILS, horizon,
                                {"eps": _frac(eps), "lower_bound": _frac(bound)})
    a, b = x, y
    best, best_n = None, None
    for n in range(horizon + 1):
        d = system.distance(a, b)
        if best is None or d < best:
            best, best_n = d, n
        if d < eps:
            return RecurrenceReport("ProximalPair", Verdict.HOLDS, horizon,
                                    {"time": n, "distance": _frac(d), "eps": _frac(eps)})
        a, b = system.iterate(a, 1), system.iterate(b, 1)
    evidence = {"eps": _frac(eps), "closest_time": best_n, "closest_distance": _frac(best)}
    evidence["budget"] = {"horizon": horizon}
    return RecurrenceReport("ProximalPair", Verdict.INCONCLUSIVE, horizon, evidence)


def distality_probe(system: System, x, eps, horizon: int, candidates=(), orbit_budget: int = 64) -> RecurrenceReport:
    """Test ``x`` against orbit points ``f^k x`` (``k <= orbit_budget``) and declared candidates.

    Each candidate ``q`` is probed at scale ``min(eps, d(x, q) / 2)``.
    """
    eps = Fraction(eps)
    pool = []
    p = x
    for _ in range(orbit_budget):
        p = system.iterate(p, 1)
        pool.append(p)
    pool.extend(candidates)
    pool = [q for q in pool if not _same_point(system, x, q)]
    unresolved = []
    for k, q in enumerate(pool):
        # a candidate already within eps of x says nothing; test it below its own distance
        scale = min(eps, system.distance(x, q) / 2)
        report = proximality_probe(system, x, q, scale, horizon)
        if report.verdict is Verdict.HOLDS:
            return RecurrenceReport("DistalProbe", Verdict.FAILS, horizon, {
                "proximal_candidate": k, "point": system.point_to_json(q), **report.evidence})
        if report.verdict is Verdict.INCONCLUSIVE:
            unresolved.append(k)
    evidence = {"candidates": len(pool), "eps": _frac(eps)}
    if unresolved:
        evidence.update(unresolved=unresolved, budget={"horizon": horizon, "orbit_budget": orbit_budget})
        return RecurrenceReport("DistalProbe", Verdict.INCONCLUSIVE, horizon, evidence)
    return RecurrenceReport("DistalProbe", Verdict.HOLDS, horizon, evidence)


def pair_recurrence_probe(system_x: System, x, system_y: System, y, ux, vy, horizon: int) -> RecurrenceReport:
    """Does ``(x, y)`` come back to ``Ux x Vy`` at some common time ``<= horizon``?"""
    _require_member(system_x, ux, x)
    _require_member(system_y, vy, y)
    a = return_times(system_x, x, ux, horizon)
    b = return_times(system_y, y, vy, horizon)
    common = sorted(set(a) & set(b))
    if common:
        return RecurrenceReport("PairRecurrent", Verdict.HOLDS, horizon,
                                {"time": common[0], "common_count": len(common)})
    return RecurrenceReport("PairRecurrent", Verdict.FAILS, horizon,
                            {"returns_x": len(a), "returns_y": len(b)})


# --- property (P) -------------------------------------------------------------


def _periodic_points_in_cylinder(cyl: Cylinder, period: int):
    """Periodic points of the given period lying in the cylinder (free symbols set to 0)."""
    word = [None] * period
    for pos, sym in cyl.constraints().items():
        r = pos % period
        if word[r] is not None and word[r] != sym:
            return []
        word[r] = sym
    return [SymbolicPoint.periodic_point([0 if s is None else s for s in word])]


def property_p_candidates(system: System, subset, u, limit: int):
    u = system.basic(u)
    if isinstance(subset, FinitePoints):
        return [p for p in subset.points if system.member(u, p)]
    if isinstance(subset, WholeSpace) and isinstance(system, FullShift):
        if isinstance(u, Whole):
            return [SymbolicPoint()]
        out = []
        for k in range(1, limit + 1):
            out.extend(_periodic_points_in_cylinder(u, k))
        return out
    if isinstance(subset, Fiber) and isinstance(system, Product):
        right = u.right
        if isinstance(right, Whole):
            right = Interval.closed(0, 1)
        pieces = getattr(right, "pieces", (right,))
        return [(subset.base, (p.lo + p.hi) / 2) for p in pieces]
    raise ValueError("property (P) sampling supports finite sets, the full shift and product fibers")


def property_p_probe(system: System, subset, u, k_budget: int, horizon: int) -> RecurrenceReport:
    """Search ``x`` in ``U ∩ A`` and ``K <= k_budget`` with ``f^(nK)(x) ∈ U`` whenever ``nK <= horizon``."""
    if not meets(system, subset, u):
        raise PreconditionError("U must meet A")
    failures = {}
    base_refutes = isinstance(subset, Fiber)
    for x in property_p_candidates(system, subset, u, k_budget):
        mask, excluded = system.orbit_mask(x, u, horizon)
        bad = set(excluded)
        for k in range(1, k_budget + 1):
            hits = [n for n in range(k, horizon + 1, k) if not mask[n] or n in bad]
            if not hits:
                return RecurrenceReport("PropertyP", Verdict.HOLDS, horizon,
                                        {"point": system.point_to_json(x), "K": k})
            failures.setdefault(k, hits[0])
    evidence = {"k_budget": k_budget, "first_violation": {str(k): n for k, n in sorted(failures.items())}}
    if base_refutes:
        # on {x0} x Y the first coordinate is the same for every point of U ∩ A;
        # a base-coordinate exit refutes every point at once
        left_mask, left_excluded = system.left.orbit_mask(subset.base, system.basic(u).left, horizon)
        exits = {}
        for k in range(1, k_budget + 1):
            n = next((n for n in range(k, horizon + 1, k) if not left_mask[n] and n not in left_excluded), None)
            if n is None:
                break
            exits[str(k)] = n
        else:
            evidence["base_exit"] = exits
            return RecurrenceReport("PropertyP", Verdict.FAILS, horizon, evidence)
    if isinstance(subset, FinitePoints):
        return RecurrenceReport("PropertyP", Verdict.FAILS, horizon, evidence)
    evidence["budget"] = {"k_budget": k_budget, "horizon": horizon}
    return RecurrenceReport("PropertyP", Verdict.INCONCLUSIVE, horizon, evidence)


# --- proximal cell density ------------------------------------------------------


def cylinder_net(width: int) -> list[Cylinder]:
    """All cylinders on the centred block of ``width`` symbols."""
    lo = -(width // 2)
    return [Cylinder(lo, format(b, f"0{width}b")) for b in range(2**width)]


def _proximal_witness(system, subset, x, u, eps, horizon):
    """(y, n) with ``y ∈ U ∩ A`` and ``d(f^n x, f^n y) <= eps``, or None."""
    u = system.basic(u)
    if isinstance(system, ShiftSpace) and isinstance(subset, WholeSpace):
        y = x.with_symbols(u.constraints()) if isinstance(u, Cylinder) else x
        if y == x:
            # x itself is in U; flip one symbol just right of the cylinder
            pos = u.end if isinstance(u, Cylinder) else 1
            y = x.with_symbols({pos: 1 - x[pos]})
        a, b = x, y
        for n in range(horizon + 1):
            if system.distance(a, b) <= eps:
                return y, n
            a, b = a.shifted(1), b.shifted(1)
        return None
    if isinstance(system, Product) and isinstance(subset, Fiber) and isinstance(system.right, TentMap):
        right = u.right if not isinstance(u.right, Whole) else Interval.closed(0, 1)
        pieces = getattr(right, "pieces", (right,))
        for n in range(1, horizon + 1):
            target = system.right.iterate(x[1], n)
            for piece in pieces:
                ys = [t for t in tent_preimages_in(piece, target, n) if t != x[1]]
                if ys:
                    return (subset.base, ys[0]), n
        return None
    raise ValueError("proximal witnesses are built for the full shift and tent fibers")


def proximal_cell_density_probe(system: System, subset, x, eps, net, horizon: int) -> RecurrenceReport:
    """For every net element meeting ``A``, find a point of it proximal to ``x`` at scale ``eps``."""
    require_perfect(subset)
    eps = Fraction(eps)
    witnesses, missing = [], []
    for k, u in enumerate(net):
        if not meets(system, subset, u):
            continue
        found = _proximal_witness(system, subset, x, u, eps, horizon)
        if found is None:
            missing.append(k)
        else:
            y, n = found
            witnesses.append({"cell": k, "time": n, "point": system.point_to_json(y)})
    evidence = {"eps": _frac(eps), "cells": len(witnesses) + len(missing), "witnesses": witnesses}
    if missing:
        evidence.update(missing=missing, budget={"horizon": horizon})
        return RecurrenceReport("ProximalCellDensity", Verdict.INCONCLUSIVE, horizon, evidence)
    return RecurrenceReport("ProximalCellDensity", Verdict.HOLDS, horizon, evidence)


def ball(center, radius) -> Ball:
    return Ball(center, Fraction(radius))
