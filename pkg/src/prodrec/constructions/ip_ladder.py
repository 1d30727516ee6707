"""IP ladders: points whose return sets contain finite-sum sets ``S(p_1..p_d)``.

One ladder step takes open sets ``W' ⊂ U`` and ``W ⊂ V`` that already carry
``S(p_1..p_n)`` into ``V`` and finds the least ``l > Σ p`` with ``f^l(W'∩A)``
and ``f^l(W∩A)`` both meeting ``W``.  Then ``U' = W' ∩ f^{-l}W`` and
``V' = W ∩ f^{-l}W`` carry ``S(p_1..p_n, l)`` into ``V``.

Two engines are provided: cylinders in the full shift (``A`` = whole space),
and boxes in rotation x tent restricted to a fiber ``{x0} x [0, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import BudgetExceeded, PreconditionError
from ..families import subset_sums
from ..systems import (Arc, Cylinder, Fiber, FullShift, Interval, Product, ProductBox, Rotation,
                       SymbolicPoint, TentMap, WholeSpace, circle_distance, merge_constraints, tent_iterate_interval, tent_preimage)
from ..systems.base import ETA
from .common import Transcript, diagonal_order, subset_doc, system_doc

DEFAULT_BUDGET = 100_000


def diameter_radius(bound: Fraction) -> int:
    """Least ``r >= 0`` with ``2^-(r+1) <= bound``: a cylinder on ``[-r, r]`` has diameter at most ``bound``."""
    r = 0
    while Fraction(1, 2 ** (r + 1)) > bound:
        r += 1
    return r


def sums_of(generators) -> list[int]:
    return sorted(set(subset_sums(list(generators))))


# -- full shift --------------------------------------------------------------

def _hull(constraints: dict[int, int], fill, lo=None, hi=None) -> Cylinder:
    """Contiguous cylinder carrying ``constraints``; unconstrained positions come from ``fill(pos)``."""
    a = min(constraints) if lo is None else min(lo, min(constraints))
    b = max(constraints) + 1 if hi is None else max(hi, max(constraints) + 1)
    return Cylinder(a, tuple(constraints.get(i, fill(i)) if i in constraints else fill(i) for i in range(a, b)))


def _shift_generator(w_prime: dict, w: dict, floor: int, budget: int) -> int:
    for l in range(floor + 1, floor + 1 + budget):
        shifted = {p + l: s for p, s in w.items()}
        if merge_constraints(w_prime, shifted) is not None and merge_constraints(w, shifted) is not None:
            return l
    raise BudgetExceeded(f"no transfer time in ({floor}, {floor + budget}]", budget=budget)


def _require_full_shift(system, subset):
    if not isinstance(system, FullShift):
        raise PreconditionError("the cylinder ladder needs the full shift")
    if not isinstance(subset, WholeSpace):
        raise PreconditionError("in the full shift the ladder runs on the whole space")


def extend_ip_ladder(system, subset, u: Cylinder, v: Cylinder, generators, x: SymbolicPoint,
                     y: SymbolicPoint, budget: int = DEFAULT_BUDGET):
    """One step: returns ``(p_next, U', V')``.

    ``x ∈ U`` and ``y ∈ V`` must already return to ``V`` at every sum of ``generators``.
    """
    _require_full_shift(system, subset)
    generators = [int(p) for p in generators]
    sums = sums_of(generators)
    if not system.member(u, x) or not system.member(v, y):
        raise PreconditionError("witnesses must lie in U and V")
    for s in sums:
        for name, pt in (("x", x), ("y", y)):
            if not system.member(v, pt.shifted(s)):
                raise PreconditionError(f"sum {s} is not a return time of {name} to V")
    v_cons = v.constraints()
    w_prime = dict(u.constraints())
    w = dict(v_cons)
    for s in sums:
        for p in v_cons:
            w_prime[p + s] = int(x[p + s])
            w[p + s] = int(y[p + s])
    l = _shift_generator(w_prime, w, sum(generators), budget)
    shifted = {p + l: s for p, s in w.items()}
    u_new = _hull(merge_constraints(w_prime, shifted), lambda i: int(x[i]))
    v_new = _hull(merge_constraints(w, shifted), lambda i: int(y[i]))
    return l, u_new, v_new


# -- rotation x tent fiber ----------------------------------------------------

@dataclass(frozen=True)
class FiberBox:
    """``B(x0, radius) x interval``; the arc is always centred on the fiber base."""

    base: Fraction
    radius: Fraction
    interval: Interval

    def box(self) -> ProductBox:
        return ProductBox(Arc(self.base - self.radius, self.base + self.radius), self.interval)

    def to_json(self) -> dict:
        return self.box().to_json()


def _fiber_box(system: Product, base: Fraction, box: ProductBox) -> FiberBox:
    arc, piece = box.left, box.right
    if not isinstance(arc, Arc) or not isinstance(piece, Interval):
        raise PreconditionError("fiber ladder sets must be Arc x Interval boxes")
    start = arc.offset_of(base)
    slack = min(start, arc.length - start)
    if slack <= ETA:
        raise PreconditionError("box does not meet the fiber (base point not inside the arc)")
    return FiberBox(base, slack, piece)


def _fiber_shrink(piece: Interval, target: Interval, l: int, cap: Fraction):
    """Open ``J ⊂ piece`` around a preimage of the centre of ``target`` with ``T^l(J) ⊂ target``."""
    centre = (target.lo + target.hi) / 2
    y = tent_preimage(piece, centre, l)
    if y is None:
        return None
    margin = min(y - piece.lo, piece.hi - y)
    if margin <= 0:
        return None
    rho = min(margin, (target.hi - target.lo) / 2 ** (l + 1), cap) / 2
    return Interval.open(y - rho, y + rho)


def _fiber_step(rot: Rotation, w_prime: FiberBox, w: FiberBox, floor: int, budget: int, cap: Fraction):
    x0 = w.base
    for l in range(floor + 1, floor + 1 + budget):
        d = circle_distance(rot.iterate(x0, l), x0)
        if d + ETA >= w.radius:
            continue
        u_piece = _fiber_shrink(w_prime.interval, w.interval, l, cap)
        if u_piece is None:
            continue
        v_piece = _fiber_shrink(w.interval, w.interval, l, cap)
        if v_piece is None:
            continue
        room = w.radius - d
        u_new = FiberBox(x0, min(w_prime.radius, room, cap) / 2, u_piece)
        v_new = FiberBox(x0, min(w.radius, room) / 2, v_piece)
        return l, u_new, v_new
    raise BudgetExceeded(f"no transfer time in ({floor}, {floor + budget}]", budget=budget)


def _box_carries(rot: Rotation, inner: FiberBox, outer: FiberBox, s: int) -> bool:
    """Exact check of ``f^s(inner) ⊂ outer`` with the metric margin."""
    d = circle_distance(rot.iterate(inner.base, s), outer.base)
    if d + inner.radius + ETA > outer.radius:
        return False
    return tent_iterate_interval(inner.interval, s).within(outer.interval)


# -- ladders -------------------------------------------------------------------

@dataclass(frozen=True)
class LadderStep:
    pair: tuple[int, int]
    generator: int
    u: object
    v: object
    sums: tuple[int, ...]

    def to_json(self) -> dict:
        return {"pair": list(self.pair), "generator": self.generator, "U": self.u.to_json(),
                "V": self.v.to_json(), "sums": list(self.sums)}


@dataclass(frozen=True)
class IpLadder:
    engine: str
    system: object
    subset: object
    u: object
    targets: tuple
    depth: int
    steps: tuple[LadderStep, ...]
    limit: object
    seed: int

    @property
    def order(self) -> list[tuple[int, int]]:
        return [s.pair for s in self.steps]

    def generators(self, i: int) -> list[int]:
        return [s.generator for s in self.steps if s.pair[0] == i]

    def sums(self, i: int) -> list[int]:
        return sums_of(self.generators(i))

    @property
    def final_u(self):
        return self.steps[-1].u if self.steps else self.u

    def check(self) -> dict:
        """Re-derive every containment the ladder claims, per target."""
        out = {"targets": []}
        u_final = self.final_u
        for i, v in enumerate(self.targets, start=1):
            gens = self.generators(i)
            sums = self.sums(i)
            growth = all(p > sum(gens[:k]) for k, p in enumerate(gens))
            carried = [s for s in sums if self._carries(u_final, v, s)]
            returns = [s for s in sums if self._returns(v, s)]
            out["targets"].append({
                "target": i, "generators": gens, "sums": len(sums),
                "distinct": len(sums) == 2 ** len(gens) - 1, "growth": growth,
                "contained": len(carried), "returns": len(returns),
                "misses": sorted(set(sums) - set(returns)),
            })
        out["ok"] = all(t["distinct"] and t["growth"] and t["returns"] == t["sums"] == t["contained"]
                        for t in out["targets"])
        return out

    def _carries(self, u, v, s) -> bool:
        if self.engine == "shift":
            return FullShift().forces(u.constraints(), v.constraints(s))
        return _box_carries(self.system.left, u, v, s)

    def _returns(self, v, s) -> bool:
        point = self.system.iterate(self.limit, s)
        target = v if self.engine == "shift" else v.box()
        return self.system.member(target, point) is True

    def transcript(self) -> Transcript:
        limit = self.system.point_to_json(self.limit)
        return Transcript("ip-ladder", {
            "engine": self.engine,
            "system": system_doc(self.system),
            "subset": subset_doc(self.system, self.subset),
            "U": self.u.to_json(),
            "targets": [t.to_json() for t in self.targets],
            "depth": self.depth,
            "order": [list(p) for p in self.order],
            "steps": [s.to_json() for s in self.steps],
            "generators": [self.generators(i) for i in range(1, len(self.targets) + 1)],
            "limit": limit,
            "seed": self.seed,
        })


def build_ip_return_point(system, subset, u, targets, depth: int, seed: int = 0,
                          horizon: int | None = None, budget: int = DEFAULT_BUDGET) -> IpLadder:
    """Run the diagonal ladder over ``len(targets)`` targets to ``depth`` generators each.

    ``horizon`` sets how far the limit point is stored (shift engine); it
    defaults to a margin past the largest sum.
    """
    if depth < 1 or not targets:
        raise ValueError("need at least one target and depth >= 1")
    order = diagonal_order(len(targets), depth)
    if isinstance(system, Product) and isinstance(subset, Fiber):
        return _fiber_ladder(system, subset, u, list(targets), depth, order, seed, budget)
    _require_full_shift(system, subset)
    rng = np.random.default_rng(seed)
    u_cons = dict(u.constraints())
    v_cons = {i: dict(v.constraints()) for i, v in enumerate(targets, start=1)}
    gens = {i: [] for i in v_cons}
    steps = []
    for (i, j) in order:
        w_prime, w = u_cons, v_cons[i]
        l = _shift_generator(w_prime, w, sum(gens[i]), budget)
        shifted = {p + l: s for p, s in w.items()}
        r = diameter_radius(Fraction(1, i + j + 1))
        u_new = merge_constraints(w_prime, shifted)
        v_new = merge_constraints(w, shifted)
        u_cyl = _hull(u_new, lambda _: int(rng.integers(2)), -r, r + 1)
        v_cyl = _hull(v_new, lambda _: int(rng.integers(2)))
        u_cons, v_cons[i] = u_cyl.constraints(), v_cyl.constraints()
        gens[i].append(l)
        steps.append(LadderStep((i, j), l, u_cyl, v_cyl, tuple(sums_of(gens[i]))))
    top = max(max(sums_of(g)) for g in gens.values())
    reach = max(abs(p) for p in u_cons) + max(max(abs(q) for q in t.constraints()) for t in targets)
    radius = max(horizon or 0, top + reach) + 64
    data = rng.integers(0, 2, size=2 * radius + 1, dtype=np.uint8)
    for p, s in u_cons.items():
        data[p + radius] = s
    limit = SymbolicPoint(data, -radius, "explicit")
    return IpLadder("shift", system, subset, u, tuple(targets), depth, tuple(steps), limit, seed)


def _fiber_ladder(system, subset, u, targets, depth, order, seed, budget):
    if not isinstance(system.left, Rotation) or not isinstance(system.right, TentMap):
        raise PreconditionError("the fiber ladder needs rotation x tent")
    base = Fraction(subset.base)
    rot = system.left
    u_box = _fiber_box(system, base, u)
    v_boxes = {i: _fiber_box(system, base, v) for i, v in enumerate(targets, start=1)}
    originals = dict(v_boxes)
    gens = {i: [] for i in v_boxes}
    steps = []
    for (i, j) in order:
        cap = Fraction(1, 2 * (i + j + 1))
        l, u_box, v_boxes[i] = _fiber_step(rot, u_box, v_boxes[i], sum(gens[i]), budget, cap)
        gens[i].append(l)
        steps.append(LadderStep((i, j), l, u_box, v_boxes[i], tuple(sums_of(gens[i]))))
    piece = u_box.interval
    limit = (base, (piece.lo + piece.hi) / 2)
    return IpLadder("fiber", system, subset, _fiber_box(system, base, u),
                    tuple(originals[i] for i in sorted(originals)), depth, tuple(steps), limit, seed)
