"""Closed subsets used as weak-mixing candidates, and transfer times restricted to them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..errors import PreconditionError
from .base import System, Whole
from .metric import Interval
from .product import Product


@dataclass(frozen=True)
class WholeSpace:
    """The whole phase space as a subset."""

    def to_json(self) -> dict:
        return {"type": "WholeSpace"}


@dataclass(frozen=True)
class FinitePoints:
    points: tuple

    def to_json(self) -> dict:
        return {"type": "FinitePoints", "count": len(self.points)}


@dataclass(frozen=True)
class Fiber:
    """``{base} x Y`` inside a product ``X x Y``."""

    base: Any

    def to_json(self) -> dict:
        return {"type": "Fiber", "base": str(self.base)}


@dataclass(frozen=True)
class CylinderSubset:
    """A cylinder of a shift space, viewed as a closed subset."""

    cylinder: Any

    def to_json(self) -> dict:
        return {"type": "CylinderSubset", "cylinder": self.cylinder.to_json()}


def _shift_merge(system, *parts):
    from .symbolic import merge_constraints
    merged = merge_constraints(*parts)
    return merged is not None and system.admissible(merged)


def is_perfect(subset) -> bool:
    return not isinstance(subset, FinitePoints)


def require_perfect(subset) -> None:
    if not is_perfect(subset):
        raise PreconditionError(
            "subset must be a weakly mixing candidate (perfect); a finite set of points is not"
        )


def meets(system: System, subset, open_set) -> bool:
    """Does ``open_set`` meet the subset?  Exact for every supported pair."""
    open_set = system.basic(open_set)
    if isinstance(subset, WholeSpace):
        return True
    if isinstance(subset, FinitePoints):
        return any(system.member(open_set, p) for p in subset.points)
    if isinstance(subset, Fiber):
        if not isinstance(system, Product):
            raise ValueError("a fiber lives in a product system")
        return bool(system.left.member(open_set.left, subset.base))
    if isinstance(subset, CylinderSubset):
        if isinstance(open_set, Whole):
            return system.admissible(subset.cylinder.constraints())
        return _shift_merge(system, subset.cylinder.constraints(), open_set.constraints())
    raise ValueError(f"unknown subset {type(subset).__name__}")


def sample_point(system: System, subset, open_set):
    """Some point of ``subset`` inside ``open_set`` (centre-most for boxes)."""
    open_set = system.basic(open_set)
    if isinstance(subset, FinitePoints):
        for p in subset.points:
            if system.member(open_set, p):
                return p
        raise PreconditionError("open set misses the subset")
    if isinstance(subset, Fiber):
        if not meets(system, subset, open_set):
            raise PreconditionError("open set misses the fiber")
        right = open_set.right
        if isinstance(right, Whole):
            return (subset.base, Fraction(1, 2))
        if isinstance(right, Interval):
            return (subset.base, (right.lo + right.hi) / 2)
        return (subset.base, (right.pieces[0].lo + right.pieces[0].hi) / 2)
    raise ValueError("sampling needs a finite set or a fiber")


def restricted_transfer(system: System, subset, v, u, horizon: int):
    """Times ``1 <= k <= horizon`` with ``f^k(V ∩ A)`` meeting ``U``; returns (times, excluded)."""
    v, u = system.basic(v), system.basic(u)
    if isinstance(subset, WholeSpace):
        return system.transfer(v, u, horizon)
    if isinstance(subset, FinitePoints):
        times, excluded = set(), set()
        for p in subset.points:
            inside = system.member(v, p)
            if not inside:
                continue
            mask, ex = system.orbit_mask(p, u, horizon)
            times.update(int(k) for k in range(1, horizon + 1) if mask[k])
            excluded.update(k for k in ex if k >= 1)
        return sorted(times), sorted(excluded - times)
    if isinstance(subset, Fiber):
        if not isinstance(system, Product):
            raise ValueError("a fiber lives in a product system")
        if not system.left.member(v.left, subset.base):
            return [], []
        mask, ex = system.left.orbit_mask(subset.base, u.left, horizon)
        base_times = [k for k in range(1, horizon + 1) if mask[k]]
        return system._combine((base_times, ex), system.right.transfer(v.right, u.right, horizon))
    if isinstance(subset, CylinderSubset):
        start = subset.cylinder.constraints()
        if not isinstance(v, Whole):
            start = {**start, **v.constraints()} if _shift_merge(system, start, v.constraints()) else None
        if start is None:
            return [], []
        if isinstance(u, Whole):
            return list(range(1, horizon + 1)), []
        return [k for k in range(1, horizon + 1) if _shift_merge(system, start, u.constraints(k))], []
    raise ValueError(f"unknown subset {type(subset).__name__}")
