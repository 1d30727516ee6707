"""Finite odometers (adding machines) and the one-point system."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .base import Ball, System, Whole


@dataclass(frozen=True)
class Residue:
    """Odometer points whose level-``level`` coordinate equals ``value``."""

    level: int
    value: int

    def to_json(self) -> dict:
        return {"type": "Residue", "level": self.level, "value": self.value}


class Odometer(System):
    """Addition of 1 on the levels ``Z/s_1 <- Z/s_2 <- ... <- Z/s_m``.

    A point is the tuple of its residues; the distance is ``2^-k`` with
    ``k`` the number of leading levels on which two points agree.
    """

    kind = "Odometer"
    is_isometry = True

    def __init__(self, periods):
        periods = tuple(int(s) for s in periods)
        if not periods or any(s < 1 for s in periods):
            raise ValueError("odometer periods must be positive")
        for a, b in zip(periods, periods[1:]):
            if b % a:
                raise ValueError(f"periods must form a divisibility chain: {a} does not divide {b}")
        self.periods = periods

    @classmethod
    def dyadic(cls, levels: int) -> "Odometer":
        return cls(tuple(2**k for k in range(1, levels + 1)))

    def to_spec(self):
        return {"kind": self.kind, "periods": list(self.periods)}

    def point(self, n: int) -> tuple[int, ...]:
        return tuple(n % s for s in self.periods)

    @property
    def zero(self) -> tuple[int, ...]:
        return self.point(0)

    def check_point(self, point):
        if not isinstance(point, tuple) or len(point) != len(self.periods):
            raise ValueError(f"odometer point needs {len(self.periods)} residues")
        top = point[-1]
        if not 0 <= top < self.periods[-1] or self.point(top) != tuple(point):
            raise ValueError(f"inconsistent odometer residues {point}")

    def iterate(self, point, steps):
        return self.point(point[-1] + steps)

    def distance(self, a, b):
        k = 0
        while k < len(self.periods) and a[k] == b[k]:
            k += 1
        return Fraction(0) if k == len(self.periods) else Fraction(1, 2**k)

    def basic(self, open_set):
        if isinstance(open_set, Ball):
            # agreement on w leading levels gives distance <= 2^-w
            w = 0
            while Fraction(1, 2**w) >= open_set.radius and w < len(self.periods):
                w += 1
            if w == 0:
                return Whole()
            return Residue(w, open_set.center[w - 1])
        if isinstance(open_set, Residue):
            if not 1 <= open_set.level <= len(self.periods):
                raise ValueError(f"residue level must lie in 1..{len(self.periods)}")
            if not 0 <= open_set.value < self.periods[open_set.level - 1]:
                raise ValueError("residue value out of range")
            return open_set
        if isinstance(open_set, Whole):
            return open_set
        raise ValueError(f"Odometer cannot use open set {type(open_set).__name__}")

    def member(self, open_set, point):
        open_set = self.basic(open_set)
        if isinstance(open_set, Whole):
            return True
        return point[open_set.level - 1] == open_set.value

    def orbit_mask(self, point, open_set, horizon, cancel=None):
        open_set = self.basic(open_set)
        if isinstance(open_set, Whole):
            return np.ones(horizon + 1, dtype=np.uint8), []
        s = self.periods[open_set.level - 1]
        n = np.arange(horizon + 1, dtype=np.int64)
        mask = ((point[open_set.level - 1] + n) % s == open_set.value).astype(np.uint8)
        return mask, []

    def transfer(self, a, b, horizon):
        n = np.arange(1, horizon + 1, dtype=np.int64)
        if isinstance(a, Whole) or isinstance(b, Whole):
            return n.tolist(), []
        s = self.periods[min(a.level, b.level) - 1]
        return n[(a.value + n - b.value) % s == 0].tolist(), []

    def containment(self, u, v, horizon):
        n = np.arange(1, horizon + 1, dtype=np.int64)
        if isinstance(v, Whole):
            return n.tolist(), []
        if isinstance(u, Whole) or u.level < v.level:
            return [], []
        s = self.periods[v.level - 1]
        return n[(u.value + n - v.value) % s == 0].tolist(), []

    def cell(self, point, eps):
        w = 0
        while Fraction(1, 2**w) > Fraction(eps) and w < len(self.periods):
            w += 1
        return tuple(point[:w])

    def point_to_json(self, point):
        return list(point)

    def point_from_json(self, data):
        if isinstance(data, int):
            return self.point(data)
        return tuple(int(v) for v in data)


class OnePoint(System):
    """The trivial system with a single fixed point ``0``."""

    kind = "OnePoint"
    is_isometry = True

    def check_point(self, point):
        if point != 0:
            raise ValueError("the one-point system has the single point 0")

    def iterate(self, point, steps):
        return 0

    def distance(self, a, b):
        return Fraction(0)

    def basic(self, open_set):
        return Whole()

    def member(self, open_set, point):
        return True

    def transfer(self, a, b, horizon):
        return list(range(1, horizon + 1)), []

    def containment(self, u, v, horizon):
        return list(range(1, horizon + 1)), []

    def cell(self, point, eps):
        return 0

    def point_to_json(self, point):
        return 0

    def point_from_json(self, data):
        return 0
