"""Direct products with the maximum metric."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .base import Ball, System, Whole


@dataclass(frozen=True)
class ProductBox:
    left: Any
    right: Any

    def to_json(self) -> dict:
        return {"type": "ProductBox", "left": self.left.to_json(), "right": self.right.to_json()}


class Product(System):
    """``f x g`` acting on pairs; balls of the max metric are boxes of balls."""

    kind = "Product"

    def __init__(self, left: System, right: System):
        self.left = left
        self.right = right
        self.exact = left.exact and right.exact
        self.is_isometry = left.is_isometry and right.is_isometry

    def to_spec(self):
        return {"kind": self.kind, "left": self.left.to_spec(), "right": self.right.to_spec()}

    def check_point(self, point):
        if not isinstance(point, tuple) or len(point) != 2:
            raise ValueError("product points are pairs")
        self.left.check_point(point[0])
        self.right.check_point(point[1])

    def iterate(self, point, steps):
        return (self.left.iterate(point[0], steps), self.right.iterate(point[1], steps))

    def distance(self, a, b):
        return max(self.left.distance(a[0], b[0]), self.right.distance(a[1], b[1]))

    def basic(self, open_set):
        if isinstance(open_set, Ball):
            c = open_set.center
            return ProductBox(self.left.basic(Ball(c[0], open_set.radius)),
                              self.right.basic(Ball(c[1], open_set.radius)))
        if isinstance(open_set, Whole):
            return ProductBox(Whole(), Whole())
        if isinstance(open_set, ProductBox):
            return ProductBox(self.left.basic(open_set.left), self.right.basic(open_set.right))
        raise ValueError(f"Product cannot use open set {type(open_set).__name__}")

    def member(self, open_set, point):
        box = self.basic(open_set)
        a = self.left.member(box.left, point[0])
        b = self.right.member(box.right, point[1])
        if a is False or b is False:
            return False
        if a is None or b is None:
            return None
        return True

    def orbit_mask(self, point, open_set, horizon, cancel=None):
        box = self.basic(open_set)
        m1, e1 = self.left.orbit_mask(point[0], box.left, horizon, cancel)
        m2, e2 = self.right.orbit_mask(point[1], box.right, horizon, cancel)
        # an excluded coordinate only matters where the other coordinate is inside
        excluded = sorted({n for n in e1 if m2[n]} | {n for n in e2 if m1[n]} | (set(e1) & set(e2)))
        return m1 & m2, excluded

    def _combine(self, first, second):
        t1, e1 = first
        t2, e2 = second
        s1, s2 = set(t1), set(t2)
        times = sorted(s1 & s2)
        excluded = sorted({n for n in e1 if n in s2} | {n for n in e2 if n in s1} | (set(e1) & set(e2)))
        return times, excluded

    def transfer(self, a, b, horizon):
        a, b = self.basic(a), self.basic(b)
        return self._combine(self.left.transfer(a.left, b.left, horizon),
                             self.right.transfer(a.right, b.right, horizon))

    def containment(self, u, v, horizon):
        u, v = self.basic(u), self.basic(v)
        return self._combine(self.left.containment(u.left, v.left, horizon),
                             self.right.containment(u.right, v.right, horizon))

    def cell(self, point, eps):
        return (self.left.cell(point[0], eps), self.right.cell(point[1], eps))

    def point_to_json(self, point):
        return [self.left.point_to_json(point[0]), self.right.point_to_json(point[1])]

    def point_from_json(self, data):
        return (self.left.point_from_json(data[0]), self.right.point_from_json(data[1]))
