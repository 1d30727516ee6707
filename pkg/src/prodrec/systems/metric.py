"""Circle rotation and tent map with exact rational arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .base import ETA, Ball, System, Whole, check_cancel


def to_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal/ratio string or float literal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str) and value.strip() == "golden":
        return GOLDEN
    return Fraction(value)


def _golden(digits: int = 50) -> Fraction:
    scale = 10**digits
    return Fraction((math.isqrt(5 * scale * scale) - scale) // 2, scale)


# (sqrt(5) - 1) / 2 truncated to 50 decimal digits
GOLDEN = _golden()


def fraction_text(q: Fraction) -> str:
    return str(q) if q.denominator != 1 else str(q.numerator)


@dataclass(frozen=True)
class Interval:
    """Sub-interval of [0, 1]; endpoints may be open or closed."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        lo, hi = to_fraction(self.lo), to_fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"interval [{lo}, {hi}] must lie in [0, 1]")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("interval is empty or degenerate")

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        lo, hi = to_fraction(lo), to_fraction(hi)
        if lo >= hi:
            raise ValueError("open interval needs lo < hi")
        return cls(lo, hi)

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(lo, hi, True, True)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains_point(self, x: Fraction) -> bool:
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def meets(self, other: "Interval") -> bool:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            return True
        if lo > hi:
            return False
        return self.contains_point(lo) and other.contains_point(lo)

    def within(self, other: "Interval") -> bool:
        if self.lo < other.lo or (self.lo == other.lo and self.lo_closed and not other.lo_closed):
            return False
        if self.hi > other.hi or (self.hi == other.hi and self.hi_closed and not other.hi_closed):
            return False
        return True

    def is_relatively_open(self) -> bool:
        """Open in the subspace topology of [0, 1]."""
        return (not self.lo_closed or self.lo == 0) and (not self.hi_closed or self.hi == 1)

    def to_json(self) -> dict:
        return {"type": "Interval", "lo": fraction_text(self.lo), "hi": fraction_text(self.hi),
                "closed": [self.lo_closed, self.hi_closed]}

    def __str__(self):
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"


def merge_intervals(parts) -> tuple[Interval, ...]:
    """Union of intervals as a sorted tuple of disjoint pieces."""
    parts = sorted(parts, key=lambda i: (i.lo, not i.lo_closed))
    out: list[Interval] = []
    for piece in parts:
        if out:
            last = out[-1]
            touching = piece.lo < last.hi or (piece.lo == last.hi and (piece.lo_closed or last.hi_closed))
            if touching:
                if piece.hi > last.hi or (piece.hi == last.hi and piece.hi_closed):
                    out[-1] = Interval(last.lo, piece.hi, last.lo_closed, piece.hi_closed)
                continue
        out.append(piece)
    return tuple(out)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of intervals of [0, 1] (tent map) or arcs of the circle (rotation)."""

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("interval set needs at least one piece")
        if all(isinstance(p, Interval) for p in pieces):
            pieces = merge_intervals(pieces)
        elif not all(isinstance(p, Arc) for p in pieces):
            raise ValueError("interval set mixes intervals and arcs")
        object.__setattr__(self, "pieces", pieces)

    def to_json(self) -> dict:
        return {"type": "IntervalSet", "pieces": [p.to_json() for p in self.pieces]}


def tent(x: Fraction) -> Fraction:
    return 2 * x if x <= Fraction(1, 2) else 2 - 2 * x


def tent_image(piece: Interval) -> Interval:
    """Exact image of an interval under the tent map (again an interval)."""
    half = Fraction(1, 2)
    images = []
    if piece.lo < half or (piece.lo == half and piece.lo_closed):
        hi = min(piece.hi, half)
        hi_closed = piece.hi_closed if piece.hi <= half else True
        if piece.lo < hi or (piece.lo == hi and piece.lo_closed and hi_closed):
            images.append(Interval(2 * piece.lo, 2 * hi, piece.lo_closed, hi_closed))
    if piece.hi > half or (piece.hi == half and piece.hi_closed):
        lo = max(piece.lo, half)
        lo_closed = piece.lo_closed if piece.lo >= half else True
        if lo < piece.hi or (lo == piece.hi and lo_closed and piece.hi_closed):
            # decreasing branch swaps the endpoints
            images.append(Interval(2 - 2 * piece.hi, 2 - 2 * lo, piece.hi_closed, lo_closed))
    merged = merge_intervals(images)
    assert len(merged) == 1
    return merged[0]


def tent_iterate_interval(piece: Interval, steps: int) -> Interval:
    for _ in range(steps):
        if piece.lo == 0 and piece.hi == 1 and piece.lo_closed and piece.hi_closed:
            break
        piece = tent_image(piece)
    return piece


def tent_periodic_points(period: int) -> list[Fraction]:
    """Points of least period ``period`` under the tent map, sorted."""
    if period < 1:
        raise ValueError("period must be positive")
    found = set()
    for den in (2**period - 1, 2**period + 1):
        for num in range(den + 1):
            x = Fraction(num, den)
            y = x
            orbit = []
            for _ in range(period):
                y = tent(y)
                orbit.append(y)
            if y == x and all(orbit[k] != x for k in range(period - 1)):
                found.add(x)
    return sorted(found)


def _margin_member(interval: Interval, x: Fraction):
    """True/False, or None when ``x`` is within ETA of an open endpoint."""
    for end, closed in ((interval.lo, interval.lo_closed), (interval.hi, interval.hi_closed)):
        if not closed and abs(x - end) <= ETA:
            return None
    return interval.contains_point(x)


class TentMap(System):
    kind = "TentMap"
    exact = False

    def check_point(self, point):
        if not isinstance(point, (Fraction, int)) or not 0 <= point <= 1:
            raise ValueError("tent map points are rationals in [0, 1]")

    def iterate(self, point, steps):
        x = Fraction(point)
        for _ in range(steps):
            x = tent(x)
        return x

    def distance(self, a, b):
        return abs(Fraction(a) - Fraction(b))

    def basic(self, open_set):
        if isinstance(open_set, Ball):
            c, r = Fraction(open_set.center), open_set.radius
            lo, hi = c - r, c + r
            return Interval(max(lo, Fraction(0)), min(hi, Fraction(1)), lo <= 0, hi >= 1) if (lo > 0 or hi < 1) else Whole()
        if isinstance(open_set, (Interval, IntervalSet, Whole)):
            return open_set
        raise ValueError(f"TentMap cannot use open set {type(open_set).__name__}")

    def _pieces(self, open_set):
        if isinstance(open_set, Whole):
            return (Interval.closed(0, 1),)
        if isinstance(open_set, Interval):
            return (open_set,)
        return open_set.pieces

    def member(self, open_set, point):
        open_set = self.basic(open_set)
        if isinstance(open_set, Whole):
            return True
        results = [_margin_member(p, Fraction(point)) for p in self._pieces(open_set)]
        if any(r is True for r in results):
            return True
        return None if any(r is None for r in results) else False

    def transfer(self, a, b, horizon):
        if isinstance(b, Whole):
            return list(range(1, horizon + 1)), []
        times = []
        targets = self._pieces(b)
        images = list(self._pieces(a))
        for n in range(1, horizon + 1):
            images = [tent_image(p) for p in images]
            if any(img.meets(t) for img in images for t in targets):
                times.append(n)
        return times, []

    def containment(self, u, v, horizon):
        if isinstance(v, Whole):
            return list(range(1, horizon + 1)), []
        targets = self._pieces(v)
        images = list(self._pieces(u))
        times = []
        for n in range(1, horizon + 1):
            images = [tent_image(p) for p in images]
            if all(any(img.within(t) for t in targets) for img in images):
                times.append(n)
        return times, []

    def cell(self, point, eps):
        return math.floor(Fraction(point) / Fraction(eps))

    def point_to_json(self, point):
        return fraction_text(Fraction(point))

    def point_from_json(self, data):
        return to_fraction(data)


@dataclass(frozen=True)
class Arc:
    """Open arc of the circle R/Z running counter-clockwise from ``lo`` to ``hi``.

    ``lo`` is reduced to [0, 1); the arc length ``hi - lo`` lies in (0, 1).
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_fraction(self.lo), to_fraction(self.hi)
        length = hi - lo
        if not 0 < length < 1:
            raise ValueError("arc length must lie strictly between 0 and 1")
        shift = math.floor(lo)
        object.__setattr__(self, "lo", lo - shift)
        object.__setattr__(self, "hi", hi - shift)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def offset_of(self, x: Fraction) -> Fraction:
        """Counter-clockwise distance from ``lo`` to ``x``, in [0, 1)."""
        t = x - self.lo
        return t - math.floor(t)

    def rotated(self, t: Fraction) -> "Arc":
        return Arc(self.lo + t, self.hi + t)

    def meets(self, other: "Arc") -> bool:
        # two open arcs meet iff one's start lies inside the other (or they share a start)
        return self.offset_of(other.lo) < self.length or other.offset_of(self.lo) < other.length

    def within(self, other: "Arc") -> bool:
        start = other.offset_of(self.lo)
        return start + self.length <= other.length

    def to_json(self) -> dict:
        return {"type": "Arc", "lo": fraction_text(self.lo), "hi": fraction_text(self.hi)}


def circle_distance(a: Fraction, b: Fraction) -> Fraction:
    d = (Fraction(a) - Fraction(b)) % 1
    return min(d, 1 - d)


class Rotation(System):
    """``x -> x + alpha (mod 1)`` on the circle, an isometry."""

    kind = "Rotation"
    exact = False
    is_isometry = True

    def __init__(self, alpha=GOLDEN):
        alpha = to_fraction(alpha)
        alpha -= math.floor(alpha)
        if alpha == 0:
            raise ValueError("rotation angle must not be an integer")
        self.alpha = alpha

    def to_spec(self):
        return {"kind": self.kind, "alpha": "golden" if self.alpha == GOLDEN else fraction_text(self.alpha)}

    def check_point(self, point):
        if not isinstance(point, (Fraction, int)) or not 0 <= point < 1:
            raise ValueError("rotation points are rationals in [0, 1)")

    def iterate(self, point, steps):
        x = Fraction(point) + steps * self.alpha
        return x - math.floor(x)

    def distance(self, a, b):
        return circle_distance(a, b)

    def basic(self, open_set):
        if isinstance(open_set, Ball):
            r = open_set.radius
            if r >= Fraction(1, 2):
                return Whole()
            c = Fraction(open_set.center)
            return Arc(c - r, c + r)
        if isinstance(open_set, (Arc, IntervalSet, Whole)):
            return open_set
        raise ValueError(f"Rotation cannot use open set {type(open_set).__name__}")

    def _pieces(self, open_set):
        return (open_set,) if isinstance(open_set, Arc) else open_set.pieces

    def member(self, open_set, point):
        open_set = self.basic(open_set)
        if isinstance(open_set, Whole):
            return True
        results = []
        for arc in self._pieces(open_set):
            t = arc.offset_of(Fraction(point))
            if t <= ETA or t >= 1 - ETA or abs(t - arc.length) <= ETA:
                results.append(None)
            else:
                results.append(t < arc.length)
        if any(r is True for r in results):
            return True
        return None if any(r is None for r in results) else False

    def orbit_mask(self, point, open_set, horizon, cancel=None):
        open_set = self.basic(open_set)
        if isinstance(open_set, Whole):
            return np.ones(horizon + 1, dtype=np.uint8), []
        arcs = self._pieces(open_set)
        x0 = Fraction(point)
        den = math.lcm(self.alpha.denominator, x0.denominator, ETA.denominator,
                       *(a.lo.denominator for a in arcs), *(a.hi.denominator for a in arcs))
        step = self.alpha.numerator * (den // self.alpha.denominator)
        pos = x0.numerator * (den // x0.denominator)
        eta = ETA.numerator * (den // ETA.denominator)
        bounds = [(a.lo.numerator * (den // a.lo.denominator), a.length.numerator * (den // a.length.denominator))
                  for a in arcs]
        mask = np.zeros(horizon + 1, dtype=np.uint8)
        excluded = []
        for n in range(horizon + 1):
            if cancel is not None and n % 4096 == 0:
                check_cancel(cancel)
            inside = ambiguous = False
            for lo, length in bounds:
                t = (pos - lo) % den
                if t <= eta or t >= den - eta or abs(t - length) <= eta:
                    ambiguous = True
                elif t < length:
                    inside = True
                    break
            if inside:
                mask[n] = 1
            elif ambiguous:
                excluded.append(n)
            pos = (pos + step) % den
        return mask, excluded

    def _margin_split(self, a, b, horizon, test):
        # exact decisions; a time whose decisive gap is within ETA is excluded
        if isinstance(b, Whole):
            return list(range(1, horizon + 1)), []
        times, excluded = [], []
        for n in range(1, horizon + 1):
            verdict = test(n)
            if verdict is None:
                excluded.append(n)
            elif verdict:
                times.append(n)
        return times, excluded

    def transfer(self, a, b, horizon):
        if isinstance(a, Whole):
            return list(range(1, horizon + 1)), []

        def test(n):
            shift = n * self.alpha
            result = False
            for p in self._pieces(a):
                img = p.rotated(shift)
                for q in self._pieces(b):
                    overlap = _arc_overlap(img, q)
                    if overlap > ETA:
                        return True
                    if overlap > 0:
                        result = None
            return result

        return self._margin_split(a, b, horizon, test)

    def containment(self, u, v, horizon):
        if isinstance(v, Whole):
            return list(range(1, horizon + 1)), []
        if isinstance(u, Whole):
            return [], []

        def test(n):
            shift = n * self.alpha
            verdict = True
            for p in self._pieces(u):
                img = p.rotated(shift)
                best = None
                for q in self._pieces(v):
                    slack = _arc_slack(img, q)
                    best = slack if best is None else max(best, slack)
                if best < 0:
                    return False
                if best <= ETA:
                    verdict = None
            return verdict

        return self._margin_split(u, v, horizon, test)

    def cell(self, point, eps):
        return math.floor(Fraction(point) / Fraction(eps))

    def point_to_json(self, point):
        return fraction_text(Fraction(point))

    def point_from_json(self, data):
        return to_fraction(data)


def _arc_overlap(a: Arc, b: Arc) -> Fraction:
    """Total length of the intersection of two arcs."""
    total = Fraction(0)
    for first, second in ((a, b), (b, a)):
        start = first.offset_of(second.lo)
        if start < first.length:
            total += min(first.length - start, second.length)
    if a.lo == b.lo:
        total = min(a.length, b.length)
    return total


def _arc_slack(inner: Arc, outer: Arc) -> Fraction:
    """How far ``inner`` sits inside ``outer``; negative when it pokes out."""
    start = outer.offset_of(inner.lo)
    return min(start, outer.length - start - inner.length)


def tent_preimages_in(piece: Interval, value: Fraction, steps: int) -> list[Fraction]:
    """All ``y`` in ``piece`` with ``T^steps(y) = value``, found by exact branch inversion."""
    images = [piece]
    for _ in range(steps):
        images.append(tent_image(images[-1]))
    if not images[-1].contains_point(value):
        return []
    layer = {Fraction(value)}
    for j in range(steps - 1, -1, -1):
        layer = {w for v in layer for w in (v / 2, 1 - v / 2) if images[j].contains_point(w)}
    return sorted(layer)


def tent_preimage(piece: Interval, value: Fraction, steps: int) -> Fraction | None:
    """One ``y`` in ``piece`` with ``T^steps(y) = value`` (the one reached by the left-most branches)."""
    images = [piece]
    for _ in range(steps):
        images.append(tent_image(images[-1]))
    if not images[-1].contains_point(value):
        return None
    v = Fraction(value)
    for j in range(steps - 1, -1, -1):
        # v lies in T(images[j]), so at least one branch lands in images[j]
        v = next(w for w in (v / 2, 1 - v / 2) if images[j].contains_point(w))
    return v
