"""Two-sided 0/1 sequences, cylinders and the shift engines."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .. import _kernels
from ..errors import BudgetExceeded, PreconditionError
from .base import Ball, System, Whole

TAILS = ("zeros", "periodic", "explicit")


def _symbols(word) -> tuple[int, ...]:
    if isinstance(word, str):
        out = tuple(int(c) for c in word)
    else:
        out = tuple(int(c) for c in word)
    if any(c not in (0, 1) for c in out):
        raise ValueError("symbols must be 0 or 1")
    return out


@dataclass(frozen=True)
class Cylinder:
    """Points whose symbols at ``offset, offset+1, ...`` spell ``pattern``."""

    offset: int
    pattern: tuple[int, ...]

    def __post_init__(self):
        pattern = _symbols(self.pattern)
        if not pattern:
            raise ValueError("cylinder pattern must be non-empty")
        object.__setattr__(self, "pattern", pattern)
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def end(self) -> int:
        return self.offset + len(self.pattern)

    @property
    def word(self) -> str:
        return "".join(map(str, self.pattern))

    def constraints(self, shift: int = 0) -> dict[int, int]:
        return {self.offset + shift + i: s for i, s in enumerate(self.pattern)}

    def to_json(self) -> dict:
        return {"type": "Cylinder", "offset": self.offset, "pattern": self.word}

    def __str__(self):
        return f"[{self.word}]@{self.offset}"


class SymbolicPoint:
    """A bi-infinite 0/1 sequence known on ``[lo, lo + len(data))``.

    Outside that range the tail rule applies: ``zeros``, ``periodic``
    (``x[i] = period[(i + phase) % len(period)]``) or ``explicit`` (reading
    outside the stored data is an error).
    """

    __slots__ = ("data", "lo", "tail", "period", "phase")

    def __init__(self, data=(), lo: int = 0, tail: str = "zeros", period=None, phase: int = 0):
        if tail not in TAILS:
            raise ValueError(f"tail must be one of {TAILS}")
        arr = np.array(_symbols(data) if isinstance(data, str) else data, dtype=np.uint8).ravel()
        if arr.size and arr.max() > 1:
            raise ValueError("symbols must be 0 or 1")
        arr.setflags(write=False)
        self.data = arr
        self.lo = int(lo)
        self.tail = tail
        if tail == "periodic":
            period = _symbols(period or ())
            if not period:
                raise ValueError("a periodic tail needs a non-empty period word")
            self.period = period
            self.phase = int(phase) % len(period)
        else:
            self.period = None
            self.phase = 0

    @classmethod
    def from_window(cls, radius: int, symbols, tail: str = "explicit", period=None) -> "SymbolicPoint":
        sym = _symbols(symbols) if isinstance(symbols, str) else symbols
        if len(sym) != 2 * radius + 1:
            raise ValueError("window data must cover [-radius, radius]")
        return cls(sym, -radius, tail, period)

    @classmethod
    def periodic_point(cls, word, phase: int = 0) -> "SymbolicPoint":
        return cls((), 0, "periodic", word, phase)

    @classmethod
    def from_word(cls, word, start: int = 0, tail: str = "zeros") -> "SymbolicPoint":
        return cls(word, start, tail)

    @property
    def hi(self) -> int:
        return self.lo + int(self.data.size)

    @property
    def radius(self) -> int:
        """Largest r with ``[-r, r]`` inside the stored data (tails permitting)."""
        if self.tail != "explicit":
            return 10**9
        return min(-self.lo, self.hi - 1)

    def __getitem__(self, i: int) -> int:
        return int(self.window(i, i + 1)[0])

    def window(self, a: int, b: int) -> np.ndarray:
        """Symbols at positions ``a .. b-1``."""
        n = max(0, b - a)
        if self.tail == "zeros":
            out = np.zeros(n, dtype=np.uint8)
        elif self.tail == "periodic":
            idx = (np.arange(a, b, dtype=np.int64) + self.phase) % len(self.period)
            out = np.asarray(self.period, dtype=np.uint8)[idx]
        else:
            if a < self.lo or b > self.hi:
                raise IndexError(
                    f"positions [{a}, {b}) not known; point stores [{self.lo}, {self.hi})"
                )
            return self.data[a - self.lo : b - self.lo].copy()
        s, e = max(a, self.lo), min(b, self.hi)
        if s < e:
            out[s - a : e - a] = self.data[s - self.lo : e - self.lo]
        return out

    def word(self, a: int, b: int) -> str:
        return "".join(map(str, self.window(a, b)))

    def shifted(self, n: int) -> "SymbolicPoint":
        """The left shift applied ``n`` times: ``y[i] = x[i + n]``."""
        out = SymbolicPoint.__new__(SymbolicPoint)
        out.data = self.data
        out.lo = self.lo - n
        out.tail = self.tail
        out.period = self.period
        out.phase = (self.phase + n) % len(self.period) if self.period else 0
        return out

    def with_symbols(self, constraints: dict[int, int]) -> "SymbolicPoint":
        """Copy with the given positions overwritten (the stored range grows as needed)."""
        if not constraints:
            return self
        lo = min(self.lo, min(constraints))
        hi = max(self.hi, max(constraints) + 1)
        if self.tail == "explicit" and (lo < self.lo or hi > self.hi):
            raise IndexError("cannot extend an explicit point beyond its data")
        data = self.window(lo, hi)
        for pos, sym in constraints.items():
            data[pos - lo] = sym
        return SymbolicPoint(data, lo, self.tail, self.period, self.phase)

    def _compare_range(self, other: "SymbolicPoint") -> tuple[int, int]:
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        pad = 0
        for p in (self, other):
            if p.period:
                pad = max(pad, len(p.period))
        if self.period and other.period:
            pad = math.lcm(len(self.period), len(other.period))
        return lo - pad, hi + pad

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicPoint):
            return NotImplemented
        if (self.tail == "explicit") != (other.tail == "explicit"):
            return False
        if self.tail == "explicit":
            return self.lo == other.lo and np.array_equal(self.data, other.data)
        if (self.tail == "periodic") != (other.tail == "periodic"):
            # a zeros tail equals a periodic tail only if the period is all zeros
            per = self.period or other.period
            if any(per):
                return False
        a, b = self._compare_range(other)
        return bool(np.array_equal(self.window(a, b), other.window(a, b)))

    def __hash__(self):
        return hash((self.tail, self.lo, self.data.tobytes()))

    def __repr__(self):
        shown = self.word(self.lo, min(self.hi, self.lo + 24)) if self.tail != "periodic" or self.data.size else ""
        return f"SymbolicPoint(lo={self.lo}, data={shown!r}{'...' if self.data.size > 24 else ''}, tail={self.tail})"

    def to_json(self) -> dict:
        out = {"lo": self.lo, "data": "".join(map(str, self.data.tolist())), "tail": self.tail}
        if self.period:
            out["period"] = "".join(map(str, self.period))
            out["phase"] = self.phase
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SymbolicPoint":
        return cls(data.get("data", ""), data.get("lo", 0), data.get("tail", "zeros"),
                   data.get("period"), data.get("phase", 0))


def shift_distance(x: SymbolicPoint, y: SymbolicPoint, depth: int = 64) -> Fraction:
    """``2^-k`` with ``k`` the least ``|i|`` where the points differ.

    Only ``|i| <= depth`` is inspected and agreement there reports 0.  When an
    explicit point stores less than ``depth``, agreement on the stored part
    ``[-r, r]`` reports the upper bound ``2^-(r+1)`` instead.
    """
    known = min(depth, x.radius, y.radius)
    if known < 0:
        return Fraction(1)
    xs = x.window(-known, known + 1)
    ys = y.window(-known, known + 1)
    diff = np.flatnonzero(xs != ys)
    if diff.size:
        return Fraction(1, 2 ** int(np.min(np.abs(diff - known))))
    return Fraction(0) if known == depth else Fraction(1, 2 ** (known + 1))


def ball_radius_to_width(eps: Fraction) -> int:
    """Largest r such that agreeing on ``[-r, r]`` keeps the distance below ``eps``; -1 means everything."""
    eps = Fraction(eps)
    # d = 2^-k < eps  <=>  k >= w with w the least integer such that 2^-w < eps
    w = 0
    while Fraction(1, 2**w) >= eps:
        w += 1
    return w - 1


def merge_constraints(*parts: dict[int, int]) -> dict[int, int] | None:
    out: dict[int, int] = {}
    for part in parts:
        for pos, sym in part.items():
            if out.setdefault(pos, sym) != sym:
                return None
    return out


class ShiftSpace(System):
    """Common engine for subshifts of the two-sided full shift under the left shift."""

    exact = True
    resolution = 64

    def check_point(self, point):
        if not isinstance(point, SymbolicPoint):
            raise ValueError(f"{self.kind} expects a SymbolicPoint, got {type(point).__name__}")

    def iterate(self, point, steps):
        return point.shifted(steps)

    def distance(self, a, b):
        return shift_distance(a, b, self.resolution)

    def basic(self, open_set):
        if isinstance(open_set, Ball):
            r = ball_radius_to_width(open_set.radius)
            if r < 0:
                return Whole()
            return Cylinder(-r, tuple(open_set.center.window(-r, r + 1)))
        if isinstance(open_set, (Cylinder, Whole)):
            return open_set
        raise ValueError(f"{self.kind} cannot use open set {type(open_set).__name__}")

    def member(self, open_set, point):
        open_set = self.basic(open_set)
        if isinstance(open_set, Whole):
            return True
        return bool(np.array_equal(point.window(open_set.offset, open_set.end),
                                   np.asarray(open_set.pattern, dtype=np.uint8)))

    def orbit_mask(self, point, open_set, horizon, cancel=None):
        open_set = self.basic(open_set)
        if isinstance(open_set, Whole):
            return np.ones(horizon + 1, dtype=np.uint8), []
        k = len(open_set.pattern)
        data = point.window(open_set.offset, open_set.offset + horizon + k)
        pattern = np.asarray(open_set.pattern, dtype=np.uint8)
        return _kernels.match_cylinder(data, pattern, 0, horizon + 1), []

    def cell(self, point, eps):
        # agreeing on [-r, r] keeps the distance <= 2^-(r+1)
        eps = Fraction(eps)
        if eps >= 1:
            return ()
        r = 0
        while Fraction(1, 2 ** (r + 1)) > eps:
            r += 1
        return tuple(point.window(-r, r + 1).tolist())

    def point_to_json(self, point):
        return point.to_json()

    def point_from_json(self, data):
        return SymbolicPoint.from_json(data)

    # language hooks ------------------------------------------------------

    def admissible(self, constraints: dict[int, int]) -> bool:
        """Is there a point of the space carrying these symbols?"""
        raise NotImplementedError

    def forces(self, premise: dict[int, int], conclusion: dict[int, int]) -> bool:
        """Does every point carrying ``premise`` also carry ``conclusion``?"""
        raise NotImplementedError

    def transfer(self, a, b, horizon):
        if isinstance(a, Whole) or isinstance(b, Whole):
            other = b if isinstance(a, Whole) else a
            ok = isinstance(other, Whole) or self.admissible(other.constraints())
            return (list(range(1, horizon + 1)) if ok else []), []
        times = []
        for n in range(1, horizon + 1):
            # y in a with (sigma^n y) in b  <=>  y carries b's pattern shifted by n
            merged = merge_constraints(a.constraints(), b.constraints(n))
            if merged is not None and self.admissible(merged):
                times.append(n)
        return times, []

    def containment(self, u, v, horizon):
        if isinstance(v, Whole):
            return list(range(1, horizon + 1)), []
        if isinstance(u, Whole):
            return [n for n in range(1, horizon + 1) if self.forces({}, v.constraints(n))], []
        if not self.admissible(u.constraints()):
            raise PreconditionError(f"cylinder {u} is empty in {self.kind}")
        times = [n for n in range(1, horizon + 1) if self.forces(u.constraints(), v.constraints(n))]
        return times, []


class FullShift(ShiftSpace):
    kind = "FullShift"

    def admissible(self, constraints):
        return constraints is not None

    def forces(self, premise, conclusion):
        return all(premise.get(pos) == sym for pos, sym in conclusion.items())


class CodedShift(ShiftSpace):
    """Closure of all bi-infinite concatenations of the generator words.

    Admissibility is decided on the path graph of positions inside the
    generators, restricted to spans of at most ``span_budget`` symbols.
    """

    kind = "SubshiftFromGenerators"

    def __init__(self, words: Iterable, span_budget: int = 64):
        self.words = tuple("".join(map(str, _symbols(w))) for w in words)
        if not self.words or any(not w for w in self.words):
            raise ValueError("generator words must be non-empty")
        self.span_budget = int(span_budget)
        states = [(g, i) for g, w in enumerate(self.words) for i in range(len(w))]
        self._index = {s: k for k, s in enumerate(states)}
        self._labels = np.array([int(self.words[g][i]) for g, i in states], dtype=np.uint8)
        starts = [self._index[(g, 0)] for g in range(len(self.words))]
        succ = []
        for g, i in states:
            if i + 1 < len(self.words[g]):
                succ.append([self._index[(g, i + 1)]])
            else:
                succ.append(starts)
        self._succ = succ

    def to_spec(self):
        return {"kind": self.kind, "words": list(self.words), "span_budget": self.span_budget}

    def _span(self, *parts):
        positions = [p for part in parts for p in part]
        if not positions:
            return 0, 0
        lo, hi = min(positions), max(positions) + 1
        if hi - lo > self.span_budget:
            raise BudgetExceeded(
                f"language span {hi - lo} exceeds span_budget={self.span_budget}",
                budget=self.span_budget,
            )
        return lo, hi

    def _step(self, reach: set[int]) -> set[int]:
        out: set[int] = set()
        for s in reach:
            out.update(self._succ[s])
        return out

    def admissible(self, constraints):
        if constraints is None:
            return False
        lo, hi = self._span(constraints)
        reach = set(range(len(self._labels)))
        for pos in range(lo, hi):
            if pos > lo:
                reach = self._step(reach)
            want = constraints.get(pos)
            if want is not None:
                reach = {s for s in reach if self._labels[s] == want}
            if not reach:
                return False
        return True

    def forces(self, premise, conclusion):
        lo, hi = self._span(premise, conclusion)
        # states paired with "already violated the conclusion"
        reach = {(s, False) for s in range(len(self._labels))}
        for pos in range(lo, hi):
            if pos > lo:
                reach = {(t, v) for s, v in reach for t in self._succ[s]}
            want = premise.get(pos)
            if want is not None:
                reach = {(s, v) for s, v in reach if self._labels[s] == want}
            need = conclusion.get(pos)
            if need is not None:
                reach = {(s, v or self._labels[s] != need) for s, v in reach}
            if not reach:
                return True
        return not any(v for _, v in reach)


class SampledShift(ShiftSpace):
    """Subshift whose language is read off a stored reference window.

    Used for orbit closures of a single sequence (Toeplitz flows), where the
    factors of the reference sequence are exactly the admissible words.
    """

    kind = "SampledShift"

    def __init__(self, reference: SymbolicPoint, lo: int, hi: int):
        self.reference = reference
        self.lo, self.hi = int(lo), int(hi)
        self._data = reference.window(self.lo, self.hi)

    def _hits(self, constraints, lo, hi):
        count = self._data.size - (hi - lo) + 1
        if count <= 0:
            return np.zeros(0, dtype=bool)
        ok = np.ones(count, dtype=bool)
        for pos, sym in constraints.items():
            ok &= self._data[pos - lo : pos - lo + count] == sym
        return ok

    def admissible(self, constraints):
        if constraints is None:
            return False
        if not constraints:
            return True
        lo, hi = min(constraints), max(constraints) + 1
        return bool(self._hits(constraints, lo, hi).any())

    def forces(self, premise, conclusion):
        if not conclusion:
            return True
        positions = list(premise) + list(conclusion)
        lo, hi = min(positions), max(positions) + 1
        hits = self._hits(premise, lo, hi)
        good = hits & self._hits(conclusion, lo, hi)
        return bool(np.array_equal(hits, good))


def rotation_coding(alpha: Fraction, radius: int, intercept: Fraction = Fraction(0)) -> SymbolicPoint:
    """Sturmian-type coding ``x[i] = floor((i+1)a + c) - floor(i a + c)`` on ``[-radius, radius]``."""
    alpha = Fraction(alpha)
    idx = range(-radius, radius + 2)
    floors = [math.floor(i * alpha + intercept) for i in idx]
    data = [floors[k + 1] - floors[k] for k in range(2 * radius + 1)]
    return SymbolicPoint(data, -radius, "explicit")
