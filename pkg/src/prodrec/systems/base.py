"""Shared pieces of the system engines: the base class, generic open sets,
return-time records and the three time-set queries."""

from __future__ import annotations

import csv
import io
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from ..errors import Cancelled
from ..families import WindowSet

# boundary margin for metric systems; membership closer than this to the
# boundary of an open set is excluded and logged
ETA = Fraction(1, 10**9)


@dataclass(frozen=True)
class Whole:
    """The whole phase space."""

    def to_json(self) -> dict:
        return {"type": "Whole"}


@dataclass(frozen=True)
class Ball:
    center: Any
    radius: Fraction

    def __post_init__(self):
        radius = Fraction(self.radius)
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "radius", radius)


class System:
    """Uniform interface over a concrete dynamical system.

    Subclasses are immutable.  ``exact`` systems decide membership
    combinatorially; the others use exact rationals but still apply the
    ``ETA`` boundary margin so that no time is over-reported.
    """

    kind = "System"
    exact = True
    is_isometry = False

    def check_point(self, point) -> None:
        raise NotImplementedError

    def iterate(self, point, steps: int):
        raise NotImplementedError

    def distance(self, a, b) -> Fraction:
        raise NotImplementedError

    def basic(self, open_set):
        """Rewrite balls (and other generic descriptors) into the native kind."""
        return open_set

    def member(self, open_set, point) -> bool | None:
        """True/False, or None when the point sits within ETA of the boundary."""
        raise NotImplementedError

    def orbit_mask(self, point, open_set, horizon: int, cancel=None):
        """``mask[n] = 1`` iff ``f^n(point)`` lies in ``open_set`` for ``0 <= n <= horizon``."""
        mask = np.zeros(horizon + 1, dtype=np.uint8)
        excluded: list[int] = []
        open_set = self.basic(open_set)
        p = point
        for n in range(horizon + 1):
            if cancel is not None and n % 4096 == 0:
                check_cancel(cancel)
            inside = self.member(open_set, p)
            if inside is None:
                excluded.append(n)
            elif inside:
                mask[n] = 1
            p = self.iterate(p, 1)
        return mask, excluded

    def transfer(self, a, b, horizon: int):
        """(times, excluded) with ``f^n(a)`` meeting ``b`` for ``1 <= n <= horizon``."""
        raise NotImplementedError(f"transfer times are not available for {self.kind}")

    def containment(self, u, v, horizon: int):
        """(times, excluded) with ``f^n(u)`` inside ``v`` for ``1 <= n <= horizon``."""
        raise NotImplementedError(f"containment times are not available for {self.kind}")

    def cell(self, point, eps: Fraction):
        """A hashable label of a partition element of diameter at most ``eps``."""
        raise NotImplementedError

    def point_to_json(self, point):
        raise NotImplementedError

    def point_from_json(self, data):
        raise NotImplementedError

    def to_spec(self) -> dict:
        return {"kind": self.kind}

    def __eq__(self, other):
        return type(self) is type(other) and self.to_spec() == other.to_spec()

    def __hash__(self):
        return hash(repr(self.to_spec()))


def check_cancel(token) -> None:
    if token is not None and token.is_set():
        raise Cancelled("scan cancelled")


def cancel_token() -> threading.Event:
    return threading.Event()


@dataclass(frozen=True)
class ReturnTimeSet:
    """Times ``1 <= n <= horizon`` answering a point/set/containment query."""

    query: str
    times: WindowSet
    horizon: int
    excluded: tuple[int, ...] = ()
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.query not in ("PointToSet", "SetToSet", "Containment"):
            raise ValueError(f"unknown query kind {self.query!r}")
        if self.times.window != self.horizon + 1:
            raise ValueError("times must live in the window [0, horizon]")
        if self.times.members and self.times.members[0] < 1:
            raise ValueError("return times start at 1")

    def __contains__(self, n) -> bool:
        return n in self.times

    def __iter__(self):
        return iter(self.times)

    def __len__(self):
        return len(self.times)

    def to_json(self) -> dict:
        return {
            "query": self.query,
            "horizon": self.horizon,
            "times": self.times.to_text(),
            "excluded": list(self.excluded),
            "detail": self.detail,
        }

    def to_csv(self) -> str:
        """Columns ``n,inside,margin``; one row per time 1..horizon."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "inside", "margin"])
        excluded = set(self.excluded)
        for n in range(1, self.horizon + 1):
            writer.writerow([n, int(n in self.times), "excluded" if n in excluded else ""])
        return buf.getvalue()


def _as_set(query, times, excluded, horizon, detail=None) -> ReturnTimeSet:
    members = sorted({int(t) for t in times if 1 <= t <= horizon})
    return ReturnTimeSet(
        query,
        WindowSet(horizon + 1, tuple(members)),
        horizon,
        tuple(sorted(set(int(e) for e in excluded if 1 <= e <= horizon))),
        detail or {},
    )


def iterate(system: System, point, steps: int):
    if steps < 0:
        raise ValueError("steps must be non-negative")
    system.check_point(point)
    return system.iterate(point, steps)


def return_times(system: System, point, open_set, horizon: int, cancel=None) -> ReturnTimeSet:
    """``N_f(x, U)`` up to ``horizon``."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    system.check_point(point)
    mask, excluded = system.orbit_mask(point, open_set, horizon, cancel)
    times = np.flatnonzero(mask[1:]) + 1
    return _as_set("PointToSet", times.tolist(), excluded, horizon)


def transfer_times(system: System, a, b, horizon: int) -> ReturnTimeSet:
    """``N_f(A, B)``: times when the image of ``A`` meets ``B``."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    times, excluded = system.transfer(system.basic(a), system.basic(b), horizon)
    return _as_set("SetToSet", times, excluded, horizon)


def containment_times(system: System, u, v, horizon: int) -> ReturnTimeSet:
    """``C_f(U, V)``: times when the image of ``U`` lies inside ``V``."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    times, excluded = system.containment(system.basic(u), system.basic(v), horizon)
    return _as_set("Containment", times, excluded, horizon)


@dataclass(frozen=True)
class LimitSetProbe:
    eps: Fraction
    burn_in: int
    horizon: int
    cells: dict  # cell label -> (first visit time, representative point)

    @property
    def representatives(self) -> list:
        return [rep for _, rep in self.cells.values()]

    def __len__(self):
        return len(self.cells)


def limit_set_probe(system: System, point, burn_in: int, horizon: int, eps) -> LimitSetProbe:
    """Cells of diameter ``<= eps`` visited after ``burn_in``; one representative each."""
    if burn_in >= horizon:
        raise ValueError("burn_in must be smaller than horizon")
    eps = Fraction(eps)
    system.check_point(point)
    cells: dict = {}
    p = system.iterate(point, burn_in + 1)
    for n in range(burn_in + 1, horizon + 1):
        key = system.cell(p, eps)
        if key not in cells:
            cells[key] = (n, p)
        p = system.iterate(p, 1)
    return LimitSetProbe(eps, burn_in, horizon, cells)


def distance_to_set(system: System, point, others) -> Fraction:
    return min(system.distance(point, q) for q in others)
