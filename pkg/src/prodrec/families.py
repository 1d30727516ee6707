"""Finite-window surrogates for Furstenberg families and finite sums.

A subset of the positive integers is only ever seen through a window
``[0, W)``.  Every classifier takes explicit scale parameters and records
them in its verdict, so a finite check is never confused with the infinite
property it approximates.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

import numpy as np

from . import _kernels


class Family(str, enum.Enum):
    INFINITE = "Infinite"
    THICK = "Thick"
    SYNDETIC = "Syndetic"
    PIECEWISE_SYNDETIC = "PiecewiseSyndetic"
    PUBD = "PositiveUpperBanachDensity"
    IP = "IP"


@dataclass(frozen=True)
class WindowSet:
    """A subset of ``[0, window)``; members are strictly increasing."""

    window: int
    members: tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.window, (int, np.integer)) or self.window < 1:
            raise ValueError(f"window must be a positive integer, got {self.window!r}")
        members = tuple(int(m) for m in self.members)
        object.__setattr__(self, "window", int(self.window))
        object.__setattr__(self, "members", members)
        prev = -1
        for m in members:
            if m <= prev:
                raise ValueError("members must be strictly increasing")
            if m >= self.window:
                raise ValueError(f"member {m} outside window [0, {self.window})")
            prev = m
        if members and members[0] < 0:
            raise ValueError(f"member {members[0]} outside window [0, {self.window})")

    @classmethod
    def of(cls, items: Iterable[int], window: int) -> "WindowSet":
        """Build from any iterable, dropping duplicates and anything outside the window."""
        return cls(window, tuple(sorted({int(i) for i in items if 0 <= i < window})))

    @classmethod
    def from_mask(cls, mask) -> "WindowSet":
        mask = np.asarray(mask)
        return cls(int(mask.size), tuple(int(i) for i in np.flatnonzero(mask)))

    @cached_property
    def mask(self) -> np.ndarray:
        out = np.zeros(self.window, dtype=np.uint8)
        if self.members:
            out[list(self.members)] = 1
        out.setflags(write=False)
        return out

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.members)

    def __contains__(self, item) -> bool:
        return item in self._lookup

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def issubset(self, other: "WindowSet") -> bool:
        return all(m in other for m in self.members)

    def intersection(self, other: "WindowSet") -> "WindowSet":
        window = min(self.window, other.window)
        return WindowSet(window, tuple(m for m in self.members if m in other and m < window))

    def union(self, other: "WindowSet") -> "WindowSet":
        return WindowSet.of(self.members + other.members, max(self.window, other.window))

    # serialization

    def to_json(self) -> dict:
        return {"window": self.window, "members": list(self.members)}

    @classmethod
    def from_json(cls, data: dict | str) -> "WindowSet":
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, list):
            raise ValueError('a WindowSet document needs a "window" field')
        return cls(int(data["window"]), tuple(int(m) for m in data.get("members", [])))

    def to_text(self) -> str:
        """Run-length text form, e.g. ``W=1000;3,5,8-12``."""
        parts = []
        members = self.members
        i = 0
        while i < len(members):
            j = i
            while j + 1 < len(members) and members[j + 1] == members[j] + 1:
                j += 1
            parts.append(str(members[i]) if i == j else f"{members[i]}-{members[j]}")
            i = j + 1
        return f"W={self.window};" + ",".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "WindowSet":
        m = re.fullmatch(r"\s*W=(\d+);?(.*?)\s*", text, flags=re.S)
        if m is None:
            raise ValueError(f"not a run-length WindowSet: {text[:40]!r}")
        window = int(m.group(1))
        items: list[int] = []
        body = m.group(2).strip()
        for chunk in filter(None, (c.strip() for c in body.split(","))):
            if "-" in chunk:
                a, b = chunk.split("-", 1)
                items.extend(range(int(a), int(b) + 1))
            else:
                items.append(int(chunk))
        return cls(window, tuple(items))


@dataclass(frozen=True)
class FamilyVerdict:
    family: Family
    holds_at_scale: bool
    scale_params: dict = field(default_factory=dict)
    witness: Any = None

    def __post_init__(self):
        if self.holds_at_scale and self.witness is None:
            raise ValueError("a positive verdict must carry a witness")

    def __bool__(self) -> bool:
        return self.holds_at_scale

    def to_json(self) -> dict:
        witness = self.witness
        if isinstance(witness, Fraction):
            witness = str(witness)
        return {
            "family": self.family.value,
            "holds_at_scale": self.holds_at_scale,
            "scale_params": dict(self.scale_params),
            "witness": witness,
        }


@dataclass(frozen=True)
class FiniteSums:
    generators: tuple[int, ...]
    sums: WindowSet


def subset_sums(generators: Sequence[int]) -> set[int]:
    """All sums of non-empty subsequences, without any window cut."""
    sums: set[int] = set()
    for p in generators:
        sums |= {s + p for s in sums}
        sums.add(p)
    return sums


def finite_sums(generators: Sequence[int], window: int) -> FiniteSums:
    gens = tuple(int(p) for p in generators)
    if not gens:
        raise ValueError("finite_sums needs at least one generator")
    if any(p <= 0 for p in gens):
        raise ValueError(f"generators must be positive, got {list(gens)}")
    return FiniteSums(gens, WindowSet.of(subset_sums(gens), window))


def shift_set(s: WindowSet, offset: int) -> WindowSet:
    """Return ``{m - t : m in s, m >= t}`` in the window ``W - t``."""
    if offset < 0:
        raise ValueError("offset must be non-negative")
    if offset >= s.window:
        raise ValueError(f"offset {offset} does not fit in window {s.window}")
    return WindowSet(s.window - offset, tuple(m - offset for m in s.members if m >= offset))


def is_infinite_at_scale(s: WindowSet, min_count: int = 1) -> FamilyVerdict:
    holds = len(s) >= min_count
    return FamilyVerdict(
        Family.INFINITE,
        holds,
        {"window": s.window, "min_count": min_count},
        list(s.members[:min_count]) if holds else None,
    )


def is_thick_at_scale(s: WindowSet, block_length: int) -> FamilyVerdict:
    if block_length < 1:
        raise ValueError("block_length must be at least 1")
    if block_length > s.window:
        raise ValueError(f"block_length {block_length} exceeds window {s.window}")
    start = _kernels.first_one_run(s.mask, block_length)
    params = {"window": s.window, "block_length": block_length}
    return FamilyVerdict(Family.THICK, start >= 0, params, start if start >= 0 else None)


def max_hole(s: WindowSet) -> int:
    """Length of the longest stretch of consecutive non-members in the window."""
    length, _ = _kernels.longest_zero_run(s.mask)
    return int(length)


def is_syndetic_with_gap(s: WindowSet, gap_bound: int) -> FamilyVerdict:
    """Every interval ``[i, i + N]`` inside the window meets the set.

    The witness is the longest run of non-members, which must not exceed N.
    """
    if gap_bound < 1:
        raise ValueError("gap_bound must be at least 1")
    hole = max_hole(s)
    holds = bool(s.members) and hole <= gap_bound
    return FamilyVerdict(
        Family.SYNDETIC, holds, {"window": s.window, "gap_bound": gap_bound}, hole if holds else None
    )


def is_piecewise_syndetic(s: WindowSet, gap_bound: int, block_length: int) -> FamilyVerdict:
    if gap_bound < 1:
        raise ValueError("gap_bound must be at least 1")
    if not 1 <= block_length <= s.window:
        raise ValueError(f"block_length must lie in [1, {s.window}]")
    start = _kernels.first_ps_window(s.mask, gap_bound, block_length)
    params = {"window": s.window, "gap_bound": gap_bound, "block_length": block_length}
    if start < 0:
        return FamilyVerdict(Family.PIECEWISE_SYNDETIC, False, params)
    return FamilyVerdict(Family.PIECEWISE_SYNDETIC, True, params, (start, block_length))


def default_min_span(window: int) -> int:
    return max(1, math.isqrt(window - 1) + 1) if window > 1 else 1


def upper_banach_density(s: WindowSet, min_span: int | None = None) -> Fraction:
    """Largest ``#(s & [m, n]) / (n - m + 1)`` over intervals of length at least ``min_span``."""
    return _density(s, min_span)[0]


def _density(s: WindowSet, min_span: int | None):
    span = default_min_span(s.window) if min_span is None else min_span
    if span < 1:
        raise ValueError("min_span must be at least 1")
    if span > s.window:
        raise ValueError(f"min_span {span} exceeds window {s.window}")
    # a span of length >= 2L splits into two spans of length >= L, one at least as dense
    count, length, start = _kernels.best_density(s.mask, span)
    return Fraction(count, length), span, (start, length)


def has_positive_density(
    s: WindowSet, threshold: Fraction | float = 0, min_span: int | None = None
) -> FamilyVerdict:
    """Density surrogate: the densest long interval beats ``threshold``."""
    density, span, (start, length) = _density(s, min_span)
    threshold = Fraction(threshold)
    holds = density > threshold
    params = {"window": s.window, "min_span": span, "threshold": str(threshold)}
    witness = {"start": start, "length": length, "density": str(density)} if holds else None
    return FamilyVerdict(Family.PUBD, holds, params, witness)


def find_ip_generators(s: WindowSet, depth: int) -> list[int] | None:
    """Smallest (lexicographic, non-decreasing) ``p_1..p_d`` whose finite sums lie in ``s``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    candidates = [m for m in s.members if m > 0]
    member = s._lookup
    window = s.window

    def extend(chosen: list[int], sums: list[int], top: int, start: int):
        if len(chosen) == depth:
            return list(chosen)
        for idx in range(start, len(candidates)):
            p = candidates[idx]
            if p + top >= window:
                break
            if all(q + p in member for q in sums):
                found = extend(chosen + [p], sums + [p] + [q + p for q in sums], top + p, idx)
                if found is not None:
                    return found
        return None

    return extend([], [], 0, 0)


def is_ip_at_depth(s: WindowSet, depth: int) -> FamilyVerdict:
    gens = find_ip_generators(s, depth)
    return FamilyVerdict(Family.IP, gens is not None, {"window": s.window, "depth": depth}, gens)


def classify(s: WindowSet, family: Family | str, **params) -> FamilyVerdict:
    """Dispatch to the classifier for ``family`` with its scale parameters."""
    family = Family(family)
    needed = {Family.THICK: ("block_length",), Family.SYNDETIC: ("gap_bound",),
              Family.PIECEWISE_SYNDETIC: ("gap_bound", "block_length"), Family.IP: ("depth",)}
    missing = [k for k in needed.get(family, ()) if k not in params]
    if missing:
        raise ValueError(f"{family.value} needs scale parameter(s) {', '.join(missing)}")
    if family is Family.INFINITE:
        return is_infinite_at_scale(s, params.get("min_count", 1))
    if family is Family.THICK:
        return is_thick_at_scale(s, params["block_length"])
    if family is Family.SYNDETIC:
        return is_syndetic_with_gap(s, params["gap_bound"])
    if family is Family.PIECEWISE_SYNDETIC:
        return is_piecewise_syndetic(s, params["gap_bound"], params["block_length"])
    if family is Family.PUBD:
        return has_positive_density(s, params.get("threshold", 0), params.get("min_span"))
    return is_ip_at_depth(s, params["depth"])


def verify_witness(s: WindowSet, verdict: FamilyVerdict) -> bool:
    """Re-check a positive verdict's witness directly against the members."""
    if not verdict.holds_at_scale:
        return True
    p = verdict.scale_params
    w = verdict.witness
    if verdict.family is Family.INFINITE:
        return len(w) >= p["min_count"] and all(m in s for m in w)
    if verdict.family is Family.THICK:
        n = p["block_length"]
        return w + n <= s.window and all(i in s for i in range(w, w + n))
    if verdict.family is Family.SYNDETIC:
        n = p["gap_bound"]
        return bool(s.members) and all(
            any(j in s for j in range(i, i + n + 1)) for i in range(0, s.window - n)
        )
    if verdict.family is Family.PIECEWISE_SYNDETIC:
        start, n = w
        gap = p["gap_bound"]
        inside = [m for m in s.members if start <= m < start + n]
        if not inside:
            return False
        edges = [start - 1] + inside + [start + n]
        return all(b - a - 1 <= gap for a, b in zip(edges, edges[1:]))
    if verdict.family is Family.PUBD:
        start, length = w["start"], w["length"]
        count = sum(1 for m in s.members if start <= m < start + length)
        return length >= p["min_span"] and Fraction(count, length) > Fraction(p["threshold"])
    return subset_sums(w) <= set(s.members)
