"""Hole-filling Toeplitz sequences, their periodic structure and readouts.

Stage ``k`` of the scheme with periods ``s_1 | s_2 | ... | s_m`` splits the
remaining hole class (mod ``s_{k-1}``) into ``s_k / s_{k-1}`` classes mod
``s_k`` and fills all but the last one with the stage symbol.  With
``s_k = 2^k`` the holes left after stage ``k`` are the positions
``n = -1 (mod 2^k)``.  Holes surviving the last stage receive free symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .odometer import Odometer
from .symbolic import SampledShift, SymbolicPoint


@dataclass(frozen=True)
class ToeplitzSpec:
    periods: tuple[int, ...]
    stage_word: str = "01"
    # "random" plants seeded free symbols; "0" or "1" fills every hole alike
    hole_fill: str = "random"
    seed: int = 0

    def __post_init__(self):
        periods = tuple(int(s) for s in self.periods)
        object.__setattr__(self, "periods", periods)
        if not periods:
            raise ValueError("a Toeplitz scheme needs at least one period")
        if periods[0] < 2:
            raise ValueError("the first period must be at least 2")
        for a, b in zip(periods, periods[1:]):
            if b % a or b == a:
                raise ValueError(f"periods must strictly grow by divisibility: {a}, {b}")
        if not self.stage_word or set(self.stage_word) - {"0", "1"}:
            raise ValueError("stage_word must be a non-empty 0/1 word")
        if self.hole_fill not in ("random", "0", "1"):
            raise ValueError("hole_fill must be 'random', '0' or '1'")

    @classmethod
    def standard(cls, depth: int, seed: int = 0, **kw) -> "ToeplitzSpec":
        """The hole-doubling scheme with periods ``2, 4, ..., 2^depth``."""
        if depth < 1:
            raise ValueError("depth must be at least 1")
        return cls(tuple(2**k for k in range(1, depth + 1)), seed=seed, **kw)

    @property
    def depth(self) -> int:
        return len(self.periods)

    @property
    def hole_period(self) -> int:
        return self.periods[-1]

    def stage_symbol(self, k: int) -> int:
        return int(self.stage_word[k % len(self.stage_word)])

    def hole_residue(self) -> int:
        """Residue class mod the last period left unfilled by all stages."""
        h = self.periods[0] - 1
        for prev, cur in zip(self.periods, self.periods[1:]):
            h += (cur // prev - 1) * prev
        return h

    def to_json(self) -> dict:
        return {"periods": list(self.periods), "stage_word": self.stage_word,
                "hole_fill": self.hole_fill, "seed": self.seed}


def skeleton(spec: ToeplitzSpec, lo: int, hi: int):
    """(symbols, is_hole) over positions ``lo .. hi-1`` before hole filling."""
    pos = np.arange(lo, hi, dtype=np.int64)
    symbols = np.zeros(pos.size, dtype=np.uint8)
    filled = np.zeros(pos.size, dtype=bool)
    prev, hole = 1, 0
    for k, s in enumerate(spec.periods):
        keep = hole + (s // prev - 1) * prev
        stage = (pos % prev == hole) & (pos % s != keep)
        symbols[stage & ~filled] = spec.stage_symbol(k)
        filled |= stage
        prev, hole = s, keep
    return symbols, ~filled


@dataclass(frozen=True)
class ToeplitzFlow:
    """A constructed Toeplitz sequence with its factor data."""

    spec: ToeplitzSpec
    radius: int
    point: SymbolicPoint
    holes: tuple[int, ...]
    system: SampledShift = field(repr=False)
    odometer: Odometer = field(repr=False)

    def project(self, n: int = 0) -> tuple[int, ...]:
        """Odometer image of the n-th shift of the sequence."""
        return self.odometer.point(n)

    def readout_positions(self, lo: int = 0, hi: int | None = None) -> list[int]:
        hi = self.radius + 1 if hi is None else hi
        return [h for h in self.holes if lo <= h < hi]


class ToeplitzShift(SampledShift):
    kind = "Toeplitz"

    def __init__(self, spec: ToeplitzSpec, reference: SymbolicPoint, radius: int):
        super().__init__(reference, -radius, radius + 1)
        self.spec = spec
        self.radius = radius

    def to_spec(self):
        return {"kind": self.kind, **self.spec.to_json(), "radius": self.radius}


def fill_holes(spec: ToeplitzSpec, hole_positions: np.ndarray) -> np.ndarray:
    if spec.hole_fill != "random":
        return np.full(hole_positions.size, int(spec.hole_fill), dtype=np.uint8)
    rng = np.random.default_rng(spec.seed)
    return rng.integers(0, 2, size=hole_positions.size, dtype=np.uint8)


def make_toeplitz(spec: ToeplitzSpec, radius: int) -> ToeplitzFlow:
    """Build the sequence on ``[-radius, radius]`` with its odometer factor."""
    if radius < spec.hole_period:
        raise ValueError("radius must cover at least one full period")
    lo, hi = -radius, radius + 1
    symbols, is_hole = skeleton(spec, lo, hi)
    holes = np.flatnonzero(is_hole) + lo
    symbols[is_hole] = fill_holes(spec, holes)
    point = SymbolicPoint(symbols, lo, "explicit")
    system = ToeplitzShift(spec, point, radius)
    return ToeplitzFlow(spec, radius, point, tuple(int(h) for h in holes), system, Odometer(spec.periods))


def periodic_positions(x: SymbolicPoint, period: int, lo: int, hi: int) -> np.ndarray:
    """Positions n in [lo, hi) with ``x(n) = x(n + k*period)`` for every k seen in the window."""
    if period < 1:
        raise ValueError("period must be positive")
    data = x.window(lo, hi)
    pos = np.arange(lo, hi, dtype=np.int64)
    cls = pos % period
    ones = np.bincount(cls, weights=data, minlength=period)
    total = np.bincount(cls, minlength=period)
    constant = (ones == 0) | (ones == total)
    return pos[constant[cls]]


def aperiodic_positions(x: SymbolicPoint, periods, lo: int, hi: int) -> np.ndarray:
    """Window positions outside every ``Per_s`` for the given periods."""
    pos = np.arange(lo, hi, dtype=np.int64)
    periodic = np.zeros(pos.size, dtype=bool)
    for s in periods:
        periodic[periodic_positions(x, s, lo, hi) - lo] = True
    return pos[~periodic]


def aperiodic_readout(x: SymbolicPoint, periods, lo: int, hi: int) -> str:
    """Symbols of ``x`` read along its aperiodic positions in ``[lo, hi)``."""
    if isinstance(periods, int):
        periods = (periods,)
    positions = aperiodic_positions(x, periods, lo, hi)
    return "".join(str(x[int(p)]) for p in positions)


def hole_density(spec: ToeplitzSpec, stage: int) -> float:
    """Fraction of positions still unfilled after ``stage`` stages."""
    sub = ToeplitzSpec(spec.periods[:stage], spec.stage_word, spec.hole_fill, spec.seed)
    _, is_hole = skeleton(sub, 0, sub.hole_period)
    return float(is_hole.mean())
