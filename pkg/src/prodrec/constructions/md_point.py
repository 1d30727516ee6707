"""A point whose returns to the 1-cylinder sit inside ``S1 ∩ S2``.

``S1 = N(x, U)`` comes from a minimal point ``x`` and ``S2`` is a union of
long blocks.  The point is built in stages: stage 1 keeps the symbols of
``x``'s return indicator inside the blocks, and stage ``m+1`` rewrites the
blocks of row ``m+1`` so that the word ``z[0..m]`` reappears at a sparse,
block-internal set ``A`` of times while every other symbol there becomes 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import PreconditionError
from ..families import WindowSet, is_piecewise_syndetic, is_syndetic_with_gap, max_hole
from ..systems import Cylinder, FullShift, ShiftSpace, SymbolicPoint
from .common import Transcript, diagonal_order


@dataclass(frozen=True)
class Block:
    start: int
    length: int
    row: int
    col: int

    @property
    def stop(self) -> int:
        return self.start + self.length

    def to_json(self) -> dict:
        return {"start": self.start, "length": self.length, "row": self.row, "col": self.col}


@dataclass(frozen=True)
class ThickBlockSpec:
    """Blocks ``B_j = [n_j, n_j + j)`` renumbered into rows along the diagonal order."""

    blocks: tuple[Block, ...]

    @classmethod
    def from_starts(cls, starts) -> "ThickBlockSpec":
        starts = [int(n) for n in starts]
        for j, (a, b) in enumerate(zip(starts, starts[1:]), start=1):
            if b - a <= j * j:
                raise ValueError(f"block starts need n_(j+1) - n_j > j^2; fails at j={j}: {a}, {b}")
        pairs = diagonal_order(None, None, len(starts))
        blocks = tuple(Block(n, j, i, c) for j, (n, (i, c)) in enumerate(zip(starts, pairs), start=1))
        return cls(blocks)

    @classmethod
    def cubes(cls, window: int) -> "ThickBlockSpec":
        """``n_j = j^3`` for every block that fits in ``[0, window)``."""
        starts = []
        j = 1
        while j**3 + j <= window:
            starts.append(j**3)
            j += 1
        return cls.from_starts(starts)

    def row(self, i: int) -> list[Block]:
        return sorted((b for b in self.blocks if b.row == i), key=lambda b: b.start)

    def union_mask(self, window: int) -> np.ndarray:
        mask = np.zeros(window, dtype=bool)
        for b in self.blocks:
            mask[b.start : min(b.stop, window)] = True
        return mask

    def row_mask(self, i: int, window: int) -> np.ndarray:
        mask = np.zeros(window, dtype=bool)
        for b in self.row(i):
            mask[b.start : min(b.stop, window)] = True
        return mask


@dataclass(frozen=True)
class MdStage:
    m: int
    threshold: int
    neighborhood: Cylinder
    times: WindowSet
    z: np.ndarray = field(repr=False)
    ps_gap: int
    ps_block: int

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "threshold": self.threshold,
            "V": self.neighborhood.to_json(),
            "A": self.times.to_text(),
            "z": WindowSet.from_mask(self.z).to_text(),
            "ps_scale": {"gap_bound": self.ps_gap, "block_length": self.ps_block},
        }


@dataclass(frozen=True)
class MdConstruction:
    x: SymbolicPoint
    open_set: Cylinder
    window: int
    blocks: ThickBlockSpec
    stages: tuple[MdStage, ...]
    limit: SymbolicPoint
    complete: bool
    gap_bound: int

    target = Cylinder(0, "1")

    def returns_to_target(self) -> WindowSet:
        z = self.limit.window(0, self.window)
        return WindowSet.of((n for n in np.flatnonzero(z).tolist() if n >= 1), self.window)

    def transcript(self) -> Transcript:
        return Transcript("md-point", {
            "system": FullShift().to_spec(),
            "x": self.x.to_json(),
            "U": self.open_set.to_json(),
            "window": self.window,
            "gap_bound": self.gap_bound,
            "blocks": [b.to_json() for b in self.blocks.blocks],
            "stages": [s.to_json() for s in self.stages],
            "limit": {"z": WindowSet.from_mask(self.limit.window(0, self.window)).to_text(),
                      "W1": self.target.to_json()},
            "status": "complete" if self.complete else "inconclusive",
        })


def _scale_of(times: WindowSet, row_blocks: list[Block]) -> tuple[int, int]:
    """(gap, block length) read off the longest row block that carries a member."""
    best = None
    for b in row_blocks:
        inside = [k for k in times.members if b.start <= k < b.stop]
        if not inside:
            continue
        local = WindowSet(b.length, tuple(k - b.start for k in inside))
        gap = max_hole(local)
        if best is None or b.length > best[1]:
            best = (gap, b.length)
    return best if best is not None else (0, 0)


def _orbit_indicator(system: ShiftSpace, x: SymbolicPoint, cyl: Cylinder, window: int) -> np.ndarray:
    mask, _ = system.orbit_mask(x, cyl, window - 1)
    return mask.astype(bool)


def build_md_point(x: SymbolicPoint, u: Cylinder, blocks: ThickBlockSpec, depth: int,
                   window: int = 10**4, gap_bound: int = 64) -> MdConstruction:
    """Run stages ``1..depth`` on ``[0, window)``.

    ``x`` must return to ``U`` with gaps at most ``gap_bound`` on the window
    (minimality at scale).  A stage with no admissible times ends the run
    early and the result is flagged incomplete.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    system = FullShift()
    if not system.member(u, x):
        raise PreconditionError("U must contain x")
    zx = _orbit_indicator(system, x, u, window)
    returns = WindowSet.from_mask(zx)
    verdict = is_syndetic_with_gap(returns, gap_bound)
    if not verdict:
        raise PreconditionError(
            f"x is not minimal at scale: a gap of {max_hole(returns)} exceeds gap_bound={gap_bound}")
    in_blocks = blocks.union_mask(window)

    z = (zx & in_blocks).astype(np.uint8)
    z[0] = 1
    row1 = blocks.row_mask(1, window)
    a1 = WindowSet.of((k for k in np.flatnonzero(zx & row1).tolist() if k >= 1), window)
    gap, length = _scale_of(a1, blocks.row(1))
    stages = [MdStage(1, 1, u, a1, z, gap, length)]
    complete = True

    for m in range(1, depth):
        row = m + 1
        row_blocks = [b for b in blocks.row(row) if b.stop <= window]
        if not row_blocks:
            complete = False
            break
        if row_blocks[0].start <= m:
            raise ValueError(f"row {row} starts at {row_blocks[0].start}, not beyond {m}")
        # blocks from column t on are separated by more than 3m
        t = 1
        for a, b in zip(row_blocks, row_blocks[1:]):
            if b.start - (a.stop - 1) <= 3 * m:
                t = b.col + 1
        v = Cylinder(u.offset, tuple(x.window(u.offset, u.end + m)))
        vx = _orbit_indicator(system, x, v, window)
        chosen = []
        for b in row_blocks:
            if b.col < t:
                continue
            last = None
            for k in range(b.start + m, b.stop - m):
                if vx[k] and (last is None or k - last > 3 * m):
                    chosen.append(k)
                    last = k
        prev = z
        z = prev.copy()
        z[blocks.row_mask(row, window)] = 0
        for k in chosen:
            z[k : k + m + 1] = prev[0 : m + 1]
        times = WindowSet.of(chosen, window)
        gap, length = _scale_of(times, row_blocks)
        stages.append(MdStage(row, t, v, times, z, gap, length))
        if not chosen:
            complete = False
            break

    limit = SymbolicPoint(z, 0, "zeros")
    return MdConstruction(x, u, window, blocks, tuple(stages), limit, complete, gap_bound)


def check_md_construction(result: MdConstruction) -> dict:
    """Direct checks of the stated containments (used by tests and the runner)."""
    window = result.window
    zx = _orbit_indicator(FullShift(), result.x, result.open_set, window)
    in_blocks = result.blocks.union_mask(window)
    returns = result.returns_to_target()
    inside = all(zx[n] and in_blocks[n] for n in returns)
    stages_ok = []
    for stage in result.stages:
        s = stage.m
        w = Cylinder(-s + 1, tuple(result.limit.window(-s + 1, s)))
        hits = all(
            np.array_equal(result.limit.window(k - s + 1, k + s), np.asarray(w.pattern, dtype=np.uint8))
            for k in stage.times)
        ps = bool(stage.times.members) and bool(is_piecewise_syndetic(stage.times, max(stage.ps_gap, 1), stage.ps_block))
        stages_ok.append({"m": s, "A_in_returns": hits, "piecewise_syndetic": ps})
    return {"returns_inside_S1_S2": inside, "return_count": len(returns), "stages": stages_ok}
