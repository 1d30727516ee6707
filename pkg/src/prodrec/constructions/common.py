"""Helpers shared by the constructions: the diagonal order and transcript plumbing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..systems import (CylinderSubset, Fiber, FinitePoints, Product, Rotation, WholeSpace,
                       fraction_text)

TRANSCRIPT_VERSION = 1


def diagonal_order(rows: int | None, cols: int | None, count: int | None = None) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` along consecutive anti-diagonals: (1,1), (1,2), (2,1), (1,3), ...

    ``rows``/``cols`` cap the indices (None = unbounded); ``count`` caps the length.
    """
    if rows is None and cols is None and count is None:
        raise ValueError("an unbounded order needs a count")
    out = []
    total = 2
    limit = (rows or 10**9) + (cols or 10**9)
    while total <= limit:
        for i in range(1, total):
            j = total - i
            if (rows is None or i <= rows) and (cols is None or j <= cols):
                out.append((i, j))
                if count is not None and len(out) == count:
                    return out
        total += 1
        if rows is not None and cols is not None and total > rows + cols:
            break
    return out


@dataclass
class Transcript:
    """A construction's audit trail; ``body`` is plain JSON data."""

    kind: str
    body: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"transcript": self.kind, "version": TRANSCRIPT_VERSION, **self.body}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, doc: dict) -> "Transcript":
        doc = dict(doc)
        kind = doc.pop("transcript")
        doc.pop("version", None)
        return cls(kind, doc)


def system_doc(system) -> dict:
    """System spec plus the exact rotation numbers, so a replayer needs no constants."""
    doc = system.to_spec()
    if isinstance(system, Rotation):
        doc["alpha_exact"] = fraction_text(system.alpha)
    if isinstance(system, Product):
        doc["left"], doc["right"] = system_doc(system.left), system_doc(system.right)
    return doc


def subset_doc(system, subset) -> dict:
    if isinstance(subset, Fiber):
        return {"type": "Fiber", "base": fraction_text(subset.base)}
    if isinstance(subset, FinitePoints):
        return {"type": "FinitePoints", "points": [system.point_to_json(p) for p in subset.points]}
    if isinstance(subset, (WholeSpace, CylinderSubset)):
        return subset.to_json()
    raise ValueError(f"unknown subset {type(subset).__name__}")
