"""JSON ingestion of system specs, open sets and points.

System documents carry a ``kind`` tag; open sets carry a ``type`` tag.
"""

from __future__ import annotations

import hashlib
import json

from .base import Ball, System, Whole
from .metric import Arc, Interval, IntervalSet, Rotation, TentMap, to_fraction
from .odometer import Odometer, OnePoint, Residue
from .product import Product, ProductBox
from .symbolic import CodedShift, Cylinder, FullShift
from .toeplitz import ToeplitzSpec, make_toeplitz

SCHEMA_VERSION = 1


class SpecError(ValueError):
    """A document does not follow the system / open-set schema."""


def _need(doc: dict, key: str):
    if key not in doc:
        raise SpecError(f"missing field {key!r} in {doc.get('kind') or doc.get('type')} document")
    return doc[key]


def system_from_spec(doc: dict) -> System:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpecError("system document needs a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "FullShift":
            return FullShift()
        if kind == "SubshiftFromGenerators":
            return CodedShift(_need(doc, "words"), doc.get("span_budget", 64))
        if kind == "Rotation":
            return Rotation(doc.get("alpha", "golden"))
        if kind == "TentMap":
            return TentMap()
        if kind == "Odometer":
            return Odometer(_need(doc, "periods"))
        if kind == "OnePoint":
            return OnePoint()
        if kind == "Toeplitz":
            spec = ToeplitzSpec(tuple(_need(doc, "periods")), doc.get("stage_word", "01"),
                                doc.get("hole_fill", "random"), doc.get("seed", 0))
            return make_toeplitz(spec, doc.get("radius", 4 * spec.hole_period)).system
        if kind == "Product":
            return Product(system_from_spec(_need(doc, "left")), system_from_spec(_need(doc, "right")))
    except SpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecError(f"bad {kind} document: {exc}") from exc
    raise SpecError(f"unknown system kind {kind!r}")


def open_set_from_json(system: System, doc: dict):
    if not isinstance(doc, dict) or "type" not in doc:
        raise SpecError("open-set document needs a 'type' field")
    kind = doc["type"]
    try:
        if kind == "Whole":
            return Whole()
        if kind == "Cylinder":
            return Cylinder(doc.get("offset", 0), _need(doc, "pattern"))
        if kind == "Ball":
            return Ball(system.point_from_json(_need(doc, "center")), to_fraction(_need(doc, "radius")))
        if kind == "Interval":
            closed = doc.get("closed", [False, False])
            return Interval(to_fraction(_need(doc, "lo")), to_fraction(_need(doc, "hi")), bool(closed[0]), bool(closed[1]))
        if kind == "Arc":
            return Arc(to_fraction(_need(doc, "lo")), to_fraction(_need(doc, "hi")))
        if kind == "IntervalSet":
            return IntervalSet(tuple(open_set_from_json(system, p) for p in _need(doc, "pieces")))
        if kind == "Residue":
            return Residue(int(_need(doc, "level")), int(_need(doc, "value")))
        if kind == "ProductBox":
            if not isinstance(system, Product):
                raise SpecError("ProductBox needs a Product system")
            return ProductBox(open_set_from_json(system.left, _need(doc, "left")),
                              open_set_from_json(system.right, _need(doc, "right")))
    except SpecError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SpecError(f"bad {kind} open set: {exc}") from exc
    raise SpecError(f"unknown open-set type {kind!r}")


def spec_hash(doc) -> str:
    """Stable SHA-256 of a JSON document (sorted keys, compact separators)."""
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()
