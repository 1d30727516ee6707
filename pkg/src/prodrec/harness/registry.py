"""Bundled experiment specs shipped inside the package."""

from __future__ import annotations

import json
from importlib import resources


def _folder():
    return resources.files("prodrec.harness") / "experiments"


def bundled() -> list[dict]:
    """Every bundled spec, sorted by name."""
    docs = []
    for entry in _folder().iterdir():
        if entry.name.endswith(".json"):
            docs.append(json.loads(entry.read_text()))
    return sorted(docs, key=lambda d: d["name"])


def find(name: str) -> dict | None:
    return next((d for d in bundled() if d["name"] == name), None)


def listing(tag: str | None = None) -> list[dict]:
    return [{"name": d["name"], "tags": d.get("tags", []), "description": d.get("description", ""),
             "verb": d["operation"]["verb"]}
            for d in bundled() if tag is None or tag in d.get("tags", [])]
