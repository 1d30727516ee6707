"""Experiment specs, report persistence and the exit-code contract."""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__
from ..errors import BudgetExceeded, PreconditionError
from ..recurrence import Verdict
from ..systems import SpecError, spec_hash, system_from_spec
from .verbs import VERBS, Context

SCHEMA_VERSION = 1
REPORT_DIR_ENV = "PRODREC_REPORT_DIR"
DEFAULT_REPORT_DIR = "prodrec-reports"

EXIT_HOLDS, EXIT_FAILS, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_SCHEMA, EXIT_UNKNOWN_VERB, EXIT_BUDGET, EXIT_PRECONDITION = 3, 4, 5, 6

VERDICT_EXIT = {Verdict.HOLDS: EXIT_HOLDS, Verdict.FAILS: EXIT_FAILS, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}

# params that size a scan, checked against budgets["max_horizon"]
SIZED_PARAMS = ("horizon", "window")


class SchemaError(ValueError):
    exit_code = EXIT_SCHEMA


class UnknownVerb(KeyError):
    exit_code = EXIT_UNKNOWN_VERB

    def __str__(self):
        return f"unknown verb {self.args[0]!r}; known verbs: {', '.join(sorted(VERBS))}"


def validate_spec(doc) -> dict:
    """Check the experiment schema; returns the document unchanged."""
    if not isinstance(doc, dict):
        raise SchemaError("an experiment spec is a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"schema_version must be {SCHEMA_VERSION}")
    for key, kind in (("name", str), ("systems", list), ("operation", dict), ("seed", int)):
        if not isinstance(doc.get(key), kind) or isinstance(doc.get(key), bool):
            raise SchemaError(f"field {key!r} must be a {kind.__name__}")
    if not 0 <= doc["seed"] < 2**64:
        raise SchemaError("seed must be a 64-bit unsigned integer")
    op = doc["operation"]
    if not isinstance(op.get("verb"), str) or not isinstance(op.get("params", {}), dict):
        raise SchemaError("operation needs a string 'verb' and an object 'params'")
    if not isinstance(doc.get("budgets", {}), dict):
        raise SchemaError("budgets must be an object")
    if op["verb"] not in VERBS:
        raise UnknownVerb(op["verb"])
    return doc


def load_spec(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _check_budgets(params: dict, budgets: dict) -> None:
    limit = budgets.get("max_horizon")
    if limit is None:
        return
    for key in SIZED_PARAMS:
        value = params.get(key)
        if isinstance(value, int) and value > limit:
            raise BudgetExceeded(f"{key}={value} exceeds the budget max_horizon={limit}", budget=limit)


@dataclass
class RunReport:
    body: dict
    timings: dict
    transcript: dict | None
    exit_code: int
    path: Path | None = None
    messages: list = field(default_factory=list)

    def body_text(self) -> str:
        return json.dumps(self.body, sort_keys=True, indent=1)


def report_dir(override=None) -> Path:
    return Path(override or os.environ.get(REPORT_DIR_ENV) or DEFAULT_REPORT_DIR)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run_experiment(doc: dict, seed: int | None = None, out_dir=None, persist: bool = True) -> RunReport:
    """Validate, execute and persist one experiment.

    Errors that stop the run (schema, unknown verb, budget, precondition)
    propagate; the CLI maps them to exit codes.
    """
    doc = dict(doc)
    if seed is not None:
        doc["seed"] = seed
    validate_spec(doc)
    try:
        systems = [system_from_spec(s) for s in doc["systems"]]
    except SpecError as exc:
        raise SchemaError(str(exc)) from exc
    op = doc["operation"]
    params = op.get("params", {})
    budgets = doc.get("budgets", {})
    _check_budgets(params, budgets)
    started = time.perf_counter()
    try:
        outcome = VERBS[op["verb"]](Context(systems, params, doc["seed"]))
    except SpecError as exc:
        raise SchemaError(str(exc)) from exc
    elapsed = time.perf_counter() - started
    input_hash = spec_hash(doc)
    transcript = outcome.transcript.to_json() if outcome.transcript else None
    body = {
        "report_version": 1,
        "name": doc["name"],
        "verb": op["verb"],
        "seed": doc["seed"],
        "input_hash": input_hash,
        "tool_version": __version__,
        "verdict": outcome.verdict.value,
        "results": outcome.results,
        "transcript_hash": spec_hash(transcript) if transcript else None,
    }
    timings = {"elapsed_s": round(elapsed, 6)}
    code = VERDICT_EXIT[outcome.verdict]
    report = RunReport(body, timings, transcript, code)
    limit = budgets.get("time_s")
    if limit is not None and elapsed > limit:
        timings["time_budget_exceeded"] = limit
        report.exit_code = EXIT_BUDGET
        report.messages.append(f"run took {elapsed:.1f}s, over the time budget of {limit}s")
    if persist:
        folder = report_dir(out_dir) / f"{doc['name']}-{input_hash[:12]}"
        _atomic_write(folder / "report.json", report.body_text() + "\n")
        _atomic_write(folder / "timings.json", json.dumps(timings, sort_keys=True) + "\n")
        if transcript is not None:
            _atomic_write(folder / "transcript.json", json.dumps(transcript, sort_keys=True, indent=1) + "\n")
        _atomic_write(folder / "spec.json", json.dumps(doc, sort_keys=True, indent=1) + "\n")
        report.path = folder
    return report


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (SchemaError, UnknownVerb)):
        return exc.exit_code
    if isinstance(exc, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, PreconditionError):
        return EXIT_PRECONDITION
    raise exc
