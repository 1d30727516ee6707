"""Command-line entry point: ``prodrec run|replay|list|classify|returns``."""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from ..errors import BudgetExceeded, PreconditionError
from ..families import Family, WindowSet, classify as classify_set
from ..systems import SpecError, open_set_from_json, return_times, system_from_spec
from . import registry
from .replay import TranscriptParseError, replay_transcript
from .runner import (EXIT_FAILS, EXIT_HOLDS, EXIT_SCHEMA, EXIT_UNKNOWN_VERB, SchemaError, UnknownVerb,
                     exit_code_for, load_spec, run_experiment)


class Exit(Exception):
    def __init__(self, code: int):
        self.code = code


class VerbGroup(click.Group):
    def resolve_command(self, ctx, args):
        name = args[0] if args else None
        if name is not None and name not in self.commands and not name.startswith("-"):
            click.echo(f"error: unknown verb {name!r}; known verbs: {', '.join(sorted(self.commands))}", err=True)
            raise Exit(EXIT_UNKNOWN_VERB)
        return super().resolve_command(ctx, args)


@click.group(cls=VerbGroup)
def cli():
    """Finite-window return-time experiments."""


def _resolve_spec(arg: str) -> dict:
    path = Path(arg)
    if path.exists():
        return load_spec(path)
    doc = registry.find(arg)
    if doc is None:
        raise SchemaError(f"{arg} is neither a spec file nor a bundled experiment")
    return doc


def _run_one(arg, seed, report_dir):
    try:
        report = run_experiment(_resolve_spec(arg), seed=seed, out_dir=report_dir)
    except (SchemaError, UnknownVerb, BudgetExceeded, PreconditionError) as exc:
        return arg, exit_code_for(exc), f"error: {exc}", None
    line = f"{report.body['name']}: {report.body['verdict']} -> {report.path}"
    return arg, report.exit_code, line, report.messages


@cli.command()
@click.argument("specs", nargs=-1, required=True)
@click.option("--seed", type=int, default=None, help="Override the spec seed.")
@click.option("--report-dir", type=click.Path(file_okay=False), default=None,
              help="Report directory (default: $PRODREC_REPORT_DIR or ./prodrec-reports).")
@click.option("--workers", type=int, default=1, show_default=True, help="Experiments run in parallel.")
def run(specs, seed, report_dir, workers):
    """Run experiment specs (files or bundled names) and persist their reports."""
    jobs = [(s, seed, report_dir) for s in specs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, *zip(*jobs)))
    else:
        outcomes = [_run_one(*j) for j in jobs]
    worst = EXIT_HOLDS
    for _, code, line, messages in outcomes:
        click.echo(line, err=code > EXIT_FAILS and line.startswith("error"))
        for m in messages or ():
            click.echo(f"  {m}", err=True)
        worst = max(worst, code)
    raise Exit(worst)


@cli.command()
@click.argument("transcript", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable result.")
def replay(transcript, as_json):
    """Re-check a transcript (or a report's transcript.json) from its raw data."""
    try:
        result = replay_transcript(transcript)
    except TranscriptParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        raise Exit(EXIT_SCHEMA)
    if as_json:
        click.echo(json.dumps(result.to_json(), indent=1, sort_keys=True))
    elif result.ok:
        click.echo(f"PASS {result.kind}: {result.checks} checks")
    else:
        for f in result.failures:
            click.echo(f"FAIL {result.kind} at {f['stage']}: {f['set']}: {f['detail']}")
    raise Exit(EXIT_HOLDS if result.ok else EXIT_FAILS)


@cli.command(name="list")
@click.option("--tag", default=None, help="Only experiments carrying this tag.")
@click.option("--json", "as_json", is_flag=True, help="JSON listing.")
def list_(tag, as_json):
    """List the bundled reproductions."""
    rows = registry.listing(tag)
    if as_json:
        click.echo(json.dumps(rows, indent=1))
        return
    for r in rows:
        click.echo(f"{r['name']:<22} [{', '.join(r['tags'])}] {r['description']}")


def _parse_params(items) -> dict:
    out = {}
    for item in items:
        for part in item.replace(",", " ").split():
            key, sep, value = part.partition("=")
            if not sep:
                raise click.BadParameter(f"expected key=value, got {part!r}", param_hint="--params")
            try:
                out[key] = int(value)
            except ValueError:
                out[key] = value
    return out


@cli.command()
@click.argument("set_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--family", required=True, type=click.Choice([f.value for f in Family], case_sensitive=False))
@click.option("--params", "params", multiple=True, help="Scale parameters, e.g. gap_bound=3,block_length=10.")
def classify(set_file, family, params):
    """Classify a run-length WindowSet file (``W=1000;3,5,8-12``) at the given scale."""
    try:
        s = WindowSet.from_text(Path(set_file).read_text())
        family = next(f for f in Family if f.value.lower() == family.lower())
        verdict = classify_set(s, family, **_parse_params(params))
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        raise Exit(EXIT_SCHEMA)
    click.echo(json.dumps(verdict.to_json(), sort_keys=True))
    raise Exit(EXIT_HOLDS if verdict.holds_at_scale else EXIT_FAILS)


def _json_arg(text: str):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return json.loads(text)


@cli.command()
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--point", required=True, help="Point as JSON, or @file.")
@click.option("--open-set", "open_set", required=True, help="Open set as JSON, or @file.")
@click.option("--horizon", required=True, type=int)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")
def returns(system_file, point, open_set, horizon, fmt, out):
    """Return times N(x, U) up to the horizon, as JSON or CSV (n, inside, margin)."""
    try:
        system = system_from_spec(json.loads(Path(system_file).read_text()))
        x = system.point_from_json(_json_arg(point))
        u = open_set_from_json(system, _json_arg(open_set))
        result = return_times(system, x, u, horizon)
    except (SpecError, ValueError, KeyError, TypeError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise Exit(EXIT_SCHEMA)
    text = result.to_csv() if fmt == "csv" else json.dumps(result.to_json(), sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="prodrec", standalone_mode=False)
    except Exit as done:
        return done.code
    except click.exceptions.NoArgsIsHelpError as exc:
        click.echo(exc.ctx.get_help() if exc.ctx else str(exc))
        return EXIT_HOLDS
    except click.ClickException as exc:
        exc.show()
        return EXIT_SCHEMA
    except click.exceptions.Abort:
        return 130
    return EXIT_HOLDS


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
