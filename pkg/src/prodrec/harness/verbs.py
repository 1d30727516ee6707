"""Operations an experiment spec can name, each returning a verdict, results and a transcript."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..constructions import (ThickBlockSpec, Transcript, arc_grid, build_ip_return_point, build_md_point,
                             build_toeplitz_counterexample, check_md_construction, cylinder_grid,
                             disjointness_probe, omega_limit_escape_example, residue_grid,
                             search_wpr_points, synchronization_check, verify_weak_mixing_order_n)
from ..constructions.disjointness import disjointness_transcript
from ..constructions.omega_escape import omega_transcript
from ..constructions.toeplitz_counterexample import toeplitz_transcript
from ..constructions.weak_mixing import weak_mixing_transcript
from ..constructions.wpr_search import wpr_transcript
from ..families import WindowSet, is_ip_at_depth
from ..recurrence import Verdict, property_p_probe
from ..systems import (CylinderSubset, Fiber, FinitePoints, Odometer, SpecError, WholeSpace, open_set_from_json,
                       return_times, rotation_coding, tent_periodic_points, to_fraction)


@dataclass
class Context:
    systems: list
    params: dict
    seed: int


@dataclass
class Outcome:
    verdict: Verdict
    results: dict
    transcript: Transcript | None = None


VERBS: dict[str, Callable[[Context], Outcome]] = {}


def verb(name):
    def register(fn):
        VERBS[name] = fn
        return fn
    return register


def _system(ctx: Context, key: str = "system", default: int = 0):
    index = ctx.params.get(key, default)
    try:
        return ctx.systems[index]
    except (IndexError, TypeError):
        raise SpecError(f"{key}={index!r} does not name one of the {len(ctx.systems)} systems") from None


def _subset(system, doc):
    kind = (doc or {"type": "WholeSpace"}).get("type")
    if kind == "WholeSpace":
        return WholeSpace()
    if kind == "Fiber":
        return Fiber(to_fraction(doc["base"]))
    if kind == "FinitePoints":
        return FinitePoints(tuple(system.point_from_json(p) for p in doc["points"]))
    if kind == "CylinderSubset":
        return CylinderSubset(open_set_from_json(system, doc["cylinder"]))
    raise SpecError(f"unknown subset type {kind!r}")


def _point(system, doc):
    if isinstance(doc, dict) and "rotation_coding" in doc:
        spec = doc["rotation_coding"]
        return rotation_coding(to_fraction(spec.get("alpha", "golden")), int(spec["radius"]))
    return system.point_from_json(doc)


def _sets(system, docs):
    return [open_set_from_json(system, d) for d in docs]


@verb("md-point")
def run_md_point(ctx: Context) -> Outcome:
    p = ctx.params
    system = _system(ctx)
    window = int(p.get("window", 10**4))
    blocks = p.get("blocks", "cubes")
    spec = ThickBlockSpec.cubes(window) if blocks == "cubes" else ThickBlockSpec.from_starts(blocks)
    result = build_md_point(_point(system, p["x"]), open_set_from_json(system, p["U"]), spec,
                            int(p["depth"]), window, int(p.get("gap_bound", 64)))
    checks = check_md_construction(result)
    results = {
        "status": "complete" if result.complete else "inconclusive",
        "checks": checks,
        "stages": [{"m": s.m, "threshold": s.threshold, "A_size": len(s.times),
                    "ps_scale": [s.ps_gap, s.ps_block]} for s in result.stages],
    }
    ok = checks["returns_inside_S1_S2"] and all(s["A_in_returns"] and s["piecewise_syndetic"]
                                                 for s in checks["stages"])
    if not result.complete:
        results["budget"] = {"window": window, "depth": int(p["depth"])}
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.HOLDS if ok else Verdict.FAILS
    return Outcome(verdict, results, result.transcript())


def _ladder(ctx: Context, p: dict):
    system = _system(ctx)
    subset = _subset(system, p.get("subset"))
    return build_ip_return_point(system, subset, open_set_from_json(system, p["U"]),
                                 _sets(system, p["targets"]), int(p["depth"]), seed=ctx.seed,
                                 horizon=p.get("horizon"), budget=int(p.get("budget", 100_000)))


@verb("ip-ladder")
def run_ip_ladder(ctx: Context) -> Outcome:
    ladder = _ladder(ctx, ctx.params)
    check = ladder.check()
    certificates = []
    if ladder.engine == "shift":
        for i, v in enumerate(ladder.targets, start=1):
            sums = ladder.sums(i)
            top = max(sums) + 1
            returns = return_times(ladder.system, ladder.limit, v, top).times
            local = WindowSet.of(returns.members, top)
            ip = is_ip_at_depth(local, ladder.depth)
            certificates.append({"target": i, "sums_are_returns": all(s in returns for s in sums),
                                 "classifier": ip.holds_at_scale})
    results = {"check": check, "certificates": certificates,
               "generators": [ladder.generators(i) for i in range(1, len(ladder.targets) + 1)]}
    ok = check["ok"] and all(c["sums_are_returns"] and c["classifier"] for c in certificates)
    return Outcome(Verdict.HOLDS if ok else Verdict.FAILS, results, ladder.transcript())


def _grid(system, doc):
    if "cylinders" in doc:
        return cylinder_grid(int(doc["cylinders"]))
    if "residues" in doc:
        if not isinstance(system, Odometer):
            raise SpecError("a residue grid needs an odometer")
        return residue_grid(system, int(doc["residues"]))
    if "arcs" in doc:
        return arc_grid(to_fraction(doc["arcs"]))
    if "sets" in doc:
        return _sets(system, doc["sets"])
    raise SpecError(f"unknown grid {doc!r}")


@verb("disjointness")
def run_disjointness(ctx: Context) -> Outcome:
    p = ctx.params
    horizon = int(p["horizon"])
    ladder = _ladder(ctx, {**p["ladder"], "horizon": horizon})
    x_sys, y_sys = ladder.system, _system(ctx, "y_system", 1)
    y = _point(y_sys, p["y"])
    v_grid, w_grid = _grid(x_sys, p["v_grid"]), _grid(y_sys, p["w_grid"])
    report = disjointness_probe(x_sys, ladder.limit, y_sys, y, v_grid, w_grid, horizon, ladder)
    results = {k: v for k, v in report.evidence.items() if k != "first_times"}
    results["ladder_generators"] = [ladder.generators(i) for i in range(1, len(ladder.targets) + 1)]
    return Outcome(report.verdict, results,
                   disjointness_transcript(x_sys, ladder.limit, y_sys, y, v_grid, w_grid, report))


@verb("wpr-search")
def run_wpr_search(ctx: Context) -> Outcome:
    p = ctx.params
    system = _system(ctx)
    subset = _subset(system, p["subset"])
    base = subset.base if isinstance(subset, Fiber) else None
    points = [(base, q) for period in p.get("periods", [1, 2, 3]) for q in tent_periodic_points(period)]
    radii = p.get("radii", [1, 2, 3])
    horizon = int(p["horizon"])
    found = search_wpr_points(system, subset, points, radii, horizon, seed=ctx.seed)
    sync = None
    if found["candidates"] and "sync" in p:
        s = p["sync"]
        y_sys = _system(ctx, "y_system", 1)
        xi = (base, to_fraction(s["xi"]))
        sync = synchronization_check(system, found["candidates"][0].point, xi, y_sys,
                                     _point(y_sys, s["y"]), open_set_from_json(y_sys, s["V"]),
                                     to_fraction(s["eps"]), horizon)
    results = {"verdict_search": found["verdict"].value, "candidates": len(found["candidates"]),
               "ladder_generators": found["ladder_generators"], "sync": sync}
    verdict = found["verdict"]
    if found.get("budget"):
        results["budget"] = found["budget"]
    if verdict is Verdict.HOLDS and sync is not None and not sync["ok"]:
        verdict = Verdict.FAILS
    return Outcome(verdict, results, wpr_transcript(system, subset, points, radii, found, sync))


@verb("weak-mixing-order-n")
def run_weak_mixing(ctx: Context) -> Outcome:
    p = ctx.params
    system = _system(ctx)
    subset = _subset(system, p.get("subset"))
    us, vs = _sets(system, p["U"]), _sets(system, p["V"])
    report = verify_weak_mixing_order_n(system, subset, us, vs, int(p["horizon"]), bool(p.get("induction")))
    return Outcome(report.verdict, report.to_json(), weak_mixing_transcript(system, subset, us, vs, report))


@verb("rxt-example")
def run_rxt(ctx: Context) -> Outcome:
    """Weak mixing of order n on the fiber holds while property (P) fails, as claimed."""
    p = ctx.params
    system = _system(ctx)
    subset = _subset(system, p["subset"])
    us, vs = _sets(system, p["U"]), _sets(system, p["V"])
    mixing = verify_weak_mixing_order_n(system, subset, us, vs, int(p["horizon"]), True)
    prop = property_p_probe(system, subset, open_set_from_json(system, p["P_set"]),
                            int(p["k_budget"]), int(p["horizon"]))
    ok = mixing.verdict is Verdict.HOLDS and prop.verdict is Verdict.FAILS
    results = {"weak_mixing": mixing.to_json(), "property_p": prop.to_json()}
    return Outcome(Verdict.HOLDS if ok else Verdict.FAILS, results,
                   weak_mixing_transcript(system, subset, us, vs, mixing))


@verb("toeplitz-counterexample")
def run_toeplitz(ctx: Context) -> Outcome:
    p = ctx.params
    report = build_toeplitz_counterexample(int(p["depth"]), int(p["window"]), seed=ctx.seed)
    results = {k: v for k, v in report.evidence.items() if k not in ("x", "scan")}
    results["scan_tail"] = report.evidence["scan"][-2:]
    return Outcome(report.verdict, results, toeplitz_transcript(report))


@verb("omega-escape")
def run_omega(ctx: Context) -> Outcome:
    p = ctx.params
    report = omega_limit_escape_example(to_fraction(p["eps"]), int(p.get("horizon", 200)))
    return Outcome(report.verdict, report.evidence, omega_transcript(report))
