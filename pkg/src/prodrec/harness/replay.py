"""Standalone re-checking of construction transcripts.

Everything here is re-derived from the raw transcript data with its own
small arithmetic (symbol readers, tent interval images, arc tests); nothing
is imported from the code that built the transcript.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

MARGIN = Fraction(1, 10**9)


class TranscriptParseError(ValueError):
    pass


@dataclass
class ReplayResult:
    kind: str
    failures: list[dict] = field(default_factory=list)
    checks: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, condition: bool, stage: str, what: str, detail: str = "") -> bool:
        self.checks += 1
        if not condition:
            self.failures.append({"stage": stage, "set": what, "detail": detail})
        return bool(condition)

    def to_json(self) -> dict:
        return {"kind": self.kind, "ok": self.ok, "checks": self.checks,
                "failures": self.failures, **({"notes": self.notes} if self.notes else {})}


# -- raw readers -------------------------------------------------------------

def rle_members(text: str) -> tuple[int, list[int]]:
    head, _, body = text.partition(";")
    if not head.startswith("W="):
        raise TranscriptParseError(f"bad run-length set {text[:30]!r}")
    out = []
    for chunk in body.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "-" in chunk:
            a, b = chunk.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(chunk))
    return int(head[2:]), out


class Symbols:
    """Read-only symbol access for a serialized 0/1 point."""

    def __init__(self, doc: dict):
        self.lo = int(doc.get("lo", 0))
        self.data = doc.get("data", "")
        self.tail = doc.get("tail", "zeros")
        self.period = doc.get("period")
        self.phase = int(doc.get("phase", 0))

    def __getitem__(self, i: int) -> int:
        j = i - self.lo
        if 0 <= j < len(self.data):
            return int(self.data[j])
        if self.tail == "zeros":
            return 0
        if self.tail == "periodic":
            return int(self.period[(i + self.phase) % len(self.period)])
        raise IndexError(f"position {i} is outside the stored symbols")

    def array(self, a: int, b: int) -> np.ndarray:
        return np.array([self[i] for i in range(a, b)], dtype=np.uint8)


def cylinder_constraints(doc: dict, shift: int = 0) -> dict[int, int]:
    if doc.get("type") != "Cylinder":
        raise TranscriptParseError(f"expected a cylinder, got {doc.get('type')}")
    return {doc["offset"] + i + shift: int(c) for i, c in enumerate(doc["pattern"])}


def carries(point: Symbols, cons: dict[int, int], shift: int = 0) -> bool:
    return all(point[p + shift] == s for p, s in cons.items())


def alpha_of(doc: dict) -> Fraction:
    if "alpha_exact" in doc:
        return Fraction(doc["alpha_exact"])
    if doc.get("alpha") == "golden":
        digits = 10**50
        return Fraction((math.isqrt(5 * digits * digits) - digits) // 2, digits)
    return Fraction(doc["alpha"])


def frac_mod1(q: Fraction) -> Fraction:
    return q - math.floor(q)


def in_arc(doc: dict, p: Fraction) -> bool:
    lo, hi = Fraction(doc["lo"]), Fraction(doc["hi"])
    t = frac_mod1(p - lo)
    return MARGIN < t < (hi - lo) - MARGIN


def arc_inside(inner: dict, outer: dict, turn: Fraction) -> bool:
    a_lo, a_hi = Fraction(inner["lo"]) + turn, Fraction(inner["hi"]) + turn
    b_lo, b_hi = Fraction(outer["lo"]), Fraction(outer["hi"])
    start = frac_mod1(a_lo - b_lo)
    return start >= MARGIN and start + (a_hi - a_lo) <= (b_hi - b_lo) - MARGIN


@dataclass(frozen=True)
class Span:
    lo: Fraction
    hi: Fraction
    lc: bool
    hc: bool

    @classmethod
    def of(cls, doc: dict) -> "Span":
        closed = doc.get("closed", [False, False])
        return cls(Fraction(doc["lo"]), Fraction(doc["hi"]), bool(closed[0]), bool(closed[1]))

    def has(self, p: Fraction) -> bool:
        return (self.lo < p or (self.lc and p == self.lo)) and (p < self.hi or (self.hc and p == self.hi))

    def inside(self, other: "Span") -> bool:
        left = other.lo < self.lo or (other.lo == self.lo and (other.lc or not self.lc))
        right = self.hi < other.hi or (self.hi == other.hi and (other.hc or not self.hc))
        return left and right

    def meets(self, other: "Span") -> bool:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            return True
        return lo == hi and self.has(lo) and other.has(lo)


def tent_span(s: Span) -> Span:
    half = Fraction(1, 2)
    pieces = []
    if s.lo < half or (s.lo == half and s.lc):
        hi, hc = (s.hi, s.hc) if s.hi <= half else (half, True)
        pieces.append(Span(2 * s.lo, 2 * hi, s.lc, hc))
    if s.hi > half or (s.hi == half and s.hc):
        lo, lc = (s.lo, s.lc) if s.lo >= half else (half, True)
        pieces.append(Span(2 - 2 * s.hi, 2 - 2 * lo, s.hc, lc))
    if len(pieces) == 1:
        return pieces[0]
    a, b = pieces
    lo = min(a.lo, b.lo)
    lc = (a.lo == lo and a.lc) or (b.lo == lo and b.lc)
    return Span(lo, Fraction(1), lc, a.hc or b.hc)


def tent_point(p: Fraction) -> Fraction:
    return 2 * p if p <= Fraction(1, 2) else 2 - 2 * p


def tent_power(s: Span, n: int) -> Span:
    for _ in range(n):
        s = tent_span(s)
        if s == Span(Fraction(0), Fraction(1), True, True):
            break
    return s


def finite_sums(gens: list[int]) -> list[int]:
    out = set()
    for r in range(1, len(gens) + 1):
        for combo in itertools.combinations(gens, r):
            out.add(sum(combo))
    return sorted(out)


def diagonal(rows: int, cols: int) -> list[list[int]]:
    out = []
    for total in range(2, rows + cols + 1):
        for i in range(1, total):
            if i <= rows and total - i <= cols:
                out.append([i, total - i])
    return out


# -- md point ------------------------------------------------------------------

def _replay_md(doc: dict, res: ReplayResult) -> None:
    x = Symbols(doc["x"])
    u = cylinder_constraints(doc["U"])
    h = int(doc["window"])
    blocks = doc["blocks"]
    for a, b in zip(blocks, blocks[1:]):
        j = a["length"]
        res.check(b["start"] - a["start"] > j * j, "blocks", f"B_{j}", "gap condition")
        res.check(a["start"] + a["length"] <= b["start"], "blocks", f"B_{j}", "disjointness")
    rows = {}
    for b in blocks:
        rows.setdefault(b["row"], []).append(b)
    for r, bs in rows.items():
        cols = [b["col"] for b in sorted(bs, key=lambda b: b["start"])]
        res.check(cols == sorted(cols), "blocks", f"row {r}", "columns out of order")
        if r + 1 in rows:
            res.check(min(b["start"] for b in bs) < min(b["start"] for b in rows[r + 1]),
                      "blocks", f"row {r}", "first blocks out of order")

    def row_mask(r):
        m = np.zeros(h, dtype=bool)
        for b in rows.get(r, []):
            m[b["start"]:min(h, b["start"] + b["length"])] = True
        return m

    all_blocks = np.zeros(h, dtype=bool)
    for r in rows:
        all_blocks |= row_mask(r)
    span = max(u) + 1
    xs = x.array(min(u), h + span)
    off = min(u)
    zx = np.zeros(h, dtype=bool)
    for i in range(h):
        zx[i] = all(xs[p + i - off] == s for p, s in u.items())

    zs = []
    for st in doc["stages"]:
        w, ones = rle_members(st["z"])
        z = np.zeros(h, dtype=np.uint8)
        z[[k for k in ones if k < h]] = 1
        zs.append(z)
    first = doc["stages"][0]
    expect = (zx & all_blocks).astype(np.uint8)
    expect[0] = 1
    res.check(np.array_equal(zs[0], expect), "stage 1", "z", "stage-1 formula")
    _, a1 = rle_members(first["A"])
    want = [i for i in np.flatnonzero(zx & row_mask(1)).tolist() if i >= 1]
    res.check(a1 == want, "stage 1", "A", "stage-1 formula")

    final = zs[-1]

    def zval(z, i):
        return int(z[i]) if 0 <= i < h else 0

    for idx, st in enumerate(doc["stages"]):
        s = st["m"]
        name = f"stage {s}"
        _, a = rle_members(st["A"])
        cur = zs[idx]
        if idx > 0:
            prev = zs[idx - 1]
            rm = row_mask(s)
            res.check(np.array_equal(cur[~rm], prev[~rm]), name, "z", "changed outside the row blocks")
            res.check(bool(np.all(cur <= prev)), name, "z", "not below the previous stage")
            m = s - 1
            res.check(all(b - a_ > 3 * m for a_, b in zip(a, a[1:])), name, "A", "spacing")
            for k in a:
                inside = all(0 <= q < h and rm[q] for q in range(k - s + 1, k + s))
                res.check(inside, name, "A", f"window around {k} leaves the blocks")
                same = all(zval(cur, k + q) == zval(cur, q) for q in range(-s + 1, s))
                res.check(same, name, "A", f"window at {k} differs")
        for k in a:
            same = all(zval(final, k + q) == zval(final, q) for q in range(-s + 1, s))
            res.check(same, name, "A", f"{k} is not a return of z to its {s}-window")
        gap, length = st["ps_scale"]["gap_bound"], st["ps_scale"]["block_length"]
        if a and length:
            mask = np.zeros(h, dtype=bool)
            mask[a] = True
            res.check(_ps_window(mask, max(gap, 1), length), name, "A", "not piecewise syndetic at scale")

    _, limit = rle_members(doc["limit"]["z"])
    res.check(limit == np.flatnonzero(final).tolist(), "limit", "z", "limit differs from last stage")
    bad = [n for n in limit if n >= 1 and not (zx[n] and all_blocks[n])]
    res.check(not bad, "limit", "W1", f"returns outside S1 and S2: {bad[:5]}")
    res.notes["status"] = doc.get("status")


def _ps_window(mask: np.ndarray, gap: int, length: int) -> bool:
    for i in range(0, mask.size - length + 1):
        win = mask[i:i + length]
        if not win.any():
            continue
        run = best = 0
        for v in win:
            run = 0 if v else run + 1
            best = max(best, run)
        if best <= gap:
            return True
    return False


# -- ip ladder -----------------------------------------------------------------

def _replay_ladder(doc: dict, res: ReplayResult) -> None:
    targets = doc["targets"]
    depth = doc["depth"]
    order = doc["order"]
    res.check(order == diagonal(len(targets), depth), "order", "diagonal order", "not the diagonal enumeration")
    fiber = doc["engine"] == "fiber"
    gens = {i: [] for i in range(1, len(targets) + 1)}
    prev_u = doc["U"]
    alpha = alpha_of(doc["system"]["left"]) if fiber else None
    for step in doc["steps"]:
        i, j = step["pair"]
        name = f"step ({i},{j})"
        p = step["generator"]
        res.check(p > sum(gens[i]), name, "generator", f"{p} does not exceed the earlier sum")
        gens[i].append(p)
        sums = finite_sums(gens[i])
        res.check(step["sums"] == sums, name, "sums", "recorded sums differ from S(p)")
        u, v = step["U"], step["V"]
        bound = Fraction(1, i + j + 1)
        if fiber:
            ua, ui = u["left"], Span.of(u["right"])
            pa, pi_ = prev_u["left"], Span.of(prev_u["right"])
            res.check(arc_inside(ua, pa, Fraction(0)) and ui.inside(pi_), name, "U", "not nested")
            res.check(Fraction(ua["hi"]) - Fraction(ua["lo"]) <= bound and ui.hi - ui.lo <= bound,
                      name, "U", "diameter bound")
            for s in step["sums"]:
                for box, label in ((u, "U"), (v, "V")):
                    ok = arc_inside(box["left"], targets[i - 1]["left"], s * alpha) and \
                        tent_power(Span.of(box["right"]), s).inside(Span.of(targets[i - 1]["right"]))
                    res.check(ok, name, label, f"sum {s} not carried into V_{i}")
        else:
            uc, pc = cylinder_constraints(u), cylinder_constraints(prev_u)
            res.check(all(uc.get(q) == c for q, c in pc.items()), name, "U", "not nested")
            r = 0
            while Fraction(1, 2 ** (r + 1)) > bound:
                r += 1
            res.check(all(q in uc for q in range(-r, r + 1)), name, "U", "diameter bound")
            vt = cylinder_constraints(targets[i - 1])
            vc = cylinder_constraints(v)
            for s in sums:
                for cons, label in ((uc, "U"), (vc, "V")):
                    ok = all(cons.get(q + s) == c for q, c in vt.items())
                    res.check(ok, name, label, f"sum {s} not carried into V_{i}")
        prev_u = u
    for i, g in gens.items():
        res.check(len(finite_sums(g)) == 2 ** len(g) - 1, "limit", f"S_{i}", "sums not distinct")
        res.check(doc["generators"][i - 1] == g, "limit", f"S_{i}", "generator list differs")
    limit = doc["limit"]
    if fiber:
        base, yv = Fraction(limit[0]), Fraction(limit[1])
        res.check(in_arc(prev_u["left"], base) and Span.of(prev_u["right"]).has(yv), "limit", "U", "limit outside")
        for i, g in gens.items():
            t = targets[i - 1]
            for s in finite_sums(g):
                y = yv
                for _ in range(s):
                    y = tent_point(y)
                ok = in_arc(t["left"], base + s * alpha) and Span.of(t["right"]).has(y)
                res.check(ok, "limit", f"V_{i}", f"sum {s} is not a return")
    else:
        z = Symbols(limit)
        res.check(carries(z, cylinder_constraints(prev_u)), "limit", "U", "limit outside")
        for i, g in gens.items():
            vt = cylinder_constraints(targets[i - 1])
            for s in finite_sums(g):
                res.check(carries(z, vt, s), "limit", f"V_{i}", f"sum {s} is not a return")


# -- the rest -------------------------------------------------------------------

def _replay_toeplitz(doc: dict, res: ReplayResult) -> None:
    x = doc["x"]["data"]
    k = doc["K"]
    window = doc["window"]
    periods = doc["spec"]["periods"]
    y = x[:k] + ("1" if x[k] == "0" else "0") + x[k + 1:]
    for s in periods:
        cls = x[k % s::s]
        res.check("0" in cls and "1" in cls, "fiber", f"class {k} mod {s}", "K is periodic")
    for q in range(k):
        periodic = any(len(set(x[q % s::s])) == 1 for s in periods)
        res.check(periodic, "fiber", f"position {q}", "an earlier aperiodic position exists")

    def common(length):
        ux, vy = x[:length], y[:length]
        return sum(1 for n in range(1, window + 1) if x.startswith(ux, n) and y.startswith(vy, n))

    for row in doc["scan"]:
        got = common(row["length"])
        res.check(got == row["common"], "scan", f"length {row['length']}", f"{got} common returns, recorded {row['common']}")
    by = {r["length"]: r["common"] for r in doc["scan"]}
    res.check(by.get(k + 1) == 0, "threshold", f"length {k + 1}", "common returns at K+1")
    res.check(by.get(1, 0) > 0, "threshold", "length 1", "control has no common return")


def _replay_omega(doc: dict, res: ReplayResult) -> None:
    eps = Fraction(doc["eps"])
    x = Symbols(doc["x"])
    b = cylinder_constraints(doc["B"])
    res.check(0 < eps < Fraction(1, 2), "setup", "eps", "outside (0, 1/2)")
    res.check(carries(x, b), "setup", "B", "x is not in B")
    # every point of B carries a 1 at some |i| bounded by the pattern; the distance to 0^inf is
    # 2^-min|i| over its forced ones
    forced = [abs(p) for p, s in b.items() if s == 1]
    res.check(bool(forced), "distance", "B", "B has no forced 1")
    dist = Fraction(1, 2 ** min(forced)) if forced else Fraction(0)
    res.check(dist == Fraction(doc["distance_to_omega"]) and dist > eps, "distance", "B", "distance to omega")
    r, burn = doc["net_radius"], doc["burn_in"]
    tail = all(x[n + i] == 0 for n in range(burn + 1, doc["horizon"] + 1) for i in range(-r, r + 1))
    res.check(tail, "omega", "orbit", "orbit does not settle at 0")


def _odometer_step(point: list[int], periods: list[int], n: int) -> list[int]:
    return [(v + n) % s for v, s in zip(point, periods)]


def _y_member(sys_doc: dict, y, w: dict, n: int) -> bool:
    kind = sys_doc["kind"]
    if w.get("type") == "Whole":
        return True
    if kind == "Odometer":
        pt = _odometer_step([int(v) for v in y], sys_doc["periods"], n)
        return pt[w["level"] - 1] == w["value"]
    if kind == "Rotation":
        return in_arc(w, Fraction(y) + n * alpha_of(sys_doc))
    if kind == "OnePoint":
        return True
    if kind == "Product":
        return _y_member(sys_doc["left"], y[0], w["left"], n) and _y_member(sys_doc["right"], y[1], w["right"], n)
    raise TranscriptParseError(f"unsupported distal system {kind}")


def _replay_disjointness(doc: dict, res: ReplayResult) -> None:
    x = Symbols(doc["x"])
    for a, v in enumerate(doc["V"]):
        vc = cylinder_constraints(v)
        for b, w in enumerate(doc["W"]):
            t = doc["first_times"][a][b]
            name = f"pair V{a} W{b}"
            if not res.check(t is not None and 1 <= t <= doc["horizon"], name, "N(x,V)∩N(y,W)", "empty"):
                continue
            res.check(carries(x, vc, t) and _y_member(doc["y_system"], doc["y"], w, t), name,
                      "N(x,V)∩N(y,W)", f"time {t} is not common")


def _fiber_orbit(alpha, p, n):
    base, y = Fraction(p[0]), Fraction(p[1])
    for _ in range(n):
        y = tent_point(y)
    return frac_mod1(base + n * alpha), y


def _circle(a, b):
    d = frac_mod1(a - b)
    return min(d, 1 - d)


def _replay_wpr(doc: dict, res: ReplayResult) -> None:
    alpha = alpha_of(doc["system"]["left"])
    cand = doc["candidate"]
    if not res.check(cand is not None, "candidates", "D", "no candidate"):
        return
    z = cand["point"]
    res.check(Fraction(z[0]) == Fraction(doc["base"]), "candidates", "z", "candidate off the fiber")
    for m in cand["memberships"]:
        name = f"D_({m['i']},{m['j']})"
        t = m["time"]
        if not res.check(t is not None, name, "N(z,B)∩N(x_i,B)", "no common time"):
            continue
        xi = doc["points"][m["i"] - 1]
        r = Fraction(1, m["j"])
        centre = (Fraction(xi[0]), Fraction(xi[1]))
        for label, p in (("z", z), ("x_i", xi)):
            q = _fiber_orbit(alpha, p, t)
            close = _circle(q[0], centre[0]) < r - MARGIN and abs(q[1] - centre[1]) < r - MARGIN
            res.check(close, name, label, f"time {t} leaves the ball")
    sync = doc.get("sync")
    if sync:
        n = sync["t"] + sync["j"]
        res.check(sync["j"] <= sync["M"], "sync", "j", "beyond the M-block")
        q = _fiber_orbit(alpha, z, n)
        xi = (Fraction(sync["xi"][0]), Fraction(sync["xi"][1]))
        eps = Fraction(sync["eps"])
        d = max(_circle(q[0], xi[0]), abs(q[1] - xi[1]))
        res.check(d < 2 * eps, "sync", "B(x_i,2eps)", "candidate not synchronized")
        res.check(_y_member(sync["y_system"], sync["y"], sync["V"], n), "sync", "V", "y not in V")


def _replay_weak_mixing(doc: dict, res: ReplayResult) -> None:
    k = doc["k"]
    if doc["verdict"] != "HoldsAtScale":
        res.notes["verdict"] = doc["verdict"]
        return
    sys_doc, subset = doc["system"], doc["subset"]
    for i, (u, v) in enumerate(zip(doc["U"], doc["V"]), start=1):
        name = f"pair {i}"
        if subset["type"] in ("WholeSpace", "CylinderSubset"):
            start = cylinder_constraints(v) if v.get("type") == "Cylinder" else {}
            if subset["type"] == "CylinderSubset":
                extra = cylinder_constraints(subset["cylinder"])
                clash = any(start.get(q, c) != c for q, c in extra.items())
                start = {**start, **extra} if not clash else None
            target = cylinder_constraints(u, k) if u.get("type") == "Cylinder" else {}
            ok = start is not None and all(start.get(q, c) == c for q, c in target.items())
        elif subset["type"] == "Fiber":
            alpha = alpha_of(sys_doc["left"])
            base = Fraction(subset["base"])
            ok = in_arc(v["left"], base) and in_arc(u["left"], base + k * alpha) and \
                tent_power(Span.of(v["right"]), k).meets(Span.of(u["right"]))
        elif subset["type"] == "FinitePoints" and sys_doc["kind"] == "Odometer":
            ok = any(_y_member(sys_doc, p, v, 0) and _y_member(sys_doc, p, u, k) for p in subset["points"])
        else:
            raise TranscriptParseError(f"cannot replay subset {subset['type']}")
        res.check(ok, name, "f^k(V∩A)∩U", f"k={k} fails")


KINDS = {
    "md-point": _replay_md,
    "ip-ladder": _replay_ladder,
    "toeplitz-sync": _replay_toeplitz,
    "omega-escape": _replay_omega,
    "disjointness": _replay_disjointness,
    "wpr-search": _replay_wpr,
    "weak-mixing": _replay_weak_mixing,
}


def replay_document(doc: dict) -> ReplayResult:
    if not isinstance(doc, dict) or "transcript" not in doc:
        raise TranscriptParseError("not a transcript (missing 'transcript' key)")
    kind = doc["transcript"]
    if kind not in KINDS:
        raise TranscriptParseError(f"unknown transcript kind {kind!r}")
    res = ReplayResult(kind)
    try:
        KINDS[kind](doc, res)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        if isinstance(exc, TranscriptParseError):
            raise
        res.failures.append({"stage": "parse", "set": "transcript", "detail": f"{type(exc).__name__}: {exc}"})
    return res


def replay_transcript(path) -> ReplayResult:
    text = Path(path).read_text()
    if not text.strip():
        raise TranscriptParseError(f"{path} is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TranscriptParseError(f"{path}: {exc}") from exc
    # a run report bundles its transcript
    if isinstance(doc, dict) and "transcript" not in doc and isinstance(doc.get("body"), dict):
        doc = doc["body"].get("transcript", doc)
    return replay_document(doc)
