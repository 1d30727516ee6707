"""Common transfer times for n pairs of open sets, restricted to a subset ``A``."""

from __future__ import annotations

from ..errors import PreconditionError
from ..recurrence import RecurrenceReport, Verdict
from ..systems import meets, restricted_transfer
from .common import Transcript, subset_doc, system_doc


def _least_common(system, subset, pairs, horizon):
    """Least k in every ``N(V∩A, U)``; also whether excluded times could have supplied one."""
    sure, maybe = None, None
    for v, u in pairs:
        times, excluded = restricted_transfer(system, subset, v, u, horizon)
        t, e = set(times), set(excluded)
        sure = t if sure is None else sure & t
        maybe = (t | e) if maybe is None else maybe & (t | e)
    return (min(sure) if sure else None), bool(maybe - sure)


def verify_weak_mixing_order_n(system, subset, us, vs, horizon: int, induction: bool = False) -> RecurrenceReport:
    """Least ``k <= horizon`` with ``f^k(V_i ∩ A)`` meeting ``U_i`` for every i.

    With ``induction`` the report also carries the chain ``k_1..k_n``:
    ``k_j`` is common to the first ``j`` pairs and to ``V_l -> V_l`` for ``l > j``.
    """
    us, vs = list(us), list(vs)
    if len(us) != len(vs) or not us:
        raise ValueError("need the same positive number of U and V sets")
    for name, group in (("U", us), ("V", vs)):
        for i, s in enumerate(group, start=1):
            if not meets(system, subset, s):
                raise PreconditionError(f"{name}_{i} does not meet the subset")
    n = len(us)
    k, ambiguous = _least_common(system, subset, list(zip(vs, us)), horizon)
    evidence = {"n": n, "subset": subset.to_json()}
    if k is not None:
        evidence["k"] = k
        verdict = Verdict.HOLDS
    elif ambiguous:
        evidence["budget"] = {"horizon": horizon, "reason": "only boundary-ambiguous common times"}
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.FAILS
    if induction:
        chain = []
        for j in range(1, n + 1):
            pairs = list(zip(vs[:j], us[:j])) + [(v, v) for v in vs[j:]]
            kj, _ = _least_common(system, subset, pairs, horizon)
            chain.append({"j": j, "k": kj})
        evidence["induction"] = chain
    return RecurrenceReport("WeakMixingOrderN", verdict, horizon, evidence)


def weak_mixing_transcript(system, subset, us, vs, report: RecurrenceReport) -> Transcript:
    return Transcript("weak-mixing", {
        "system": system_doc(system),
        "subset": subset_doc(system, subset),
        "U": [system.basic(u).to_json() for u in us],
        "V": [system.basic(v).to_json() for v in vs],
        "verdict": report.verdict.value,
        "k": report.evidence.get("k"),
        "horizon": report.horizon,
    })
