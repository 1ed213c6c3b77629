"""Canonical JSON for instances.

Rationals are written as ``"p/q"`` strings and q_n as decimal strings; keys
are sorted and indentation fixed, so ``dumps(loads(text)) == text``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cantor import build_cantor
from .counterexample import Instance, assemble
from .errors import InstanceFileError, Mazur66Error
from .kernels import (
    DELTA_RULES,
    EPS_RULES,
    KernelSchedule,
    ScheduleEntry,
    condition_q,
    get_profile,
    validate_tables,
)

SCHEMA_VERSION = 1


def rat(r) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def _const(v) -> str:
    return rat(v) if isinstance(v, (Fraction, int)) else repr(float(v))


def canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def instance_to_doc(inst: Instance) -> dict:
    c, s, p = inst.cantor, inst.schedule, inst.profile
    return {
        "schema_version": SCHEMA_VERSION,
        "cantor": {
            "depth": c.depth,
            "ratio": rat(c.ratio),
            "removed_measure": rat(c.removed_measure),
            "intervals": [{"n": iv.n, "a": rat(iv.a), "b": rat(iv.b), "g": iv.g} for iv in c.intervals],
        },
        "profile": {"id": p.id, "constants": {k: _const(v) for k, v in p.constants().items()}},
        "schedule": [{"n": e.n, "eps": rat(e.eps), "delta": rat(e.delta), "q": str(e.q)} for e in s.entries],
        "provenance": {
            "build": {
                "depth": c.depth,
                "ratio": rat(c.ratio),
                "eps_rule": s.eps_rule,
                "delta_rule": s.delta_rule,
                "profile": p.id,
            },
            "tool": "mazur66",
            "version": __version__,
        },
    }


def dumps(inst: Instance) -> str:
    return canonical(instance_to_doc(inst))


def _fr(v, what) -> Fraction:
    if not isinstance(v, str) or "/" not in v:
        raise InstanceFileError(f"{what}: expected a 'p/q' string, got {v!r}")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFileError(f"{what}: bad rational {v!r}") from exc


def doc_to_instance(doc: dict) -> Instance:
    try:
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise InstanceFileError(f"unsupported schema_version {doc.get('schema_version')!r}")
        cd = doc["cantor"]
        c = build_cantor(int(cd["depth"]), _fr(cd["ratio"], "ratio"))
        got = [(d["n"], _fr(d["a"], "a"), _fr(d["b"], "b"), d["g"]) for d in cd["intervals"]]
        want = [(iv.n, iv.a, iv.b, iv.g) for iv in c.intervals]
        if got != want:
            raise InstanceFileError("intervals do not match the construction rule for this depth and ratio")
        if _fr(cd["removed_measure"], "removed_measure") != c.removed_measure:
            raise InstanceFileError("removed_measure does not match the intervals")
        p = get_profile(doc["profile"]["id"])
        build = doc["provenance"]["build"]
        entries = []
        for d in doc["schedule"]:
            q = d["q"]
            if not isinstance(q, str) or not q.isdigit():
                raise InstanceFileError(f"q must be a decimal string, got {q!r}")
            entries.append(ScheduleEntry(int(d["n"]), _fr(d["eps"], "eps"), _fr(d["delta"], "delta"), int(q)))
        s = KernelSchedule(tuple(entries), build["eps_rule"], build["delta_rule"])
    except (KeyError, TypeError) as exc:
        raise InstanceFileError(f"malformed instance document: {exc!r}") from exc

    if len(entries) == len(c):
        eps = [e.eps for e in entries]
        delta = [e.delta for e in entries]
        validate_tables(c, eps, delta)
        if s.eps_rule in EPS_RULES and eps != [EPS_RULES[s.eps_rule](iv) for iv in c.intervals]:
            raise InstanceFileError(f"eps values disagree with rule {s.eps_rule!r}")
        if s.delta_rule in DELTA_RULES and delta != [DELTA_RULES[s.delta_rule](iv) for iv in c.intervals]:
            raise InstanceFileError(f"delta values disagree with rule {s.delta_rule!r}")
        if not condition_q(s)["all"]:
            raise InstanceFileError("some q_n is too small for its delta_n")
    return assemble(c, p, s)


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFileError(f"not JSON: {exc}") from exc
    return doc_to_instance(doc)


def save(inst: Instance, path) -> Path:
    path = Path(path)
    path.write_text(dumps(inst))
    return path


def load(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceFileError(f"cannot read {path}: {exc}") from exc
    try:
        return loads(text)
    except InstanceFileError:
        raise
    except Mazur66Error as exc:
        raise InstanceFileError(f"{path}: {exc}") from exc
