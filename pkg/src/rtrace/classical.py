"""Reduction of R-traces to classical (totally ordered) traces.

An R-trace maps onto the set of its linear extensions: ``a < b`` becomes the
string ``ab`` and ``a ~ b`` becomes both ``ab`` and ``ba``.  The classical
versions of the rules are checked on plain symbol strings, and
:func:`cross_validate` compares both checkers on the same structure.
"""
from __future__ import annotations

import functools
import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from .rules import CheckReport, RuleId, Status, UnknownSymbol, Violation, _MIN_EVENTS, check_rule
from .structures import AlphabetClash, TraceStructure
from .terms import Epsilon, Leaf, Seq, Term, has_shorthand, normalize

__all__ = [
    "ClassicalStructure",
    "CrossValidation",
    "check_classical_rule",
    "cross_validate",
    "linearize",
    "project_classical",
    "to_classical",
]


def _shuffles(u: tuple, v: tuple) -> set:
    if not u:
        return {v}
    if not v:
        return {u}
    return {(u[0],) + w for w in _shuffles(u[1:], v)} | {
        (v[0],) + w for w in _shuffles(u, v[1:])
    }


@functools.lru_cache(maxsize=1 << 14)
def linearize(t: Term) -> frozenset:
    """All linear extensions of ``t`` as tuples of symbols."""
    t = normalize(t)
    if has_shorthand(t):
        raise ValueError("expand '||' shorthand before linearizing")
    if isinstance(t, Epsilon):
        return frozenset({()})
    if isinstance(t, Leaf):
        return frozenset({(t.symbol,)})
    out = {()}
    for child in t.children:
        lins = linearize(child)
        if isinstance(t, Seq):
            out = {u + v for u in out for v in lins}
        else:
            out = {w for u in out for v in lins for w in _shuffles(u, v)}
    return frozenset(out)


@dataclass(frozen=True)
class ClassicalStructure:
    inputs: frozenset
    outputs: frozenset
    traces: frozenset
    horizon: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        object.__setattr__(self, "traces", frozenset(map(tuple, self.traces)))
        if self.inputs & self.outputs:
            raise AlphabetClash(
                f"symbols both input and output: {sorted(self.inputs & self.outputs)}"
            )


def to_classical(structure: TraceStructure) -> ClassicalStructure:
    traces = set()
    for t in structure.traces:
        traces |= linearize(t)
    return ClassicalStructure(
        structure.inputs, structure.outputs, traces, horizon=structure.horizon
    )


def project_classical(c: ClassicalStructure, keep) -> ClassicalStructure:
    keep = frozenset(keep)
    return ClassicalStructure(
        c.inputs & keep,
        c.outputs & keep,
        {tuple(x for x in w if x in keep) for w in c.traces},
        horizon=c.horizon,
    )


# -- classical rules -----------------------------------------------------------


class _ClassicalScan:
    def __init__(self, c: ClassicalStructure, rule: RuleId) -> None:
        self.C = c
        self.T = c.traces
        self.rule = rule
        self.found: dict = {}
        self.deferred: dict = {}

    def kind(self, sym: str) -> str:
        if sym in self.C.inputs:
            return "in"
        if sym in self.C.outputs:
            return "out"
        raise UnknownSymbol(f"symbol {sym!r} is neither an input nor an output")

    def conclude(self, s, pair, t, c, required, premise) -> None:
        missing = frozenset(w for w in required if w not in self.T)
        if not missing:
            return
        horizon = self.C.horizon
        over = horizon is not None and any(len(w) > horizon for w in missing)
        target = self.deferred if over else self.found
        key = (s, pair, t, c)
        old = target.get(key)
        witnesses = frozenset({premise}) | (old.premise_witnesses if old else frozenset())
        target[key] = Violation(self.rule, s, pair, t, c, missing, witnesses)


def _classical_r3_applies(rule: RuleId, ka: str, kb: str) -> bool:
    if rule is RuleId.R3P:
        return True
    if rule is RuleId.R3PP:
        return not (ka == "in" and kb == "in")
    return ka != kb


def check_classical_rule(
    c: ClassicalStructure, rule: RuleId, structure_id: str = "C"
) -> CheckReport:
    """Scan the classical form of ``rule``; histories ``s`` must be members."""
    rule = RuleId(rule)
    scan = _ClassicalScan(c, rule)
    T = c.traces
    for w in T:
        for sym in w:
            scan.kind(sym)
    if rule is RuleId.R0:
        for w in T:
            if len(w) >= 2 and w[-1] == w[-2] and w[:-2] in T:
                scan.found[(w[:-2], w[-1])] = Violation(
                    rule, w[:-2], (w[-1], w[-1]), (), None, frozenset(), frozenset({w})
                )
    elif rule in (RuleId.R1, RuleId.R2):
        for w in T:
            for i in range(len(w) - 1):
                a, b = w[i], w[i + 1]
                s, t = w[:i], w[i + 2 :]
                if a == b or s not in T:
                    continue
                same = scan.kind(a) == scan.kind(b)
                if rule is RuleId.R1 and same:
                    scan.conclude(s, (a, b), t, None, [s + (b, a) + t], w)
                if rule is RuleId.R2 and not same:
                    if s + (a, b) in T and s + (b, a) in T:
                        scan.conclude(s, (a, b), t, None, [s + (b, a) + t], w)
    elif rule is RuleId.R2P:
        for w in T:
            if len(w) < 3:
                continue
            c_sym = w[-1]
            for i in range(len(w) - 2):
                a, b = w[i], w[i + 1]
                if scan.kind(a) != scan.kind(c_sym) or scan.kind(b) == scan.kind(c_sym):
                    continue
                s, t = w[:i], w[i + 2 : -1]
                if s in T and s + (b, a) + t in T:
                    scan.conclude(s, (a, b), t, c_sym, [s + (b, a) + t + (c_sym,)], w)
    else:
        successors = defaultdict(set)
        for w in T:
            if w and w[:-1] in T:
                successors[w[:-1]].add(w[-1])
        for s, nxt in successors.items():
            for a, b in itertools.combinations(sorted(nxt), 2):
                if a == b or not _classical_r3_applies(rule, scan.kind(a), scan.kind(b)):
                    continue
                for w in (s + (a,), s + (b,)):
                    scan.conclude(s, (a, b), (), None, [s + (a, b), s + (b, a)], w)
    violations = sorted(scan.found.values(), key=Violation.key)
    deferred = sorted(scan.deferred.values(), key=Violation.key)
    if violations:
        status = Status.FAIL
    elif deferred or (c.horizon is not None and c.horizon < _MIN_EVENTS[rule]):
        status = Status.INCONCLUSIVE
    else:
        status = Status.PASS
    return CheckReport(structure_id, c.horizon, {rule: status}, violations, deferred)


@dataclass
class CrossValidation:
    rule: RuleId
    relativistic: CheckReport
    classical: CheckReport

    @property
    def consistent(self) -> bool:
        """False only for a relativistic pass with a classical failure."""
        rel = self.relativistic.status[self.rule]
        cls = self.classical.status[self.rule]
        return not (rel is Status.PASS and cls is Status.FAIL)

    @property
    def reverse_gap(self) -> bool:
        """Classical pass with relativistic failure (expected, not an error)."""
        rel = self.relativistic.status[self.rule]
        cls = self.classical.status[self.rule]
        return rel is Status.FAIL and cls is Status.PASS


def cross_validate(structure: TraceStructure, rule: RuleId) -> CrossValidation:
    """Run ``rule`` on the structure and on its classical image."""
    rule = RuleId(rule)
    return CrossValidation(
        rule,
        check_rule(structure, rule, "relativistic"),
        check_classical_rule(to_classical(structure), rule, "classical"),
    )
