"""Delay-insensitivity rules on finite R-trace structures.

Each rule is checked by scanning every member trace for the rule's premise
pattern at its top-level series positions (``s < a < b < t`` or
``s < (a ~ b) < t``).  A conclusion ``s < (a || b) < t in tR`` holds only when
all three expansions are members.

A structure is delay-insensitive when it satisfies R0, R1, R2' and R3'''.
"""
from __future__ import annotations

import enum
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .structures import TraceStructure
from .terms import EPS, Leaf, Par, Term, event_count, par, seq, series_parts, sort_key

__all__ = [
    "DI_RULES",
    "CheckReport",
    "RuleId",
    "Status",
    "UnknownSymbol",
    "Violation",
    "check_di",
    "check_rule",
    "check_rules",
    "classify",
    "parse_rules",
]


class RuleId(enum.Enum):
    R0 = "R0"
    R1 = "R1"
    R2 = "R2"
    R2P = "R2P"
    R3P = "R3P"
    R3PP = "R3PP"
    R3PPP = "R3PPP"

    @property
    def label(self) -> str:
        return self.value.replace("P", "'")


DI_RULES = (RuleId.R0, RuleId.R1, RuleId.R2P, RuleId.R3PPP)


class Status(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive-at-bound"


class UnknownSymbol(ValueError):
    """A trace mentions a symbol that is neither an input nor an output."""


# minimal premise size of each rule, used to flag bounds too small to matter
_MIN_EVENTS = {
    RuleId.R0: 2,
    RuleId.R1: 2,
    RuleId.R2: 2,
    RuleId.R2P: 3,
    RuleId.R3P: 2,
    RuleId.R3PP: 2,
    RuleId.R3PPP: 2,
}


def parse_rules(spec: str) -> tuple[RuleId, ...]:
    """Parse ``"r0,r1,r2p"`` or ``"di"`` into rule identifiers."""
    out: list[RuleId] = []
    for word in spec.split(","):
        word = word.strip().upper().replace("'", "P")
        if not word:
            continue
        if word == "DI":
            out.extend(r for r in DI_RULES if r not in out)
        elif word in RuleId.__members__:
            if RuleId[word] not in out:
                out.append(RuleId[word])
        else:
            raise ValueError(f"unknown rule {word!r}")
    if not out:
        raise ValueError("no rules selected")
    return tuple(out)


@dataclass(frozen=True)
class Violation:
    """One failing rule instance.

    ``s`` and ``t`` are the history and continuation around the pair (terms for
    R-trace checks, symbol tuples for classical checks).  ``missing`` lists the
    conclusion traces absent from the structure; for R0 it is empty and
    ``premise_witnesses`` holds the forbidden traces themselves.
    """

    rule: RuleId
    s: object
    pair: tuple[str, str]
    t: object = EPS
    c: str | None = None
    missing: frozenset = frozenset()
    premise_witnesses: frozenset = frozenset()

    def key(self) -> tuple:
        return (
            self.rule.value,
            _trace_key(self.s),
            self.pair,
            _trace_key(self.t),
            self.c or "",
            tuple(sorted(map(_trace_key, self.missing))),
        )


def _trace_key(x) -> tuple:
    if isinstance(x, tuple):
        return (0, x)
    return (1, sort_key(x))


@dataclass
class CheckReport:
    structure_id: str
    bound: int | None
    status: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    deferred: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(st is not Status.FAIL for st in self.status.values())

    def rule_violations(self, rule: RuleId) -> list[Violation]:
        return [v for v in self.violations if v.rule is rule]

    def merge(self, other: "CheckReport") -> "CheckReport":
        return CheckReport(
            self.structure_id,
            self.bound,
            {**self.status, **other.status},
            sorted(self.violations + other.violations, key=Violation.key),
            sorted(self.deferred + other.deferred, key=Violation.key),
        )


# -- premise scanning ----------------------------------------------------------


def _kind(structure, symbol: str) -> str:
    if symbol in structure.inputs:
        return "in"
    if symbol in structure.outputs:
        return "out"
    raise UnknownSymbol(f"symbol {symbol!r} is neither an input nor an output")


def _leaf_pair(node: Term) -> tuple[str, str] | None:
    if (
        isinstance(node, Par)
        and len(node.children) == 2
        and all(isinstance(c, Leaf) for c in node.children)
    ):
        return node.children[0].symbol, node.children[1].symbol
    return None


def _sites(parts: tuple):
    """Yield ``(i, a, b, j, contemporary)`` for each adjacent event pair.

    The pair sits at series position i; the continuation starts at j.  A
    contemporary pair is yielded in both orientations.
    """
    n = len(parts)
    for i in range(n):
        if i + 1 < n and isinstance(parts[i], Leaf) and isinstance(parts[i + 1], Leaf):
            yield i, parts[i].symbol, parts[i + 1].symbol, i + 2, False
        pair = _leaf_pair(parts[i])
        if pair is not None:
            x, y = pair
            yield i, x, y, i + 1, True
            if x != y:
                yield i, y, x, i + 1, True


def _both_orders(s: Term, a: str, b: str, t: Term = EPS, c: str | None = None) -> tuple:
    tail = (t,) if c is None else (t, c)
    return (seq(s, a, b, *tail), seq(s, b, a, *tail), seq(s, par(a, b), *tail))


class _Scan:
    def __init__(self, structure: TraceStructure, rule: RuleId) -> None:
        self.S = structure
        self.T = structure.traces
        self.rule = rule
        self.found: dict = {}
        self.deferred: dict = {}

    def conclude(self, s, pair, t, c, required: Iterable[Term], premise: Term) -> None:
        missing = frozenset(x for x in required if x not in self.T)
        if not missing:
            return
        key = (s, frozenset(pair), t, c)
        horizon = self.S.horizon
        over = horizon is not None and any(event_count(x) > horizon for x in missing)
        target = self.deferred if over else self.found
        if key in target:
            old = target[key]
            target[key] = Violation(
                old.rule, old.s, old.pair, old.t, old.c,
                old.missing, old.premise_witnesses | {premise},
            )
        else:
            target[key] = Violation(
                self.rule, s, pair, t, c, missing, frozenset({premise})
            )

    def is_history(self, s: Term) -> bool:
        return s in self.T


def _scan_r0(scan: _Scan) -> None:
    for m in scan.T:
        parts = series_parts(m)
        for sym in (p.symbol for p in parts if isinstance(p, Leaf)):
            _kind(scan.S, sym)
        s = None
        if len(parts) >= 2 and isinstance(parts[-1], Leaf) and parts[-1] == parts[-2]:
            s, a = seq(*parts[:-2]), parts[-1].symbol
        elif parts and _leaf_pair(parts[-1]) is not None:
            x, y = _leaf_pair(parts[-1])
            if x == y:
                s, a = seq(*parts[:-1]), x
        if s is not None and scan.is_history(s):
            key = (s, frozenset({a}), EPS, None)
            old = scan.found.get(key)
            witnesses = frozenset({m}) | (old.premise_witnesses if old else frozenset())
            scan.found[key] = Violation(
                RuleId.R0, s, (a, a), EPS, None, frozenset(), witnesses
            )


def _scan_pairs(scan: _Scan, same_type: bool, guarded: bool) -> None:
    """R1 (same-type pairs) and R2 (mixed pairs, guarded by the outer premise)."""
    S, T = scan.S, scan.T
    for m in T:
        parts = series_parts(m)
        for i, a, b, j, _ in _sites(parts):
            if a == b or (_kind(S, a) == _kind(S, b)) != same_type:
                continue
            s, t = seq(*parts[:i]), seq(*parts[j:])
            if not scan.is_history(s):
                continue
            if guarded:
                ab, ba, both = _both_orders(s, a, b)
                if not ((ab in T and ba in T) or both in T):
                    continue
            scan.conclude(s, (a, b), t, None, _both_orders(s, a, b, t), m)


def _scan_r2p(scan: _Scan) -> None:
    S, T = scan.S, scan.T
    for m in T:
        parts = series_parts(m)
        if len(parts) < 2 or not isinstance(parts[-1], Leaf):
            continue
        c = parts[-1].symbol
        body = parts[:-1]
        for i, a, b, j, contemporary in _sites(body):
            if _kind(S, a) != _kind(S, c) or _kind(S, b) == _kind(S, c):
                continue
            s, t = seq(*body[:i]), seq(*body[j:])
            if not scan.is_history(s):
                continue
            if not contemporary and seq(s, b, a, t) not in T:
                continue
            scan.conclude(s, (a, b), t, c, _both_orders(s, a, b, t, c), m)


def _r3_applies(rule: RuleId, ka: str, kb: str) -> bool:
    if rule is RuleId.R3P:
        return True
    if rule is RuleId.R3PP:
        return not (ka == "in" and kb == "in")
    return ka != kb


def _scan_r3(scan: _Scan) -> None:
    S, T = scan.S, scan.T
    successors: dict = defaultdict(set)
    premises: dict = defaultdict(set)
    for m in T:
        parts = series_parts(m)
        if not parts:
            continue
        s = seq(*parts[:-1])
        if isinstance(parts[-1], Leaf):
            successors[s].add(parts[-1].symbol)
            premises[s].add(m)
        pair = _leaf_pair(parts[-1])
        if pair is not None and pair[0] != pair[1] and scan.is_history(s):
            a, b = pair
            if _r3_applies(scan.rule, _kind(S, a), _kind(S, b)):
                scan.conclude(s, (a, b), EPS, None, _both_orders(s, a, b), m)
    for s, nxt in successors.items():
        if not scan.is_history(s):
            continue
        for a, b in itertools.combinations(sorted(nxt), 2):
            if not _r3_applies(scan.rule, _kind(S, a), _kind(S, b)):
                continue
            witness = {seq(s, a), seq(s, b)}
            for w in witness:
                scan.conclude(s, (a, b), EPS, None, _both_orders(s, a, b), w)


def check_rule(
    structure: TraceStructure, rule: RuleId, structure_id: str = "S"
) -> CheckReport:
    """Scan every premise instance of ``rule`` over the structure."""
    rule = RuleId(rule)
    scan = _Scan(structure, rule)
    if rule is RuleId.R0:
        _scan_r0(scan)
    elif rule is RuleId.R1:
        _scan_pairs(scan, same_type=True, guarded=False)
    elif rule is RuleId.R2:
        _scan_pairs(scan, same_type=False, guarded=True)
    elif rule is RuleId.R2P:
        _scan_r2p(scan)
    else:
        _scan_r3(scan)
    violations = sorted(scan.found.values(), key=Violation.key)
    deferred = sorted(scan.deferred.values(), key=Violation.key)
    if violations:
        status = Status.FAIL
    elif deferred:
        status = Status.INCONCLUSIVE
    elif structure.horizon is not None and structure.horizon < _MIN_EVENTS[rule]:
        status = Status.INCONCLUSIVE
    else:
        status = Status.PASS
    return CheckReport(structure_id, structure.horizon, {rule: status}, violations, deferred)


def check_rules(
    structure: TraceStructure, rules: Iterable[RuleId], structure_id: str = "S"
) -> CheckReport:
    report = CheckReport(structure_id, structure.horizon)
    for rule in rules:
        report = report.merge(check_rule(structure, rule, structure_id))
    return report


def check_di(structure: TraceStructure, structure_id: str = "S") -> CheckReport:
    """R0, R1, R2' and R3''' together."""
    return check_rules(structure, DI_RULES, structure_id)


def classify(structure: TraceStructure) -> str:
    """Strongest R3 class satisfied, or ``"none"``.

    Returns ``"R3P-class"``, ``"R3PP-class"`` or ``"R3PPP-class"`` when R0, R1
    and R2' hold as well; inconclusive results count as satisfied.
    """
    base = check_rules(structure, (RuleId.R0, RuleId.R1, RuleId.R2P))
    if not base.passed:
        return "none"
    for rule in (RuleId.R3P, RuleId.R3PP, RuleId.R3PPP):
        if check_rule(structure, rule).passed:
            return f"{rule.value}-class"
    return "none"
