"""Trace structures ``<inputs, outputs, traces>`` and the command algebra.

Structures hold a finite set of normalized R-traces.  Commands are expression
trees over structures (atomic ``a?``/``c!``, literal trace sets, ``;``, ``|``,
``||``, ``*[...]`` and ``pref``); they may denote infinite structures and are
only ever turned into finite ones by :func:`enumerate_command`, which keeps the
traces with at most ``max_events`` events.
"""
from __future__ import annotations

import functools
import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .terms import (
    EPS,
    Leaf,
    Term,
    event_count,
    has_shorthand,
    normalize,
    par,
    par_parts,
    prefixes,
    project,
    seq,
    series_parts,
    symbol_counts,
    symbols,
)

__all__ = [
    "AlphabetClash",
    "Atomic",
    "BoundExceeded",
    "Command",
    "Concat",
    "Pref",
    "Star",
    "TraceSet",
    "TraceStructure",
    "Union",
    "Weave",
    "command_alphabet",
    "concat",
    "enumerate_command",
    "max_events",
    "prefix_close",
    "project_structure",
    "star",
    "union",
    "weave",
    "weave_traces",
]


class AlphabetClash(ValueError):
    """A symbol would be both an input and an output."""


class BoundExceeded(UserWarning):
    """A literal trace is longer than the enumeration bound and was dropped."""


def _check_bound(max_events: int) -> int:
    if not isinstance(max_events, int) or max_events < 1:
        raise ValueError(f"max_events must be a positive integer, got {max_events!r}")
    return max_events


@dataclass(frozen=True)
class TraceStructure:
    """A finite R-trace structure.

    ``horizon`` is set when the structure is a truncation of an infinite (or
    longer) denotation to traces of at most that many events; rule checks use
    it to tell genuine violations from truncation artefacts.
    """

    inputs: frozenset
    outputs: frozenset
    traces: frozenset
    horizon: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        inputs, outputs = frozenset(self.inputs), frozenset(self.outputs)
        clash = inputs & outputs
        if clash:
            raise AlphabetClash(f"symbols both input and output: {sorted(clash)}")
        traces = set()
        for t in self.traces:
            t = normalize(t)
            if has_shorthand(t):
                raise ValueError("structure traces may not contain '||' shorthand")
            stray = symbols(t) - inputs - outputs
            if stray:
                raise ValueError(f"trace uses undeclared symbols {sorted(stray)}")
            traces.add(t)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "traces", frozenset(traces))

    @property
    def alphabet(self) -> frozenset:
        return self.inputs | self.outputs

    def is_prefix_closed(self) -> bool:
        return prefix_close(self).traces == self.traces

    def __len__(self) -> int:
        return len(self.traces)

    def __contains__(self, t: Term) -> bool:
        return normalize(t) in self.traces


def _merged_alphabets(*structures) -> tuple[frozenset, frozenset]:
    inputs = frozenset().union(*(s.inputs for s in structures))
    outputs = frozenset().union(*(s.outputs for s in structures))
    if inputs & outputs:
        raise AlphabetClash(
            f"symbols used as input and as output: {sorted(inputs & outputs)}"
        )
    return inputs, outputs


def concat(r: TraceStructure, s: TraceStructure) -> TraceStructure:
    inputs, outputs = _merged_alphabets(r, s)
    return TraceStructure(
        inputs, outputs, {seq(u, v) for u in r.traces for v in s.traces}
    )


def union(r: TraceStructure, s: TraceStructure) -> TraceStructure:
    inputs, outputs = _merged_alphabets(r, s)
    return TraceStructure(inputs, outputs, r.traces | s.traces)


def _bounded_star(traces: Iterable[Term], max_events: int) -> set:
    steps = [t for t in traces if 0 < event_count(t) <= max_events]
    seen = {EPS}
    frontier = [EPS]
    while frontier:
        nxt = []
        for s in frontier:
            budget = max_events - event_count(s)
            for t in steps:
                if event_count(t) <= budget:
                    u = seq(s, t)
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
        frontier = nxt
    return seen


def star(r: TraceStructure, max_events: int) -> TraceStructure:
    """``*[R]`` truncated to traces of at most ``max_events`` events."""
    _check_bound(max_events)
    return TraceStructure(
        r.inputs, r.outputs, _bounded_star(r.traces, max_events), horizon=max_events
    )


def prefix_close(r: TraceStructure) -> TraceStructure:
    traces = set()
    for t in r.traces:
        traces |= prefixes(t)
    return TraceStructure(r.inputs, r.outputs, traces, horizon=r.horizon)


def project_structure(r: TraceStructure, keep: Iterable[str]) -> TraceStructure:
    keep = frozenset(keep)
    return TraceStructure(
        r.inputs & keep,
        r.outputs & keep,
        {project(t, keep) for t in r.traces},
        horizon=r.horizon,
    )


# -- weave ---------------------------------------------------------------------
#
# The weave keeps every trace over the merged alphabet whose projections land
# in both operands.  Rather than generating all series-parallel terms and
# filtering, _woven(r, s, A, B) builds exactly the terms t with t|A == r and
# t|B == s by peeling off the first series component (whose projections must be
# series prefixes of r and s) or by splitting the parallel components of r and s
# among the branches of a top-level Par.


def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _consistent(r: Term, s: Term, a: frozenset, b: frozenset) -> bool:
    rc, sc = symbol_counts(r), symbol_counts(s)
    return all(rc[x] == sc[x] for x in a & b)


@functools.lru_cache(maxsize=None)
def _woven(r: Term, s: Term, a: frozenset, b: frozenset) -> frozenset:
    if not _consistent(r, s, a, b):
        return frozenset()
    if r == EPS and s == EPS:
        return frozenset({EPS})
    return _woven_nonpar(r, s, a, b) | _woven_par(r, s, a, b)


@functools.lru_cache(maxsize=None)
def _woven_nonpar(r: Term, s: Term, a: frozenset, b: frozenset) -> frozenset:
    """Woven terms that are a Leaf or a Seq."""
    if not _consistent(r, s, a, b):
        return frozenset()
    out = set()
    for x in (r, s):
        if isinstance(x, Leaf):
            in_a, in_b = x.symbol in a, x.symbol in b
            if r == (x if in_a else EPS) and s == (x if in_b else EPS):
                out.add(x)
    rp, sp = series_parts(r), series_parts(s)
    for i in range(len(rp) + 1):
        for j in range(len(sp) + 1):
            head_r, head_s = seq(*rp[:i]), seq(*sp[:j])
            tail_r, tail_s = seq(*rp[i:]), seq(*sp[j:])
            if (head_r == EPS and head_s == EPS) or (tail_r == EPS and tail_s == EPS):
                continue
            heads = _woven_head(head_r, head_s, a, b)
            if not heads:
                continue
            tails = _woven(tail_r, tail_s, a, b)
            for h in heads:
                for t in tails:
                    if t != EPS:
                        out.add(seq(h, t))
    return frozenset(out)


@functools.lru_cache(maxsize=None)
def _woven_head(r: Term, s: Term, a: frozenset, b: frozenset) -> frozenset:
    """Woven terms that are a Leaf or a Par (valid first series components)."""
    out = set()
    for t in _woven_nonpar(r, s, a, b):
        if isinstance(t, Leaf):
            out.add(t)
    out |= _woven_par(r, s, a, b)
    return frozenset(out)


@functools.lru_cache(maxsize=None)
def _woven_par(r: Term, s: Term, a: frozenset, b: frozenset) -> frozenset:
    if not _consistent(r, s, a, b):
        return frozenset()
    items = [("r", x) for x in par_parts(r)] + [("s", x) for x in par_parts(s)]
    if len(items) < 2:
        return frozenset()
    out = set()
    for blocks in _set_partitions(items):
        if len(blocks) < 2:
            continue
        options = []
        for block in blocks:
            br = par(*(x for side, x in block if side == "r"))
            bs = par(*(x for side, x in block if side == "s"))
            opts = _woven_nonpar(br, bs, a, b)
            if not opts:
                break
            options.append(opts)
        else:
            for combo in itertools.product(*options):
                out.add(par(*combo))
    return frozenset(out)


def weave_traces(r: Term, s: Term, a: Iterable[str], b: Iterable[str]) -> frozenset:
    """All normalized t over ``a | b`` with ``t|a == r`` and ``t|b == s``."""
    a, b = frozenset(a), frozenset(b)
    if project(r, a) != normalize(r) or project(s, b) != normalize(s):
        return frozenset()
    return _woven(normalize(r), normalize(s), a, b)


def weave(r: TraceStructure, s: TraceStructure, max_events: int | None = None) -> TraceStructure:
    """``R || S``: traces over both alphabets projecting into ``tR`` and ``tS``.

    ``max_events`` optionally drops results longer than the bound.
    """
    inputs, outputs = _merged_alphabets(r, s)
    a, b = r.alphabet, s.alphabet
    traces = set()
    for u in r.traces:
        for v in s.traces:
            for t in weave_traces(u, v, a, b):
                if max_events is None or event_count(t) <= max_events:
                    traces.add(t)
    horizon = max_events if max_events is not None else None
    if r.horizon is not None or s.horizon is not None:
        horizon = min(h for h in (horizon, r.horizon, s.horizon) if h is not None)
    return TraceStructure(inputs, outputs, traces, horizon=horizon)


# -- commands ------------------------------------------------------------------


@dataclass(frozen=True)
class Atomic:
    symbol: str
    direction: str  # "?" input, "!" output

    def __post_init__(self) -> None:
        if self.direction not in ("?", "!"):
            raise ValueError(f"direction must be '?' or '!', got {self.direction!r}")
        Leaf(self.symbol)


@dataclass(frozen=True)
class TraceSet:
    """A literal finite structure; traces may use the ``||`` shorthand."""

    traces: frozenset
    inputs: frozenset
    outputs: frozenset

    def __post_init__(self) -> None:
        object.__setattr__(self, "traces", frozenset(map(normalize, self.traces)))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))


@dataclass(frozen=True)
class Concat:
    left: "Command"
    right: "Command"


@dataclass(frozen=True)
class Union:
    left: "Command"
    right: "Command"


@dataclass(frozen=True)
class Weave:
    left: "Command"
    right: "Command"


@dataclass(frozen=True)
class Star:
    inner: "Command"


@dataclass(frozen=True)
class Pref:
    inner: "Command"


Command = Atomic | TraceSet | Concat | Union | Weave | Star | Pref


@functools.lru_cache(maxsize=None)
def command_alphabet(cmd: Command) -> tuple[frozenset, frozenset]:
    """``(inputs, outputs)`` of the structure denoted by ``cmd``."""
    if isinstance(cmd, Atomic):
        one = frozenset({cmd.symbol})
        return (one, frozenset()) if cmd.direction == "?" else (frozenset(), one)
    if isinstance(cmd, TraceSet):
        return cmd.inputs, cmd.outputs
    if isinstance(cmd, (Star, Pref)):
        return command_alphabet(cmd.inner)
    li, lo = command_alphabet(cmd.left)
    ri, ro = command_alphabet(cmd.right)
    inputs, outputs = li | ri, lo | ro
    if inputs & outputs:
        raise AlphabetClash(
            f"symbols used as input and as output: {sorted(inputs & outputs)}"
        )
    return inputs, outputs


def _literal_traces(cmd: Command) -> frozenset:
    if isinstance(cmd, Atomic):
        return frozenset({Leaf(cmd.symbol)})
    out = set()
    for t in cmd.traces:
        out |= _expand(t)
    return frozenset(out)


def _expand(t: Term) -> frozenset:
    from .terms import expand_shorthand

    return expand_shorthand(t) if has_shorthand(t) else frozenset({t})


@functools.lru_cache(maxsize=None)
def max_events(cmd: Command) -> int | None:
    """Largest event count of any denoted trace, or None when unbounded."""
    if isinstance(cmd, (Atomic, TraceSet)):
        return max((event_count(t) for t in _literal_traces(cmd)), default=0)
    if isinstance(cmd, Pref):
        return max_events(cmd.inner)
    if isinstance(cmd, Star):
        inner = max_events(cmd.inner)
        return 0 if inner == 0 else None
    left, right = max_events(cmd.left), max_events(cmd.right)
    if left is None or right is None:
        return None
    if isinstance(cmd, Union):
        return max(left, right)
    return left + right


class _Enumerator:
    def __init__(self, max_events: int) -> None:
        self.k = max_events
        self._traces: dict = {}
        self._prefixes: dict = {}

    def traces(self, cmd: Command, k: int) -> frozenset:
        key = (cmd, k)
        if key not in self._traces:
            self._traces[key] = frozenset(self._traces_uncached(cmd, k))
        return self._traces[key]

    def _traces_uncached(self, cmd: Command, k: int) -> set:
        if isinstance(cmd, (Atomic, TraceSet)):
            lits = _literal_traces(cmd)
            kept = {t for t in lits if event_count(t) <= k}
            if len(kept) < len(lits) and k == self.k:
                warnings.warn(
                    f"literal traces longer than {k} events were dropped",
                    BoundExceeded,
                    stacklevel=4,
                )
            return kept
        if isinstance(cmd, Union):
            return set(self.traces(cmd.left, k) | self.traces(cmd.right, k))
        if isinstance(cmd, Concat):
            out = set()
            for u in self.traces(cmd.left, k):
                for v in self.traces(cmd.right, k - event_count(u)):
                    out.add(seq(u, v))
            return out
        if isinstance(cmd, Star):
            return _bounded_star(self.traces(cmd.inner, k), k)
        if isinstance(cmd, Pref):
            return set(self.prefixes(cmd.inner, k))
        if isinstance(cmd, Weave):
            left = self.traces(cmd.left, k)
            right = self.traces(cmd.right, k)
            a = frozenset().union(*command_alphabet(cmd.left))
            b = frozenset().union(*command_alphabet(cmd.right))
            out = set()
            for u in left:
                for v in right:
                    out |= {t for t in weave_traces(u, v, a, b) if event_count(t) <= k}
            return out
        raise TypeError(f"not a command: {cmd!r}")

    def inhabited(self, cmd: Command) -> bool:
        if isinstance(cmd, (Atomic, Star)):
            return True
        if isinstance(cmd, TraceSet):
            return bool(cmd.traces)
        if isinstance(cmd, Pref):
            return self.inhabited(cmd.inner)
        if isinstance(cmd, Union):
            return self.inhabited(cmd.left) or self.inhabited(cmd.right)
        if isinstance(cmd, Concat):
            return self.inhabited(cmd.left) and self.inhabited(cmd.right)
        bound = max_events(cmd)
        return bool(self.traces(cmd, bound if bound is not None else 2 * self.k))

    def prefixes(self, cmd: Command, k: int) -> frozenset:
        """Series prefixes, of at most k events, of every trace denoted by cmd."""
        key = (cmd, k)
        if key not in self._prefixes:
            self._prefixes[key] = frozenset(self._prefixes_uncached(cmd, k))
        return self._prefixes[key]

    def _prefixes_uncached(self, cmd: Command, k: int) -> set:
        out = set()
        if isinstance(cmd, (Atomic, TraceSet)):
            for t in _literal_traces(cmd):
                out |= {p for p in prefixes(t) if event_count(p) <= k}
        elif isinstance(cmd, Pref):
            out |= self.prefixes(cmd.inner, k)
        elif isinstance(cmd, Union):
            out |= self.prefixes(cmd.left, k) | self.prefixes(cmd.right, k)
        elif isinstance(cmd, Concat):
            if self.inhabited(cmd.left) and self.inhabited(cmd.right):
                out |= self.prefixes(cmd.left, k)
                for u in self.traces(cmd.left, k):
                    for p in self.prefixes(cmd.right, k - event_count(u)):
                        out.add(seq(u, p))
        elif isinstance(cmd, Star):
            for u in self.traces(cmd, k):
                for p in self.prefixes(cmd.inner, k - event_count(u)):
                    out.add(seq(u, p))
        elif isinstance(cmd, Weave):
            # a weave has no compositional prefix rule; look far enough ahead
            bound = max_events(cmd)
            depth = bound if bound is not None else 2 * k
            for t in self.traces(cmd, max(depth, k)):
                out |= {p for p in prefixes(t) if event_count(p) <= k}
        else:
            raise TypeError(f"not a command: {cmd!r}")
        return out


def enumerate_command(cmd: Command, max_events_: int) -> TraceStructure:
    """The finite structure of the traces of ``cmd`` with at most the bound events.

    Monotone in the bound.  The result carries ``horizon=max_events_`` unless the
    command's denotation is already finite and fits within the bound.
    """
    _check_bound(max_events_)
    inputs, outputs = command_alphabet(cmd)
    traces = _Enumerator(max_events_).traces(cmd, max_events_)
    longest = max_events(cmd)
    horizon = None if longest is not None and longest <= max_events_ else max_events_
    return TraceStructure(inputs, outputs, traces, horizon=horizon)
