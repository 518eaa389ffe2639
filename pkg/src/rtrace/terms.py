"""R-trace terms.

An R-trace is a series-parallel partial order over event occurrences.  Terms
are built from four node kinds:

    Leaf(a)          a single event symbol
    EPS              the empty trace
    Seq(u, v, ...)   u before v before ... (written ``u < v`` in text)
    Par(u, v, ...)   contemporary sub-traces (written ``u ~ v``)

A fifth node, ``Unordered(u, v)``, is the ``u || v`` shorthand standing for the
three traces ``u < v``, ``v < u`` and ``u ~ v``.  It only lives in the input
layer and disappears through :func:`expand_shorthand`.

Terms are immutable.  Constructors do not simplify; :func:`normalize` maps a
term to its unique normal form (flattened, epsilon-free, Par children sorted).
The helpers :func:`seq` and :func:`par` build already-normalized terms.
"""
from __future__ import annotations

import enum
import functools
import itertools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

__all__ = [
    "EPS",
    "Epsilon",
    "Leaf",
    "Order",
    "Par",
    "PathError",
    "Seq",
    "Term",
    "Unordered",
    "check_symbol",
    "event_count",
    "expand_shorthand",
    "has_shorthand",
    "is_normal",
    "leaf",
    "normalize",
    "occurrences",
    "order",
    "par",
    "par_parts",
    "prefixes",
    "project",
    "relation_table",
    "seq",
    "series_parts",
    "sort_key",
    "subterm",
    "symbol_counts",
    "symbols",
]

RESERVED = frozenset({"eps", "pref", "component", "inputs", "outputs", "spec"})
_SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def check_symbol(name: str) -> str:
    """Return ``name`` if it is a valid event symbol, else raise ValueError."""
    if not isinstance(name, str) or not _SYMBOL_RE.match(name):
        raise ValueError(f"invalid event symbol {name!r}")
    if name in RESERVED:
        raise ValueError(f"{name!r} is a reserved word, not an event symbol")
    return name


class PathError(LookupError):
    """An occurrence path does not address a leaf of the term."""


class Order(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    CONTEMPORARY = "contemporary"

    def flip(self) -> "Order":
        if self is Order.BEFORE:
            return Order.AFTER
        if self is Order.AFTER:
            return Order.BEFORE
        return self


@dataclass(frozen=True)
class Epsilon:
    def __repr__(self) -> str:
        return "EPS"


EPS = Epsilon()


@dataclass(frozen=True)
class Leaf:
    symbol: str

    def __post_init__(self) -> None:
        check_symbol(self.symbol)

    def __repr__(self) -> str:
        return f"Leaf({self.symbol!r})"


@dataclass(frozen=True)
class Seq:
    children: tuple

    def __init__(self, *children: "Term") -> None:
        if len(children) == 1 and not isinstance(children[0], _TERM_TYPES):
            children = tuple(children[0])
        object.__setattr__(self, "children", tuple(children))

    def __repr__(self) -> str:
        return "Seq(" + ", ".join(map(repr, self.children)) + ")"


@dataclass(frozen=True)
class Par:
    children: tuple

    def __init__(self, *children: "Term") -> None:
        if len(children) == 1 and not isinstance(children[0], _TERM_TYPES):
            children = tuple(children[0])
        object.__setattr__(self, "children", tuple(children))

    def __repr__(self) -> str:
        return "Par(" + ", ".join(map(repr, self.children)) + ")"


@dataclass(frozen=True)
class Unordered:
    """The ``left || right`` shorthand (all three time orders)."""

    left: "Term"
    right: "Term"


Term = Union[Epsilon, Leaf, Seq, Par, Unordered]
_TERM_TYPES = (Epsilon, Leaf, Seq, Par, Unordered)


def leaf(symbol: str) -> Leaf:
    return Leaf(symbol)


def _coerce(x) -> Term:
    return Leaf(x) if isinstance(x, str) else x


def seq(*terms) -> Term:
    """Normalized series composition; strings are accepted as leaves."""
    return normalize(Seq(*map(_coerce, terms)))


def par(*terms) -> Term:
    """Normalized parallel composition; strings are accepted as leaves."""
    return normalize(Par(*map(_coerce, terms)))


# -- normal form ---------------------------------------------------------------


@functools.lru_cache(maxsize=1 << 16)
def sort_key(t: Term) -> tuple:
    """Structural key giving the canonical total order on terms."""
    if isinstance(t, Epsilon):
        return (0,)
    if isinstance(t, Leaf):
        return (1, t.symbol)
    if isinstance(t, Seq):
        return (2, tuple(sort_key(c) for c in t.children))
    if isinstance(t, Par):
        return (3, tuple(sort_key(c) for c in t.children))
    if isinstance(t, Unordered):
        return (4, sort_key(t.left), sort_key(t.right))
    raise TypeError(f"not an R-trace term: {t!r}")


@functools.lru_cache(maxsize=1 << 16)
def normalize(t: Term) -> Term:
    """Return the unique normal form of ``t``.

    Seq children that are Seqs are spliced, likewise for Par; epsilons are
    dropped; empty nodes become EPS and singletons collapse to their child; Par
    children are sorted by :func:`sort_key`.  ``Unordered`` nodes are kept (with
    their operands in canonical order) unless one side is empty.
    """
    if isinstance(t, (Epsilon, Leaf)):
        return t
    if isinstance(t, Unordered):
        left, right = normalize(t.left), normalize(t.right)
        if left == EPS:
            return right
        if right == EPS:
            return left
        if sort_key(right) < sort_key(left):
            left, right = right, left
        return Unordered(left, right)
    kind = type(t)
    flat: list[Term] = []
    for child in t.children:
        child = normalize(child)
        if child == EPS:
            continue
        if type(child) is kind:
            flat.extend(child.children)
        else:
            flat.append(child)
    if not flat:
        return EPS
    if len(flat) == 1:
        return flat[0]
    if kind is Par:
        flat.sort(key=sort_key)
    return kind(*flat)


def is_normal(t: Term) -> bool:
    return normalize(t) == t


# -- inspection ----------------------------------------------------------------


def series_parts(t: Term) -> tuple:
    """The top-level series components of a normalized term."""
    if t == EPS:
        return ()
    if isinstance(t, Seq):
        return t.children
    return (t,)


def par_parts(t: Term) -> tuple:
    """The top-level parallel components of a normalized term."""
    if t == EPS:
        return ()
    if isinstance(t, Par):
        return t.children
    return (t,)


@functools.lru_cache(maxsize=1 << 16)
def event_count(t: Term) -> int:
    """Number of leaves (event occurrences)."""
    if isinstance(t, Epsilon):
        return 0
    if isinstance(t, Leaf):
        return 1
    if isinstance(t, Unordered):
        return event_count(t.left) + event_count(t.right)
    return sum(event_count(c) for c in t.children)


def symbol_counts(t: Term) -> Counter:
    return Counter(sym for _, sym in occurrences(t))


def symbols(t: Term) -> frozenset:
    return frozenset(sym for _, sym in occurrences(t))


def has_shorthand(t: Term) -> bool:
    if isinstance(t, Unordered):
        return True
    if isinstance(t, (Seq, Par)):
        return any(has_shorthand(c) for c in t.children)
    return False


def _children(t: Term) -> tuple:
    if isinstance(t, (Seq, Par)):
        return t.children
    if isinstance(t, Unordered):
        return (t.left, t.right)
    return ()


def occurrences(t: Term, _prefix: tuple = ()) -> Iterator[tuple[tuple, str]]:
    """Yield ``(path, symbol)`` for every leaf, left to right."""
    if isinstance(t, Leaf):
        yield _prefix, t.symbol
        return
    for i, child in enumerate(_children(t)):
        yield from occurrences(child, _prefix + (i,))


def subterm(t: Term, path: Iterable[int]) -> Term:
    node = t
    for i in path:
        kids = _children(node)
        if not 0 <= i < len(kids):
            raise PathError(f"path {tuple(path)!r} leaves the term at index {i}")
        node = kids[i]
    return node


def order(t: Term, p1: tuple, p2: tuple) -> Order:
    """Time order between the occurrences at paths ``p1`` and ``p2``.

    Decided by the lowest common ancestor: a Seq node orders its children left
    to right, a Par node makes them contemporary.
    """
    p1, p2 = tuple(p1), tuple(p2)
    for p in (p1, p2):
        if not isinstance(subterm(t, p), Leaf):
            raise PathError(f"path {p!r} does not address a leaf")
    if p1 == p2:
        raise ValueError("order of an occurrence with itself is undefined")
    k = 0
    while p1[k] == p2[k]:
        k += 1
    lca = subterm(t, p1[:k])
    if isinstance(lca, Seq):
        return Order.BEFORE if p1[k] < p2[k] else Order.AFTER
    if isinstance(lca, Par):
        return Order.CONTEMPORARY
    raise ValueError("order is undefined below a '||' shorthand node")


def relation_table(t: Term) -> dict[tuple[tuple, tuple], Order]:
    """Order of every pair of occurrences ``(p, q)`` with p left of q."""
    paths = [p for p, _ in occurrences(t)]
    return {
        (p, q): order(t, p, q) for p, q in itertools.combinations(paths, 2)
    }


# -- operations ----------------------------------------------------------------


def _erase(t: Term, keep: frozenset) -> Term:
    if isinstance(t, Leaf):
        return t if t.symbol in keep else EPS
    if isinstance(t, Epsilon):
        return t
    if isinstance(t, Unordered):
        return Unordered(_erase(t.left, keep), _erase(t.right, keep))
    return type(t)(*(_erase(c, keep) for c in t.children))


def project(t: Term, keep: Iterable[str]) -> Term:
    """Keep only the events whose symbol is in ``keep``."""
    return normalize(_erase(t, frozenset(keep)))


def prefixes(t: Term) -> frozenset:
    """All series prefixes ``u`` of ``t`` (``t = u < v``), including EPS and t."""
    parts = series_parts(normalize(t))
    return frozenset(seq(*parts[:k]) for k in range(len(parts) + 1))


def expand_shorthand(t: Term) -> frozenset:
    """Replace every ``u || v`` node by each of ``u < v``, ``v < u``, ``u ~ v``."""
    if isinstance(t, (Epsilon, Leaf)):
        return frozenset({t})
    if isinstance(t, Unordered):
        out = set()
        for u in expand_shorthand(t.left):
            for v in expand_shorthand(t.right):
                out.update((seq(u, v), seq(v, u), par(u, v)))
        return frozenset(out)
    build = seq if isinstance(t, Seq) else par
    options = [expand_shorthand(c) for c in t.children]
    return frozenset(build(*combo) for combo in itertools.product(*options))
