"""One-dimensional special relativity and spacetime embeddings of R-traces.

Events are ``(t, x)`` points; signals are propagations between two vertical
worldlines, the environment at ``x_env`` and the component at ``x_comp``.
A propagation ``p`` is before ``q`` when the reception of ``p`` lies in the
closed causal future of the emission of ``q`` (light-like separation counts as
ordered); two propagations are contemporary when neither is before the other.
"""
from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .terms import (
    EPS,
    Leaf,
    Order,
    Term,
    normalize,
    occurrences,
    order,
    par,
    seq,
)

__all__ = [
    "Cone",
    "EmbeddingError",
    "Embedding",
    "InducedRelation",
    "PropagationEvent",
    "SpacetimeEvent",
    "boost",
    "boost_many",
    "check_embedding",
    "classify_pair",
    "embedding_from_json",
    "embedding_to_json",
    "galilean",
    "greedy_embed",
    "induced_relation",
    "interval",
    "is_lightlike",
    "prop_order",
]

LIGHTLIKE_RTOL = 1e-9


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError(f"non-finite coordinates ({self.t}, {self.x})")


class Cone(enum.Enum):
    TIMELIKE_FUTURE = "timelike-future"
    TIMELIKE_PAST = "timelike-past"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"


def _gamma(v: float, c: float) -> float:
    if c <= 0:
        raise ValueError("signal speed limit c must be positive")
    if abs(v) >= c:
        raise ValueError(f"|v| = {abs(v)} is not below c = {c}")
    return 1.0 / math.sqrt(1.0 - (v / c) ** 2)


def boost(e: SpacetimeEvent, v: float, c: float = 1.0) -> SpacetimeEvent:
    """Lorentz boost into the frame moving at velocity ``v``."""
    g = _gamma(v, c)
    return SpacetimeEvent((e.t - v * e.x / c**2) * g, (e.x - v * e.t) * g)


def boost_many(t, x, v, c: float = 1.0):
    """Vectorized boost; arrays broadcast against each other."""
    t, x, v = np.broadcast_arrays(*map(np.asarray, (t, x, v)))
    if np.any(np.abs(v) >= c):
        raise ValueError("every |v| must be below c")
    g = 1.0 / np.sqrt(1.0 - (v / c) ** 2)
    return (t - v * x / c**2) * g, (x - v * t) * g


def galilean(e: SpacetimeEvent, v: float) -> SpacetimeEvent:
    """Pre-relativistic transform: positions shift, clocks agree."""
    return SpacetimeEvent(e.t, e.x - v * e.t)


def interval(a: SpacetimeEvent, b: SpacetimeEvent, c: float = 1.0) -> float:
    return c**2 * (a.t - b.t) ** 2 - (a.x - b.x) ** 2


def is_lightlike(a: SpacetimeEvent, b: SpacetimeEvent, c: float = 1.0) -> bool:
    dt2 = c**2 * (a.t - b.t) ** 2
    dx2 = (a.x - b.x) ** 2
    return abs(dt2 - dx2) <= LIGHTLIKE_RTOL * max(1.0, dt2, dx2)


def classify_pair(a: SpacetimeEvent, b: SpacetimeEvent, c: float = 1.0) -> Cone:
    """Where ``b`` lies relative to the light cone of ``a``."""
    if a == b:
        raise ValueError("cone classification needs two distinct events")
    if is_lightlike(a, b, c):
        return Cone.LIGHTLIKE
    if interval(a, b, c) < 0:
        return Cone.SPACELIKE
    return Cone.TIMELIKE_FUTURE if b.t > a.t else Cone.TIMELIKE_PAST


def _causally_precedes(a: SpacetimeEvent, b: SpacetimeEvent, c: float) -> bool:
    """``b`` in the closed causal future of ``a`` (``a == b`` included)."""
    if a == b:
        return True
    if b.t < a.t:
        return False
    return classify_pair(a, b, c) in (Cone.TIMELIKE_FUTURE, Cone.LIGHTLIKE)


@dataclass(frozen=True)
class PropagationEvent:
    label: str
    emission: SpacetimeEvent
    reception: SpacetimeEvent

    def __post_init__(self) -> None:
        if not self.reception.t > self.emission.t:
            raise ValueError(f"{self.label}: reception must come after emission")
        if interval(self.emission, self.reception) < 0 and not is_lightlike(
            self.emission, self.reception
        ):
            raise ValueError(f"{self.label}: reception outside the emission's future cone")


def prop_order(p: PropagationEvent, q: PropagationEvent, c: float = 1.0) -> Order:
    if _causally_precedes(p.reception, q.emission, c):
        return Order.BEFORE
    if _causally_precedes(q.reception, p.emission, c):
        return Order.AFTER
    return Order.CONTEMPORARY


# -- embeddings ----------------------------------------------------------------


class EmbeddingError(ValueError):
    """An embedding is inconsistent with its term or cannot be constructed."""


@dataclass(frozen=True)
class Embedding:
    """Propagations keyed by occurrence path, between two vertical worldlines."""

    x_env: float
    x_comp: float
    events: dict
    c: float = 1.0

    def __post_init__(self) -> None:
        if self.x_env == self.x_comp:
            raise EmbeddingError("environment and component worldlines coincide")
        ends = {self.x_env, self.x_comp}
        for path, p in self.events.items():
            src, dst = p.emission.x, p.reception.x
            if {src, dst} != ends:
                raise EmbeddingError(
                    f"propagation {p.label} at {path} does not join the two worldlines"
                )
            if p.reception.t - p.emission.t < abs(dst - src) / self.c * (1 - LIGHTLIKE_RTOL):
                raise EmbeddingError(f"propagation {p.label} travels faster than c")


@dataclass(frozen=True)
class InducedRelation:
    table: dict
    term: Term | None
    witness: tuple | None = None

    @property
    def series_parallel(self) -> bool:
        return self.term is not None


def _components(nodes: list, linked) -> list[list]:
    seen, comps = set(), []
    for n in nodes:
        if n in seen:
            continue
        stack, comp = [n], []
        seen.add(n)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in nodes:
                if w not in seen and linked(u, w):
                    seen.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _sp_term(nodes: list, rel, labels: dict) -> Term | None:
    """Recognize a series-parallel order, or return None if it contains an N."""
    if len(nodes) == 1:
        return Leaf(labels[nodes[0]])
    comps = _components(nodes, lambda u, w: rel(u, w) is Order.CONTEMPORARY)
    if len(comps) > 1:
        # blocks of mutually comparable elements are totally ordered in series
        comps.sort(key=lambda comp: sum(w != comp[0] and rel(comp[0], w) is Order.AFTER for w in nodes))
        kids = [_sp_term(comp, rel, labels) for comp in comps]
        return None if None in kids else seq(*kids)
    comps = _components(nodes, lambda u, w: rel(u, w) is not Order.CONTEMPORARY)
    if len(comps) > 1:
        kids = [_sp_term(comp, rel, labels) for comp in comps]
        return None if None in kids else par(*kids)
    return None


def _find_n(nodes: list, rel) -> tuple | None:
    """An N witness ``(p, q, r, s)``: p<q, r<q, r<s, all other pairs contemporary."""
    for p, q, r, s in itertools.permutations(nodes, 4):
        if (
            rel(p, q) is Order.BEFORE
            and rel(r, q) is Order.BEFORE
            and rel(r, s) is Order.BEFORE
            and rel(p, s) is Order.CONTEMPORARY
            and rel(p, r) is Order.CONTEMPORARY
            and rel(q, s) is Order.CONTEMPORARY
        ):
            return (p, q, r, s)
    return None


def induced_relation(emb: Embedding) -> InducedRelation:
    paths = sorted(emb.events)
    table = {
        (p, q): prop_order(emb.events[p], emb.events[q], emb.c)
        for p, q in itertools.combinations(paths, 2)
    }

    def rel(u, w):
        if (u, w) in table:
            return table[(u, w)]
        return table[(w, u)].flip()

    if not paths:
        return InducedRelation(table, EPS)
    labels = {p: emb.events[p].label for p in paths}
    term = _sp_term(paths, rel, labels)
    if term is None:
        return InducedRelation(table, None, _find_n(paths, rel))
    return InducedRelation(table, term)


def check_embedding(emb: Embedding, t: Term) -> bool:
    """True iff the embedding induces exactly the order of ``t``.

    Occurrences are matched by left-to-right position, so an embedding built
    for one term can be checked against another with the same leaf sequence.
    """
    t = normalize(t)
    occ = list(occurrences(t))
    embedded = sorted(emb.events)
    labels = [emb.events[p].label for p in embedded]
    if labels != [sym for _, sym in occ]:
        raise EmbeddingError(
            f"term leaves {[sym for _, sym in occ]} do not match embedded {labels}"
        )
    table = induced_relation(emb).table
    rank = {p: k for k, p in enumerate(embedded)}
    return all(
        order(t, occ[rank[p]][0], occ[rank[q]][0]) is rel for (p, q), rel in table.items()
    )


# -- schedule ------------------------------------------------------------------


def _longest_paths(n: int, edges: list) -> list | None:
    """Least non-negative solution of ``x[j] >= x[i] + w``, or None if none."""
    x = [0.0] * n
    for _ in range(n + 1):
        changed = False
        for i, j, w in edges:
            if x[i] + w > x[j] + 1e-12:
                x[j] = x[i] + w
                changed = True
        if not changed:
            return x
    return None


def _spread(times: list, sources: list, step: float) -> None:
    """Push apart emissions that coincide on one worldline, at most n * step."""
    for src in set(sources):
        prev = -math.inf
        for k in sorted((k for k in range(len(times)) if sources[k] == src), key=lambda k: (times[k], k)):
            times[k] = max(times[k], prev + step)
            prev = times[k]


def greedy_embed(
    t: Term,
    inputs,
    outputs,
    layout: tuple[float, float] = (0.0, 1.0),
    speed: float = 1.0,
    gap: float = 1.0,
    c: float = 1.0,
) -> Embedding:
    """Earliest emission schedule realizing ``t``, verified before returning.

    Inputs travel environment to component, outputs the other way, so only the
    emission times are free.  Each pair of occurrences becomes a difference
    constraint: an ordered pair needs the first reception to reach the second
    emitter at least ``margin`` before it fires and a contemporary pair needs the
    opposite in both directions.  Emissions that land on the same point are
    then spread by a fraction of the margin.  The margin starts at ``gap`` and
    is halved until the system is feasible.  Fixed signal speed limits what is
    realizable (a chain of three next to one contemporary event never is), so
    failure raises :class:`EmbeddingError`.
    """
    t = normalize(t)
    x_env, x_comp = map(float, layout)
    if not 0 < speed <= c:
        raise EmbeddingError("signal speed must be in (0, c]")
    if gap <= 0:
        raise EmbeddingError("gap must be positive: distinct emissions cannot coincide")
    inputs, outputs = frozenset(inputs), frozenset(outputs)
    occ = list(occurrences(t))
    ends = []
    for _, sym in occ:
        if sym in inputs:
            ends.append((x_env, x_comp))
        elif sym in outputs:
            ends.append((x_comp, x_env))
        else:
            raise EmbeddingError(f"symbol {sym!r} has no direction")
    travel = abs(x_comp - x_env) / speed

    def lag(i: int, j: int) -> float:
        # time from emission of i until its reception is visible at j's emitter
        return travel + abs(ends[i][1] - ends[j][0]) / c

    n = len(occ)
    margin = gap
    for _ in range(40):
        edges = []
        for i, j in itertools.combinations(range(n), 2):
            rel = order(t, occ[i][0], occ[j][0])
            if rel is Order.BEFORE:
                edges.append((i, j, lag(i, j) + margin))
            elif rel is Order.AFTER:
                edges.append((j, i, lag(j, i) + margin))
            else:
                edges.append((i, j, margin - lag(j, i)))
                edges.append((j, i, margin - lag(i, j)))
        times = _longest_paths(n, edges)
        if times is not None:
            _spread(times, [src for src, _ in ends], margin / (3 * max(n, 1)))
            events = {
                path: PropagationEvent(
                    sym,
                    SpacetimeEvent(e, ends[k][0]),
                    SpacetimeEvent(e + travel, ends[k][1]),
                )
                for k, ((path, sym), e) in enumerate(zip(occ, times))
            }
            emb = Embedding(x_env, x_comp, events, c)
            if check_embedding(emb, t):
                return emb
        margin /= 2
    raise EmbeddingError("no emission schedule realizes the term with this layout and speed")


# -- serialization -------------------------------------------------------------


def embedding_to_json(emb: Embedding) -> str:
    doc = {
        "c": emb.c,
        "worldlines": {"environment": emb.x_env, "component": emb.x_comp},
        "propagations": [
            {
                "path": list(path),
                "label": p.label,
                "emission": [p.emission.t, p.emission.x],
                "reception": [p.reception.t, p.reception.x],
            }
            for path, p in sorted(emb.events.items())
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def embedding_from_json(text: str) -> Embedding:
    doc = json.loads(text)
    try:
        events = {
            tuple(item["path"]): PropagationEvent(
                item["label"],
                SpacetimeEvent(*map(float, item["emission"])),
                SpacetimeEvent(*map(float, item["reception"])),
            )
            for item in doc["propagations"]
        }
        wl = doc["worldlines"]
        return Embedding(float(wl["environment"]), float(wl["component"]), events, float(doc.get("c", 1.0)))
    except (KeyError, TypeError) as exc:
        raise EmbeddingError(f"malformed embedding document: {exc}") from exc
