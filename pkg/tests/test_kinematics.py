import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import terms
from rtrace.kinematics import (
    Cone,
    Embedding,
    EmbeddingError,
    PropagationEvent,
    SpacetimeEvent,
    boost,
    boost_many,
    check_embedding,
    classify_pair,
    embedding_from_json,
    embedding_to_json,
    galilean,
    greedy_embed,
    induced_relation,
    interval,
    prop_order,
)
from rtrace.terms import Order, occurrences, par, seq, symbols

E = SpacetimeEvent


def test_boost_examples():
    b = boost(E(1, 0), 0.6)
    assert b.t == pytest.approx(1.25) and b.x == pytest.approx(-0.75)
    g = galilean(E(1, 0), 0.6)
    assert (g.t, g.x) == (1, pytest.approx(-0.6))
    with pytest.raises(ValueError):
        boost(E(0, 0), 1.0)
    with pytest.raises(ValueError):
        E(float("nan"), 0)


def test_interval_and_cones():
    o = E(0, 0)
    assert interval(o, E(2, 1)) == 3
    assert interval(o, E(1, 1)) == 0
    assert interval(o, E(1, 2)) == -3
    assert classify_pair(o, E(2, 1)) is Cone.TIMELIKE_FUTURE
    assert classify_pair(E(2, 1), o) is Cone.TIMELIKE_PAST
    assert classify_pair(o, E(1, 1)) is Cone.LIGHTLIKE
    assert classify_pair(o, E(1, 2)) is Cone.SPACELIKE
    assert classify_pair(o, E(0, 1)) is Cone.SPACELIKE
    with pytest.raises(ValueError):
        classify_pair(o, o)


def _samples(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-10, 10, size=(n, 2))
    b = rng.uniform(-10, 10, size=(n, 2))
    v = rng.uniform(-0.99, 0.99, size=n)
    return a, b, v


def test_interval_invariant_under_boosts():
    a, b, v = _samples(10_000, 1)
    ta, xa = boost_many(a[:, 0], a[:, 1], v)
    tb, xb = boost_many(b[:, 0], b[:, 1], v)
    before = (a[:, 0] - b[:, 0]) ** 2 - (a[:, 1] - b[:, 1]) ** 2
    after = (ta - tb) ** 2 - (xa - xb) ** 2
    scale = np.maximum.reduce([np.ones_like(before), (ta - tb) ** 2, (xa - xb) ** 2])
    assert np.all(np.abs(after - before) <= 1e-9 * scale)


def test_boost_many_agrees_with_scalar_boost():
    a, _, v = _samples(50, 2)
    ts, xs = boost_many(a[:, 0], a[:, 1], v)
    for (t, x), vel, t2, x2 in zip(a, v, ts, xs):
        e = boost(E(t, x), vel)
        assert (e.t, e.x) == (pytest.approx(t2), pytest.approx(x2))


def test_simultaneity_is_frame_dependent():
    rng = random.Random(3)
    for _ in range(1000):
        t = rng.uniform(-5, 5)
        xa, xb = rng.uniform(-5, 5), rng.uniform(-5, 5)
        v = rng.uniform(0.01, 0.99) * rng.choice((-1, 1))
        if abs(xa - xb) < 1e-3:
            continue
        assert boost(E(t, xa), v).t != pytest.approx(boost(E(t, xb), v).t, abs=1e-9)
        assert galilean(E(t, xa), v).t == galilean(E(t, xb), v).t


def test_cone_class_is_frame_independent():
    rng = random.Random(4)
    for _ in range(1000):
        a, b = E(rng.uniform(-5, 5), rng.uniform(-5, 5)), E(rng.uniform(-5, 5), rng.uniform(-5, 5))
        v = rng.uniform(-0.99, 0.99)
        assert classify_pair(a, b) is classify_pair(boost(a, v), boost(b, v))


def _future(rng, e):
    dt = rng.uniform(0.1, 3)
    return E(e.t + dt, e.x + rng.uniform(-0.99, 0.99) * dt)


def test_timelike_order_is_transitive():
    rng = random.Random(5)
    for _ in range(1000):
        a = E(rng.uniform(-5, 5), rng.uniform(-5, 5))
        b = _future(rng, a)
        c = _future(rng, b)
        assert classify_pair(a, b) is Cone.TIMELIKE_FUTURE
        assert classify_pair(b, c) is Cone.TIMELIKE_FUTURE
        assert classify_pair(a, c) is Cone.TIMELIKE_FUTURE
        v = rng.uniform(-0.99, 0.99)
        assert classify_pair(boost(a, v), boost(c, v)) is Cone.TIMELIKE_FUTURE


def test_propagation_order_is_transitive_along_chains():
    rng = random.Random(6)
    for _ in range(1000):
        props, start = [], E(0, rng.uniform(-2, 2))
        for k in range(3):
            end = _future(rng, start)
            props.append(PropagationEvent(f"p{k}", start, end))
            start = _future(rng, end)
        p, q, r = props
        assert prop_order(p, q) is Order.BEFORE and prop_order(q, r) is Order.BEFORE
        assert prop_order(p, r) is Order.BEFORE
        assert prop_order(r, p) is Order.AFTER


def test_contemporary_propagations_are_not_transitive():
    p = PropagationEvent("p", E(0, 0), E(1, 1))
    q = PropagationEvent("q", E(0.5, 5), E(2, 6))
    r = PropagationEvent("r", E(1.5, 1), E(2, 1.5))
    assert prop_order(p, q) is Order.CONTEMPORARY
    assert prop_order(q, r) is Order.CONTEMPORARY
    assert prop_order(p, r) is Order.BEFORE


# -- calibration scenarios -------------------------------------------------------------


def test_single_round_trip_calibration():
    a = PropagationEvent("a", E(0, 0), E(1, 1))
    b = PropagationEvent("b", E(2, 1), E(3, 0))
    assert prop_order(a, b) is Order.BEFORE
    c_close = PropagationEvent("c", E(2.5, 1), E(3.5, 0))
    c_late = PropagationEvent("c", E(5, 1), E(6, 0))
    assert prop_order(b, c_close) is Order.CONTEMPORARY
    assert prop_order(b, c_late) is Order.BEFORE


def _observer(x_env):
    """Input a reaches the component, which answers b and then c."""
    d = 1 - x_env
    events = {
        (0,): PropagationEvent("a", E(0, x_env), E(d, 1)),
        (1,): PropagationEvent("b", E(d + 1, 1), E(2 * d + 1, x_env)),
        (2,): PropagationEvent("c", E(d + 4, 1), E(2 * d + 4, x_env)),
    }
    return Embedding(x_env, 1, events)


def test_near_environment_sees_a_chain():
    rel = induced_relation(_observer(0))
    assert rel.term == seq("a", "b", "c")
    assert rel.table == {
        ((0,), (1,)): Order.BEFORE,
        ((0,), (2,)): Order.BEFORE,
        ((1,), (2,)): Order.BEFORE,
    }
    assert check_embedding(_observer(0), seq("a", "b", "c"))
    assert not check_embedding(_observer(0), seq("a", par("b", "c")))


def test_far_environment_sees_contemporary_outputs():
    rel = induced_relation(_observer(-2))
    assert rel.term == seq("a", par("b", "c"))
    assert rel.table[((1,), (2,))] is Order.CONTEMPORARY
    assert check_embedding(_observer(-2), seq("a", par("b", "c")))
    assert not check_embedding(_observer(-2), seq("a", "b", "c"))


def test_n_shaped_order_is_flagged():
    # delays are free, so each propagation acts as an interval [emission, reception + 1]
    spans = {"p": (5, 15), "q": (20, 29), "r": (0, 9), "s": (12, 49)}
    events = {
        (k,): PropagationEvent(name, E(e, 0), E(r, 1)) for k, (name, (e, r)) in enumerate(sorted(spans.items()))
    }
    rel = induced_relation(Embedding(0, 1, events))
    assert not rel.series_parallel
    assert rel.witness is not None
    p, q, r, s = (events[x].label for x in rel.witness)
    assert (p, q, r, s) == ("p", "q", "r", "s")


def test_check_embedding_rejects_wrong_leaves():
    with pytest.raises(EmbeddingError):
        check_embedding(_observer(0), seq("a", "b"))


def test_embedding_validation():
    with pytest.raises(EmbeddingError):
        Embedding(0, 0, {})
    with pytest.raises(EmbeddingError):
        Embedding(0, 1, {(0,): PropagationEvent("a", E(0, 0), E(3, 2))})
    with pytest.raises(ValueError):
        PropagationEvent("a", E(0, 0), E(0.5, 1))
    with pytest.raises(ValueError):
        PropagationEvent("a", E(1, 0), E(0, 1))


# -- schedule ---------------------------------------------------------------------------


def test_greedy_embed_example():
    emb = greedy_embed(seq("a", "b"), {"a"}, {"b"})
    assert emb.events[(0,)] == PropagationEvent("a", E(0, 0), E(1, 1))
    assert emb.events[(1,)] == PropagationEvent("b", E(2, 1), E(3, 0))
    assert check_embedding(emb, seq("a", "b"))


def test_greedy_embed_contemporary_pairs():
    for t, ins, outs in [
        (par("a", "b"), {"a"}, {"b"}),
        (par("a", "b"), {"a", "b"}, set()),
        (seq("a", par("b", "c")), {"a"}, {"b", "c"}),
        (seq(par("a", "b"), "c"), {"a", "b"}, {"c"}),
    ]:
        assert check_embedding(greedy_embed(t, ins, outs), t)


def test_greedy_embed_refuses_unrealizable_orders():
    # a chain of three beside one contemporary event cannot be laid out at a fixed speed
    with pytest.raises(EmbeddingError):
        greedy_embed(par(seq("a", "b", "c"), "d"), {"a", "b", "c", "d"}, set())


def test_greedy_embed_parameter_errors():
    with pytest.raises(EmbeddingError):
        greedy_embed(seq("a", "b"), {"a"}, {"b"}, speed=2)
    with pytest.raises(EmbeddingError):
        greedy_embed(seq("a", "b"), {"a"}, {"b"}, gap=0)
    with pytest.raises(EmbeddingError):
        greedy_embed(seq("a", "b"), {"a"}, set())


@settings(max_examples=200, deadline=None)
@given(terms(6), st.integers(0, 2**31))
def test_greedy_round_trip(t, seed):
    rng = random.Random(seed)
    syms = sorted(symbols(t))
    ins = {x for x in syms if rng.random() < 0.5}
    try:
        emb = greedy_embed(t, ins, set(syms) - ins)
    except EmbeddingError:
        return
    assert check_embedding(emb, t)
    assert len(emb.events) == len(list(occurrences(t)))


@given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=6), st.integers(0, 2**31))
def test_greedy_always_realizes_chains(word, seed):
    rng = random.Random(seed)
    ins = {x for x in set(word) if rng.random() < 0.5}
    t = seq(*word)
    assert check_embedding(greedy_embed(t, ins, set(word) - ins, layout=(rng.uniform(-3, 0), 1)), t)


def test_json_round_trip():
    emb = _observer(-2)
    back = embedding_from_json(embedding_to_json(emb))
    assert back == emb
    assert json.loads(embedding_to_json(emb))["worldlines"] == {"environment": -2, "component": 1}
    with pytest.raises(EmbeddingError):
        embedding_from_json('{"propagations": [{"label": "a"}]}')
