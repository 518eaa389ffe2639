import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import sp_terms
from rtrace.structures import (
    AlphabetClash,
    Atomic,
    BoundExceeded,
    Concat,
    Pref,
    Star,
    TraceSet,
    TraceStructure,
    Union,
    Weave,
    concat,
    enumerate_command,
    prefix_close,
    project_structure,
    star,
    union,
    weave,
)
from rtrace.terms import EPS, Leaf, event_count, par, project, seq

A_IN = TraceStructure({"a"}, set(), {Leaf("a")})
B_IN = TraceStructure({"b"}, set(), {Leaf("b")})
AC = TraceStructure({"a"}, {"c"}, {seq("a", "c")})
BC = TraceStructure({"b"}, {"c"}, {seq("b", "c")})
MULLER = Pref(Star(Concat(Weave(Atomic("a", "?"), Atomic("b", "?")), Atomic("c", "!"))))


def test_structure_validation():
    with pytest.raises(AlphabetClash):
        TraceStructure({"a"}, {"a"}, {EPS})
    with pytest.raises(ValueError):
        TraceStructure({"a"}, set(), {seq("a", "b")})
    s = TraceStructure({"a"}, set(), {seq("a", EPS), Leaf("a")})
    assert len(s) == 1


def test_concat():
    out = concat(A_IN, TraceStructure(set(), {"c"}, {Leaf("c")}))
    assert out == TraceStructure({"a"}, {"c"}, {seq("a", "c")})
    assert concat(AC, TraceStructure(set(), set(), {EPS})).traces == AC.traces
    two = TraceStructure({"a", "b"}, set(), {Leaf("a"), Leaf("b")})
    assert len(concat(two, two).traces) == 4
    with pytest.raises(AlphabetClash):
        concat(A_IN, TraceStructure(set(), {"a"}, {Leaf("a")}))


def test_union_and_alphabets():
    out = union(AC, BC)
    assert out.inputs == {"a", "b"} and out.outputs == {"c"}
    assert out.traces == AC.traces | BC.traces


def test_star_truncates():
    assert star(AC, 6).traces == {EPS, seq("a", "c"), seq(*"acac"), seq(*"acacac")}
    assert star(AC, 6).inputs == AC.inputs


def test_prefix_close():
    assert prefix_close(AC).traces == {EPS, Leaf("a"), seq("a", "c")}
    assert not AC.is_prefix_closed()
    assert prefix_close(AC).is_prefix_closed()


def test_project_structure_of_muller():
    S = enumerate_command(MULLER, 8)
    P = project_structure(S, {"a", "c"})
    assert P.inputs == {"a"} and P.outputs == {"c"}
    assert seq(*"acac") in P.traces
    for t in P.traces:
        assert t in {seq(*("ac" * k)[:n]) for k in range(5) for n in range(2 * k + 1)}


def test_weave_golden():
    assert weave(AC, BC) == TraceStructure(
        {"a", "b"}, {"c"}, {seq(par("a", "b"), "c"), seq(*"abc"), seq(*"bac")}
    )


def test_weave_examples():
    assert weave(A_IN, A_IN) == A_IN
    assert weave(A_IN, B_IN).traces == {seq("a", "b"), seq("b", "a"), par("a", "b")}


def _weave_by_filter(r, s, max_leaves):
    merged = "".join(sorted(r.alphabet | s.alphabet))
    return {
        t
        for t in sp_terms(merged, max_leaves)
        if project(t, r.alphabet) in r.traces and project(t, s.alphabet) in s.traces
    }


def _random_structure(rng, alphabet, inputs, n_traces, max_leaves):
    pool = [t for t in sp_terms("".join(alphabet), max_leaves) if t != EPS]
    traces = rng.sample(pool, min(n_traces, len(pool)))
    syms = set(alphabet)
    return TraceStructure(syms & inputs, syms - inputs, traces)


@pytest.mark.parametrize("seed", range(40))
def test_weave_matches_generate_and_filter(seed):
    rng = random.Random(seed)
    inputs = {"a", "c"}
    r = _random_structure(rng, rng.choice(["ab", "a", "abc"]), inputs, 3, 2)
    s = _random_structure(rng, rng.choice(["bc", "c", "b"]), inputs, 3, 2)
    bound = max(map(event_count, r.traces)) + max(map(event_count, s.traces))
    expected = _weave_by_filter(r, s, bound)
    got = weave(r, s).traces
    assert got == expected
    for t in got:
        assert project(t, r.alphabet) in r.traces
        assert project(t, s.alphabet) in s.traces


def test_weave_alphabet_clash():
    with pytest.raises(AlphabetClash):
        weave(A_IN, TraceStructure(set(), {"a"}, {Leaf("a")}))


# -- enumeration --------------------------------------------------------------------


def test_enumerate_muller_one_round():
    S = enumerate_command(MULLER, 3)
    assert S.traces == {
        EPS, Leaf("a"), Leaf("b"), par("a", "b"), seq("a", "b"), seq("b", "a"),
        seq(par("a", "b"), "c"), seq(*"abc"), seq(*"bac"),
    }
    assert S.horizon == 3


def test_enumerate_atomic():
    for k in (1, 5):
        S = enumerate_command(Atomic("a", "?"), k)
        assert S == TraceStructure({"a"}, set(), {Leaf("a")})
        assert S.horizon is None


def test_enumerate_warns_on_long_literal():
    cmd = TraceSet(frozenset({seq(*"abc")}), {"a"}, {"b", "c"})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        S = enumerate_command(cmd, 2)
    assert any(issubclass(w.category, BoundExceeded) for w in caught)
    assert S.traces == frozenset()


def test_enumerated_muller_is_prefix_closed():
    for k in range(1, 9):
        assert enumerate_command(MULLER, k).is_prefix_closed()


def test_trace_set_with_shorthand_equals_weave_form():
    literal = Pref(Star(TraceSet(frozenset({seq(par("a", "b"), "c"), seq(*"abc"), seq(*"bac")}), {"a", "b"}, {"c"})))
    for k in (3, 6, 7):
        assert enumerate_command(literal, k).traces == enumerate_command(MULLER, k).traces


ATOMS = [Atomic("a", "?"), Atomic("b", "?"), Atomic("c", "!")]
commands = st.recursive(
    st.sampled_from(ATOMS),
    lambda kids: st.one_of(
        st.builds(Concat, kids, kids),
        st.builds(Union, kids, kids),
        st.builds(Weave, kids, kids),
        st.builds(Star, kids),
        st.builds(Pref, kids),
    ),
    max_leaves=4,
)


def _denotation_filter(cmd, k):
    """Reference semantics: structure operations, truncated after each step."""
    if isinstance(cmd, Atomic):
        return enumerate_command(cmd, k).traces
    if isinstance(cmd, Star):
        inner = TraceStructure({"a", "b"}, {"c"}, _denotation_filter(cmd.inner, k))
        return star(inner, k).traces
    if isinstance(cmd, Pref):
        raise NotImplementedError
    left = TraceStructure({"a", "b"}, {"c"}, _denotation_filter(cmd.left, k))
    right = TraceStructure({"a", "b"}, {"c"}, _denotation_filter(cmd.right, k))
    if isinstance(cmd, Concat):
        out = concat(left, right).traces
    elif isinstance(cmd, Union):
        out = union(left, right).traces
    else:
        from rtrace.structures import command_alphabet

        la, ra = (frozenset().union(*command_alphabet(x)) for x in (cmd.left, cmd.right))
        left = TraceStructure(la & {"a", "b"}, la & {"c"}, left.traces)
        right = TraceStructure(ra & {"a", "b"}, ra & {"c"}, right.traces)
        out = weave(left, right).traces
    return {t for t in out if event_count(t) <= k}


def _pref_free(cmd):
    if isinstance(cmd, Atomic):
        return True
    if isinstance(cmd, Pref):
        return False
    if isinstance(cmd, Star):
        return _pref_free(cmd.inner)
    return _pref_free(cmd.left) and _pref_free(cmd.right)


@settings(max_examples=60, deadline=None)
@given(commands, st.integers(1, 4))
def test_enumerate_is_monotone(cmd, k):
    small = enumerate_command(cmd, k).traces
    assert small <= enumerate_command(cmd, k + 1).traces
    assert small <= enumerate_command(cmd, k + 2).traces
    assert all(event_count(t) <= k for t in small)


@settings(max_examples=60, deadline=None)
@given(commands, st.integers(1, 4))
def test_enumerate_matches_stepwise_semantics(cmd, k):
    if not _pref_free(cmd):
        return
    assert enumerate_command(cmd, k).traces == _denotation_filter(cmd, k)


@settings(max_examples=60, deadline=None)
@given(commands, st.integers(1, 5))
def test_pref_enumeration_is_prefix_closure(cmd, k):
    # the prefixes of the traces within the bound are always included
    closed = enumerate_command(Pref(cmd), k).traces
    assert prefix_close(enumerate_command(cmd, k)).traces <= closed
    assert enumerate_command(Pref(cmd), k).is_prefix_closed()


@given(st.integers(0, 2**31))
def test_prefix_close_idempotent_and_extensive(seed):
    rng = random.Random(seed)
    S = _random_structure(rng, "abc", {"a"}, 4, 4)
    once = prefix_close(S)
    assert S.traces <= once.traces
    assert prefix_close(once) == once
