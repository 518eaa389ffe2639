import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import classical_rule_holds, linear_extensions, sp_terms, terms
from rtrace.classical import (
    ClassicalStructure,
    check_classical_rule,
    cross_validate,
    linearize,
    project_classical,
    to_classical,
)
from rtrace.library import builtin
from rtrace.rules import RuleId, Status, UnknownSymbol
from rtrace.structures import AlphabetClash, TraceStructure, enumerate_command, project_structure
from rtrace.terms import EPS, Leaf, Unordered, occurrences, par, seq

MULLER_HISTORY = seq(par("a", "b"), "c", "a", "b", "c", "b", "a", "c", par("a", "b"), "c")


def words(*texts):
    return {tuple(x) for x in texts}


def test_linearize_examples():
    assert linearize(EPS) == {()}
    assert linearize(seq(par("a", "b"), "c")) == words("abc", "bac")
    assert linearize(par("a", "a")) == words("aa")
    assert len(linearize(MULLER_HISTORY)) == 4
    with pytest.raises(ValueError):
        linearize(Unordered(Leaf("a"), Leaf("b")))


def test_par_of_distinct_leaves_has_every_permutation():
    for n in range(1, 6):
        assert len(linearize(par(*"abcde"[:n]))) == math.factorial(n)


def _distinct(t):
    # relabel each occurrence so collapsed strings become extension counts
    names = iter("vwxyz")
    mapping = {path: next(names) for path, _ in occurrences(t)}

    def walk(node, path=()):
        if isinstance(node, Leaf):
            return Leaf(mapping[path])
        if node == EPS:
            return EPS
        kids = [walk(k, path + (i,)) for i, k in enumerate(node.children)]
        return type(node)(*kids)

    return walk(t)


def test_linearize_matches_brute_force_on_small_terms():
    for t in sp_terms("ab", 5):
        assert linearize(t) == linear_extensions(t)
        d = _distinct(t)
        assert len(linearize(d)) == len(linear_extensions(t, distinct=True))


@given(terms(6))
def test_linearizations_respect_the_order(t):
    assert linearize(t) == linear_extensions(t)


def test_classical_image_collapses_distinct_terms():
    S = TraceStructure({"a"}, {"b"}, {seq("a", "b"), par("a", "b")})
    assert to_classical(S).traces == words("ab", "ba")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.sets(st.sampled_from("abc")))
def test_projection_commutes_with_linearization(seed, keep):
    rng = random.Random(seed)
    pool = sorted(sp_terms("abc", 4), key=repr)
    S = TraceStructure({"a"}, {"b", "c"}, rng.sample(pool, 4))
    left = to_classical(project_structure(S, keep))
    right = project_classical(to_classical(S), keep)
    assert left == right


def test_classical_structure_validation():
    with pytest.raises(AlphabetClash):
        ClassicalStructure({"a"}, {"a"}, {()})
    C = ClassicalStructure({"a"}, set(), words("", "a", "az"))
    with pytest.raises(UnknownSymbol):
        check_classical_rule(C, RuleId.R1)


def test_classical_rule_examples():
    both_inputs = ClassicalStructure({"a", "b"}, set(), words("", "a", "ab"))
    report = check_classical_rule(both_inputs, RuleId.R1)
    assert report.status[RuleId.R1] is Status.FAIL
    assert report.violations[0].missing == {("b", "a")}
    repeated = ClassicalStructure({"a"}, set(), words("", "a", "aa"))
    assert check_classical_rule(repeated, RuleId.R0).status[RuleId.R0] is Status.FAIL
    choice = ClassicalStructure({"a", "b"}, {"c"}, words("", "a", "b", "ac", "bc"))
    assert check_classical_rule(choice, RuleId.R3PP).passed
    assert not check_classical_rule(choice, RuleId.R3P).passed


def test_muller_image_passes_classically():
    C = to_classical(enumerate_command(builtin("muller").spec, 8))
    for rule in (RuleId.R0, RuleId.R1, RuleId.R2, RuleId.R2P, RuleId.R3P):
        assert check_classical_rule(C, rule).status[rule] is not Status.FAIL, rule


@pytest.mark.parametrize("name", ["muller", "delay_sensitive", "wire", "fork"])
def test_cross_validation_on_library(name):
    S = enumerate_command(builtin(name).spec, 6)
    for rule in (RuleId.R0, RuleId.R1, RuleId.R2, RuleId.R2P, RuleId.R3P):
        assert cross_validate(S, rule).consistent, rule


def test_delay_sensitive_fails_in_both_worlds():
    S = enumerate_command(builtin("delay_sensitive").spec, 6)
    cv = cross_validate(S, RuleId.R1)
    assert cv.relativistic.status[RuleId.R1] is Status.FAIL
    assert cv.classical.status[RuleId.R1] is Status.FAIL
    assert not cv.reverse_gap


def _random_classical(seed):
    rng = random.Random(seed)
    alpha = rng.choice(["ab", "abc"])
    pool = [tuple(rng.choice(alpha) for _ in range(rng.randint(1, 4))) for _ in range(4)]
    traces = {w[:k] for w in pool for k in range(len(w) + 1)}
    inputs = {x for x in alpha if rng.random() < 0.5}
    return ClassicalStructure(inputs, set(alpha) - inputs, traces)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**31))
def test_classical_checker_agrees_with_quantifier_oracle(seed):
    C = _random_classical(seed)
    for rule in RuleId:
        got = check_classical_rule(C, rule).status[rule] is Status.PASS
        assert got == classical_rule_holds(C, rule.value), rule
