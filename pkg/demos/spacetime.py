"""
Light cones, boosts and embeddings
==================================

Simultaneity depends on the observer; cone classes and the interval do not.
"""

import numpy as np

from rtrace.kinematics import (
    SpacetimeEvent,
    boost,
    boost_many,
    classify_pair,
    embedding_to_json,
    galilean,
    greedy_embed,
    induced_relation,
)
from rtrace.syntax import parse_trace, print_trace

A, B = SpacetimeEvent(0, 0), SpacetimeEvent(0, 2)
for v in (0.0, 0.5, -0.5):
    a, b = boost(A, v), boost(B, v)
    print(f"v = {v:+.1f}: t_A = {a.t:+.3f}, t_B = {b.t:+.3f}, cone {classify_pair(a, b).value}")
print("galilean clocks still agree:", galilean(A, 0.5).t == galilean(B, 0.5).t)

# the interval survives a boost, checked over many random pairs at once
rng = np.random.default_rng(0)
p, q, v = rng.uniform(-5, 5, (1000, 2)), rng.uniform(-5, 5, (1000, 2)), rng.uniform(-0.9, 0.9, 1000)
tp, xp = boost_many(p[:, 0], p[:, 1], v)
tq, xq = boost_many(q[:, 0], q[:, 1], v)
drift = ((tp - tq) ** 2 - (xp - xq) ** 2) - ((p[:, 0] - q[:, 0]) ** 2 - (p[:, 1] - q[:, 1]) ** 2)
print("largest interval drift:", float(np.abs(drift).max()))

# a schedule that realizes a < (b ~ c) between worldlines x = 0 and x = 1
t = parse_trace("a < (b ~ c)")
emb = greedy_embed(t, {"a"}, {"b", "c"})
print("embedding realizes", print_trace(induced_relation(emb).term))
print(embedding_to_json(emb))
