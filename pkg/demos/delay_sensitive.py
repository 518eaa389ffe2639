"""
A delay-sensitive specification
===============================

pref{a < b < c}: the component answers a with b and then c.  The checker
refutes R1; the spacetime picture shows why.
"""

from rtrace.kinematics import Embedding, PropagationEvent, SpacetimeEvent, induced_relation
from rtrace.library import builtin
from rtrace.rules import RuleId, check_rule
from rtrace.structures import enumerate_command
from rtrace.syntax import print_trace

S = enumerate_command(builtin("delay_sensitive").spec, 8)
report = check_rule(S, RuleId.R1)
for v in report.violations:
    print(f"R1 violated after s = {print_trace(v.s)} for outputs {v.pair}")
    print("   missing:", ", ".join(sorted(map(print_trace, v.missing))))

# The component at x = 1 sends b, waits three time units, sends c.  Where the
# environment sits decides whether it can tell the two apart.
E = SpacetimeEvent


def scenario(x_env):
    d = 1 - x_env
    return Embedding(x_env, 1, {
        (0,): PropagationEvent("a", E(0, x_env), E(d, 1)),
        (1,): PropagationEvent("b", E(d + 1, 1), E(2 * d + 1, x_env)),
        (2,): PropagationEvent("c", E(d + 4, 1), E(2 * d + 4, x_env)),
    })


for x_env in (0, -2):
    print(f"environment at x = {x_env}: observes {print_trace(induced_relation(scenario(x_env)).term)}")
