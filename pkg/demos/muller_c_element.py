"""
Checking a Muller C-element
===========================

Parse the C-element, enumerate its traces up to a bound, check the
delay-insensitivity rules and look at what the environment sees on a and c.
"""

from rtrace.library import builtin
from rtrace.rules import check_di, classify
from rtrace.structures import enumerate_command, project_structure
from rtrace.syntax import print_command, print_trace
from rtrace.terms import sort_key

muller = builtin("muller")
print("spec:", print_command(muller.spec))

# every trace with at most six events
S = enumerate_command(muller.spec, 6)
print(len(S), "traces, for example:")
for t in sorted(S.traces, key=sort_key)[-4:]:
    print("   ", print_trace(t))

# R0, R1, R2' and R3''' together
report = check_di(S)
for rule, status in report.status.items():
    print(f"{rule.label:6} {status.value}")
print("class:", classify(S))

# forget b: the a/c dialog alternates strictly
P = project_structure(enumerate_command(muller.spec, 8), {"a", "c"})
print("on {a, c}:", ", ".join(print_trace(t) for t in sorted(P.traces, key=sort_key)))
