"""
R-traces against classical traces
=================================

Linearizing an R-trace gives the strings a classical observer could record.
The image loses information, and the two versions of a rule can disagree.
"""

from rtrace.classical import cross_validate, linearize, to_classical
from rtrace.library import builtin
from rtrace.rules import RuleId
from rtrace.structures import TraceStructure, enumerate_command
from rtrace.syntax import parse_trace

for text in ("(a ~ b) < c", "a ~ b ~ c", "(a < b) ~ c"):
    words = sorted("".join(w) for w in linearize(parse_trace(text)))
    print(f"{text:12} -> {words}")

# a < b and a ~ b land on overlapping strings
S = TraceStructure({"a"}, {"b"}, {parse_trace("a < b"), parse_trace("a ~ b")})
print("image of {a < b, a ~ b}:", sorted("".join(w) for w in to_classical(S).traces))

muller = enumerate_command(builtin("muller").spec, 6)
for rule in (RuleId.R0, RuleId.R1, RuleId.R2P, RuleId.R3P):
    cv = cross_validate(muller, rule)
    print(f"muller {rule.label:5} relativistic {cv.relativistic.status[rule].value:5} "
          f"classical {cv.classical.status[rule].value}")

# b followed by a block where a and c are contemporary: no R1 premise on the
# R-trace side, but the string b a c puts two inputs next to each other
gap = TraceStructure({"a", "b"}, {"c"}, {parse_trace(x) for x in ("eps", "b", "b < (a ~ c)")})
cv = cross_validate(gap, RuleId.R1)
print("gap example: relativistic", cv.relativistic.status[RuleId.R1].value,
      "classical", cv.classical.status[RuleId.R1].value)
