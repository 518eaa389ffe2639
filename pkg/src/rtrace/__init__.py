"""R-trace structures: relativistic traces for delay-insensitive specifications."""

__version__ = "0.1.0"

from .classical import (
    ClassicalStructure,
    check_classical_rule,
    cross_validate,
    linearize,
    to_classical,
)
from .kinematics import (
    Embedding,
    EmbeddingError,
    PropagationEvent,
    SpacetimeEvent,
    boost,
    check_embedding,
    greedy_embed,
    induced_relation,
    prop_order,
)
from .library import builtin, builtin_library
from .rules import (
    CheckReport,
    RuleId,
    Status,
    Violation,
    check_di,
    check_rule,
    check_rules,
    classify,
)
from .structures import (
    Atomic,
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
from .syntax import (
    ComponentDef,
    SourceError,
    parse_command,
    parse_component,
    parse_trace,
    print_command,
    print_trace,
)
from .terms import (
    EPS,
    Leaf,
    Order,
    Par,
    Seq,
    expand_shorthand,
    normalize,
    order,
    par,
    prefixes,
    project,
    seq,
)

__all__ = [
    "Atomic",
    "CheckReport",
    "ClassicalStructure",
    "ComponentDef",
    "Concat",
    "EPS",
    "Embedding",
    "EmbeddingError",
    "Leaf",
    "Order",
    "Par",
    "Pref",
    "PropagationEvent",
    "RuleId",
    "Seq",
    "SourceError",
    "SpacetimeEvent",
    "Star",
    "Status",
    "TraceSet",
    "TraceStructure",
    "Union",
    "Violation",
    "Weave",
    "boost",
    "builtin",
    "builtin_library",
    "check_classical_rule",
    "check_di",
    "check_embedding",
    "check_rule",
    "check_rules",
    "classify",
    "concat",
    "cross_validate",
    "enumerate_command",
    "expand_shorthand",
    "greedy_embed",
    "induced_relation",
    "linearize",
    "normalize",
    "order",
    "par",
    "parse_command",
    "parse_component",
    "parse_trace",
    "prefix_close",
    "prefixes",
    "print_command",
    "print_trace",
    "project",
    "project_structure",
    "prop_order",
    "seq",
    "star",
    "to_classical",
    "union",
    "weave",
]
