"""Built-in component specifications."""
from __future__ import annotations

import functools

from .syntax import ComponentDef, parse_components

__all__ = ["ALIASES", "LIBRARY_SOURCE", "builtin", "builtin_library"]

# alternative names accepted wherever a built-in is looked up
ALIASES = {"c_element": "muller"}

LIBRARY_SOURCE = """\
# Muller C-element: waits for both inputs, then answers.
component muller {
  inputs: a, b;
  outputs: c;
  spec: pref *[ (a? || b?) ; c! ];
}

component wire {
  inputs: a;
  outputs: b;
  spec: pref *[ a? ; b! ];
}

component fork {
  inputs: a;
  outputs: b, c;
  spec: pref *[ a? ; (b! || c!) ];
}

# The environment picks one input per round.
component merge {
  inputs: a, b;
  outputs: c;
  spec: pref *[ (a? ; c!) | (b? ; c!) ];
}

# The component grants one of two mutually exclusive outputs.
component arbiter {
  inputs: r;
  outputs: g1, g2;
  spec: pref *[ r? ; (g1! | g2!) ];
}

# Two outputs in a fixed order: not delay-insensitive.
component delay_sensitive {
  inputs: a;
  outputs: b, c;
  spec: pref { a < b < c };
}
"""


@functools.lru_cache(maxsize=None)
def builtin_library() -> dict[str, ComponentDef]:
    return {c.name: c for c in parse_components(LIBRARY_SOURCE)}


def builtin(name: str) -> ComponentDef:
    lib = builtin_library()
    name = ALIASES.get(name, name)
    if name not in lib:
        raise KeyError(f"no built-in component {name!r}; known: {', '.join(sorted(lib))}")
    return lib[name]
