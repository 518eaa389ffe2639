"""Text syntax for R-traces and component specifications.

Trace literals use ``<`` (ordered), ``~`` (contemporary), ``||`` (all three
time orders) and ``eps``.  ``~`` binds tighter than ``<`` and ``||`` tighter
still, so ``a ~ b < c`` reads as ``(a ~ b) < c``.

Commands combine ``a?`` / ``a!`` atoms and ``{trace, ...}`` literal sets with
``;`` (concatenation), ``||`` (weave) and ``|`` (union), tightest first, plus
the prefix operators ``pref`` and ``*[ ... ]``.  A component file reads::

    component muller {
      inputs: a, b;
      outputs: c;
      spec: pref *[ (a? || b?) ; c! ];
    }

``#`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .structures import (
    AlphabetClash,
    Atomic,
    Command,
    Concat,
    Pref,
    Star,
    TraceSet,
    Union,
    Weave,
    command_alphabet,
)
from .terms import (
    EPS,
    RESERVED,
    Epsilon,
    Leaf,
    Par,
    Seq,
    Term,
    Unordered,
    normalize,
    symbols,
)

__all__ = [
    "ComponentDef",
    "SourceError",
    "parse_command",
    "parse_component",
    "parse_components",
    "parse_trace",
    "print_command",
    "print_component",
    "print_trace",
]


class SourceError(ValueError):
    """A problem in textual input, with its 1-based line and column."""

    KINDS = ("syntax", "unknown-symbol", "alphabet-clash")

    def __init__(self, kind: str, line: int, column: int, message: str) -> None:
        assert kind in self.KINDS
        super().__init__(f"{line}:{column}: {kind}: {message}")
        self.kind = kind
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class ComponentDef:
    name: str
    inputs: frozenset
    outputs: frozenset
    spec: Command


# -- tokens --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|\||[<~|;?!()\[\]{}*,:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "op" or "end"
    text: str
    line: int
    column: int


def _tokenize(src: str) -> list[_Token]:
    tokens, pos, line, line_start = [], 0, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise SourceError(
                "syntax", line, pos - line_start + 1, f"unexpected character {src[pos]!r}"
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), line, pos - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, src: str) -> None:
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None, kind: str = "syntax"):
        tok = tok or self.tok
        return SourceError(kind, tok.line, tok.column, message)

    def at(self, text: str) -> bool:
        return self.tok.kind != "end" and self.tok.text == text

    def take(self, text: str | None = None) -> _Token:
        tok = self.tok
        if text is not None and not self.at(text):
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        if tok.kind == "end":
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def ident(self, what: str = "event symbol") -> _Token:
        tok = self.tok
        if tok.kind != "ident" or tok.text in RESERVED:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        return self.take()

    def finish(self) -> None:
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")

    # traces

    def trace(self) -> Term:
        parts = [self.trace_par()]
        while self.at("<"):
            self.take()
            parts.append(self.trace_par())
        return parts[0] if len(parts) == 1 else Seq(*parts)

    def trace_par(self) -> Term:
        parts = [self.trace_unordered()]
        while self.at("~"):
            self.take()
            parts.append(self.trace_unordered())
        return parts[0] if len(parts) == 1 else Par(*parts)

    def trace_unordered(self) -> Term:
        node = self.trace_atom()
        while self.at("||"):
            self.take()
            node = Unordered(node, self.trace_atom())
        return node

    def trace_atom(self) -> Term:
        if self.at("("):
            self.take()
            node = self.trace()
            self.take(")")
            return node
        if self.at("eps"):
            self.take()
            return EPS
        return Leaf(self.ident().text)

    # commands

    def command(self) -> Command:
        node = self.weave()
        while self.at("|"):
            self.take()
            node = Union(node, self.weave())
        return node

    def weave(self) -> Command:
        node = self.concat()
        while self.at("||"):
            self.take()
            node = Weave(node, self.concat())
        return node

    def concat(self) -> Command:
        node = self.unary()
        while self.at(";") and self.starts_unary(self.tokens[self.i + 1]):
            self.take()
            node = Concat(node, self.unary())
        return node

    @staticmethod
    def starts_unary(tok: _Token) -> bool:
        # a ';' before anything else ends a component section
        if tok.kind == "ident":
            return tok.text == "pref" or tok.text not in RESERVED
        return tok.text in ("*", "(", "{")

    def unary(self) -> Command:
        if self.at("pref"):
            self.take()
            return Pref(self.unary())
        if self.at("*"):
            self.take()
            self.take("[")
            inner = self.command()
            self.take("]")
            return Star(inner)
        if self.at("("):
            self.take()
            inner = self.command()
            self.take(")")
            return inner
        if self.at("{"):
            return self.trace_set()
        name = self.ident("command")
        if self.at("?") or self.at("!"):
            return _Located(Atomic(name.text, self.take().text), name)
        raise self.error(f"expected '?' or '!' after {name.text!r}")

    def trace_set(self) -> Command:
        start = self.take("{")
        traces = []
        if not self.at("}"):
            traces.append(self.trace())
            while self.at(","):
                self.take()
                traces.append(self.trace())
        self.take("}")
        return _Located(_RawSet(tuple(normalize(t) for t in traces)), start)


# Parsed command nodes remember where they came from until io classes are known.


@dataclass(frozen=True)
class _RawSet:
    traces: tuple


@dataclass(frozen=True)
class _Located:
    node: object
    token: _Token


def _resolve(node, inputs: frozenset | None, outputs: frozenset | None) -> Command:
    if isinstance(node, _Located):
        inner, tok = node.node, node.token
        if isinstance(inner, Atomic):
            if inputs is not None and inner.symbol not in inputs | outputs:
                raise SourceError(
                    "unknown-symbol", tok.line, tok.column, f"undeclared symbol {inner.symbol!r}"
                )
            declared_in = inputs is not None and inner.symbol in inputs
            declared_out = outputs is not None and inner.symbol in outputs
            if (inner.direction == "?" and declared_out) or (inner.direction == "!" and declared_in):
                raise SourceError(
                    "alphabet-clash", tok.line, tok.column,
                    f"{inner.symbol}{inner.direction} contradicts its declaration",
                )
            return inner
        used = frozenset().union(*(symbols(t) for t in inner.traces))
        if inputs is None:
            raise SourceError(
                "unknown-symbol", tok.line, tok.column,
                "trace literals need declared inputs and outputs",
            )
        unknown = used - inputs - outputs
        if unknown:
            raise SourceError(
                "unknown-symbol", tok.line, tok.column, f"undeclared symbols {sorted(unknown)}"
            )
        return TraceSet(frozenset(inner.traces), inputs & used, outputs & used)
    if isinstance(node, (Star, Pref)):
        return type(node)(_resolve(node.inner, inputs, outputs))
    return type(node)(_resolve(node.left, inputs, outputs), _resolve(node.right, inputs, outputs))


def _check_alphabet(cmd: Command, tok: _Token) -> None:
    try:
        command_alphabet(cmd)
    except AlphabetClash as exc:
        raise SourceError("alphabet-clash", tok.line, tok.column, str(exc)) from None


def parse_trace(src: str) -> Term:
    """Parse and normalize one trace literal; ``||`` nodes are kept."""
    p = _Parser(src)
    t = p.trace()
    p.finish()
    return normalize(t)


def parse_command(src: str, inputs=None, outputs=None) -> Command:
    """Parse a command expression.

    Without declarations, atoms carry their own direction and trace literals
    are rejected because their symbols have no io class.
    """
    if (inputs is None) != (outputs is None):
        raise ValueError("declare both inputs and outputs, or neither")
    if inputs is not None:
        inputs, outputs = frozenset(inputs), frozenset(outputs)
    p = _Parser(src)
    start = p.tok
    raw = p.command()
    p.finish()
    cmd = _resolve(raw, inputs, outputs)
    _check_alphabet(cmd, start)
    return cmd


def _component(p: _Parser) -> ComponentDef:
    p.take("component")
    name = p.ident("component name").text
    p.take("{")
    decl: dict[str, tuple] = {}
    spec_raw, spec_tok = None, None
    while not p.at("}"):
        key = p.tok
        if key.text not in ("inputs", "outputs", "spec"):
            raise p.error("expected 'inputs', 'outputs' or 'spec'")
        if key.text in decl or (key.text == "spec" and spec_raw is not None):
            raise p.error(f"duplicate {key.text!r} section")
        p.take()
        p.take(":")
        if key.text == "spec":
            spec_tok = p.tok
            spec_raw = p.command()
        else:
            names = []
            if not p.at(";"):
                names.append(p.ident())
                while p.at(","):
                    p.take()
                    names.append(p.ident())
            decl[key.text] = (key, names)
        p.take(";")
    p.take("}")
    if spec_raw is None:
        raise p.error(f"component {name!r} has no spec")
    inputs = frozenset(tok.text for tok in decl.get("inputs", (None, []))[1])
    outputs = frozenset(tok.text for tok in decl.get("outputs", (None, []))[1])
    clash = inputs & outputs
    if clash:
        where = next(t for t in decl["outputs"][1] if t.text in clash)
        raise SourceError(
            "alphabet-clash", where.line, where.column,
            f"declared as both input and output: {sorted(clash)}",
        )
    spec = _resolve(spec_raw, inputs, outputs)
    _check_alphabet(spec, spec_tok)
    return ComponentDef(name, inputs, outputs, spec)


def parse_component(src: str) -> ComponentDef:
    p = _Parser(src)
    comp = _component(p)
    p.finish()
    return comp


def parse_components(src: str) -> list[ComponentDef]:
    """Every component defined in a file, in order."""
    p = _Parser(src)
    out = []
    while p.tok.kind != "end":
        out.append(_component(p))
    if not out:
        raise p.error("no component definition found")
    return out


# -- printing ------------------------------------------------------------------


def print_trace(t: Term) -> str:
    """Render a term; the result parses back to the same normal form."""
    if isinstance(t, Epsilon):
        return "eps"
    if isinstance(t, Leaf):
        return t.symbol
    if isinstance(t, Unordered):
        return f"{_trace_operand(t.left)} || {_trace_operand(t.right)}"
    joiner = " < " if isinstance(t, Seq) else " ~ "
    return joiner.join(_trace_operand(c) for c in t.children)


def _trace_operand(t: Term) -> str:
    text = print_trace(t)
    return text if isinstance(t, (Leaf, Epsilon)) else f"({text})"


_LEVEL = {Union: 0, Weave: 1, Concat: 2}


def print_command(cmd: Command) -> str:
    if isinstance(cmd, Atomic):
        return cmd.symbol + cmd.direction
    if isinstance(cmd, TraceSet):
        body = ", ".join(sorted(print_trace(t) for t in cmd.traces))
        return "{ " + body + " }"
    if isinstance(cmd, Pref):
        return "pref " + _command_operand(cmd.inner, 3)
    if isinstance(cmd, Star):
        return "*[ " + print_command(cmd.inner) + " ]"
    op = {Union: " | ", Weave: " || ", Concat: " ; "}[type(cmd)]
    level = _LEVEL[type(cmd)]
    # left-associative: the right operand needs brackets at equal precedence
    return _command_operand(cmd.left, level) + op + _command_operand(cmd.right, level + 1)


def _command_operand(cmd: Command, level: int) -> str:
    text = print_command(cmd)
    if type(cmd) in _LEVEL and _LEVEL[type(cmd)] < level:
        return f"({text})"
    return text


def print_component(comp: ComponentDef) -> str:
    return (
        f"component {comp.name} {{\n"
        f"  inputs: {', '.join(sorted(comp.inputs))};\n"
        f"  outputs: {', '.join(sorted(comp.outputs))};\n"
        f"  spec: {print_command(comp.spec)};\n"
        "}\n"
    )
