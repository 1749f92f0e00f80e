"""Parsing and serialization of the textual diagram format.

The format is a small DAGitty-like language::

    dag {
      LE [exposure]
      D  [outcome]
      FI MR MD          # bare names declare plain covariates
      FI -> LE
      FI -> MD
    }

Grammar:

    document  := "dag" "{" statement* "}"
    statement := node | edge
    node      := NAME ("[" attr ("," attr)* "]")?
    attr      := "exposure" | "outcome" | "adjusted" | "latent"
    edge      := NAME "->" NAME
    NAME      := [A-Za-z_][A-Za-z0-9_]*

Whitespace and newlines separate tokens; ``#`` starts a comment running to
the end of the line.  Files use UTF-8 and the ``.dag`` extension.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .graph import MixedGraph, RoleAssignment

ROLE_NAMES = ("exposure", "outcome", "adjusted", "latent")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<punct>[{}\[\],])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    col = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        chunk = m.group()
        if kind == "name":
            tokens.append(Token("name", chunk, line, col))
        elif kind == "arrow":
            tokens.append(Token("arrow", chunk, line, col))
        elif kind == "punct":
            tokens.append(Token(chunk, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int


@dataclass
class DiagramDocument:
    """A parsed causal diagram: the DAG plus the role assignment.

    ``vertex_spans`` and ``edge_spans`` point back at the statement that first
    introduced each vertex or edge, for diagnostics.  Spans never take part in
    equality.
    """

    graph: MixedGraph
    roles: RoleAssignment
    vertex_spans: dict[str, SourceSpan] = field(default_factory=dict)
    edge_spans: dict[tuple[str, str], SourceSpan] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagramDocument):
            return NotImplemented
        return self.graph == other.graph and self.roles == other.roles

    def adjusted_or(self, override: frozenset[str] | None) -> frozenset[str]:
        return self.roles.adjusted if override is None else override


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.vertex_order: list[str] = []
        self.vertex_roles: dict[str, str] = {}
        self.vertex_spans: dict[str, SourceSpan] = {}
        self.edges: list[tuple[str, str]] = []
        self.edge_set: set[tuple[str, str]] = set()
        self.edge_spans: dict[tuple[str, str], SourceSpan] = {}

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.take()
        if tok.kind != kind:
            got = tok.text or "end of input"
            raise ParseError(f"expected {what}, found {got!r}", tok.line, tok.column)
        return tok

    def declare(self, name: str, span: SourceSpan) -> None:
        if name not in self.vertex_spans:
            self.vertex_order.append(name)
            self.vertex_spans[name] = span

    def run(self) -> DiagramDocument:
        head = self.expect("name", "'dag'")
        if head.text != "dag":
            raise ParseError(f"expected 'dag', found {head.text!r}", head.line, head.column)
        self.expect("{", "'{'")
        while True:
            tok = self.peek()
            if tok.kind == "}":
                self.take()
                break
            if tok.kind == "eof":
                raise ParseError("unterminated diagram, expected '}'", tok.line, tok.column)
            self.statement()
        tail = self.take()
        if tail.kind != "eof":
            raise ParseError(f"unexpected {tail.text!r} after '}}'", tail.line, tail.column)
        return self.finish()

    def statement(self) -> None:
        name_tok = self.expect("name", "a vertex name")
        span = SourceSpan(name_tok.line, name_tok.column)
        nxt = self.peek()
        if nxt.kind == "arrow":
            self.take()
            target = self.expect("name", "a vertex name after '->'")
            if target.text == name_tok.text:
                raise ParseError(
                    f"edge endpoint equals itself: {target.text!r}", target.line, target.column
                )
            self.declare(name_tok.text, span)
            self.declare(target.text, SourceSpan(target.line, target.column))
            edge = (name_tok.text, target.text)
            if edge not in self.edge_set:
                self.edge_set.add(edge)
                self.edges.append(edge)
                self.edge_spans[edge] = span
            return
        self.declare(name_tok.text, span)
        if nxt.kind == "[":
            self.take()
            while True:
                attr = self.expect("name", "a role attribute")
                if attr.text not in ROLE_NAMES:
                    raise ParseError(
                        f"unknown attribute {attr.text!r}", attr.line, attr.column
                    )
                previous = self.vertex_roles.get(name_tok.text)
                if previous is not None and previous != attr.text:
                    raise ParseError(
                        f"conflicting roles for {name_tok.text!r}: "
                        f"{previous} and {attr.text}",
                        attr.line,
                        attr.column,
                    )
                self.vertex_roles[name_tok.text] = attr.text
                sep = self.take()
                if sep.kind == "]":
                    break
                if sep.kind != ",":
                    got = sep.text or "end of input"
                    raise ParseError(f"expected ',' or ']', found {got!r}", sep.line, sep.column)

    def finish(self) -> DiagramDocument:
        graph = MixedGraph(self.vertex_order, self.edges)
        cycle_vertex = self._find_cycle_vertex(graph)
        if cycle_vertex is not None:
            span = self._cycle_span(graph, cycle_vertex)
            raise ParseError(
                f"diagram contains a directed cycle through {cycle_vertex!r}",
                span.line,
                span.column,
            )
        grouped: dict[str, set[str]] = {r: set() for r in ROLE_NAMES}
        for vertex, role in self.vertex_roles.items():
            grouped[role].add(vertex)
        roles = RoleAssignment(
            exposure=frozenset(grouped["exposure"]),
            outcome=frozenset(grouped["outcome"]),
            adjusted=frozenset(grouped["adjusted"]),
            latent=frozenset(grouped["latent"]),
        )
        return DiagramDocument(graph, roles, self.vertex_spans, self.edge_spans)

    @staticmethod
    def _find_cycle_vertex(graph: MixedGraph) -> str | None:
        from .graph import _topological_order
        from .errors import CyclicGraphError

        try:
            _topological_order(graph)
        except CyclicGraphError as err:
            return err.vertex
        return None

    def _cycle_span(self, graph: MixedGraph, vertex: str) -> SourceSpan:
        # Walk the cycle through `vertex` and report the span of one of its
        # edge statements.
        stack = [vertex]
        seen = {vertex}
        parent: dict[str, str] = {}
        target = None
        while stack:
            v = stack.pop()
            for w in graph.children(v):
                if w == vertex:
                    target = v
                    stack.clear()
                    break
                if w not in seen:
                    seen.add(w)
                    parent[w] = v
                    stack.append(w)
        if target is not None:
            span = self.edge_spans.get((target, vertex))
            if span is not None:
                return span
        return self.vertex_spans.get(vertex, SourceSpan(1, 1))


def parse(text: str) -> DiagramDocument:
    """Parse diagram source text.

    Duplicate node statements merge their attributes and duplicate identical
    edges collapse to one.  Raises :class:`ParseError` for syntax errors,
    self-loops, conflicting roles and cyclic diagrams.
    """
    return _Parser(text).run()


def serialize(doc: DiagramDocument) -> str:
    """Render a document back to source text.

    ``parse(serialize(doc))`` equals ``doc``: vertex order, edges and roles
    all round-trip.
    """
    role_of: dict[str, str] = {}
    for name in ROLE_NAMES:
        for v in getattr(doc.roles, name):
            role_of[v] = name
    lines = ["dag {"]
    for v in doc.graph.vertices:
        role = role_of.get(v)
        lines.append(f"  {v} [{role}]" if role else f"  {v}")
    for u, v in doc.graph.directed_edges:
        lines.append(f"  {u} -> {v}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# Small diagrams used throughout the test-suite and the documentation.
SAMPLES: dict[str, str] = {
    # Effect of low education (LE) on diabetes (D) with family income (FI),
    # mother's genetic risk (MR) and mother's diabetes (MD) as covariates.
    "diabetes": (
        "dag { LE [exposure] D [outcome] FI MR MD  "
        "FI->LE FI->MD MR->MD MR->D MD->D LE->D }"
    ),
    # Coffee drinking (C) and heart attacks (H), confounded by an unobserved
    # preference (U) that also drives smoking (S).
    "coffee": "dag { C [exposure] H [outcome] U [latent] S  U->C U->S S->H }",
    # Selection on admission (H) by rich parents (R) or smarts (S).
    "admission": "dag { R [exposure] S [outcome] H  R->H S->H }",
    # Straight-line mediation.
    "chain": "dag { x [exposure] y [outcome] m  x->m m->y }",
}


def load_sample(name: str) -> DiagramDocument:
    return parse(SAMPLES[name])
