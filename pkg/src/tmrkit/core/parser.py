"""PENMAN-style parser for TMR text.

Grammar (whitespace separated):

    node    = "(" VAR "/" CONCEPT relation* ")"
    relation = REL target
    target  = node | STRING | VAR
    VAR     = one lowercase letter followed by digits
    CONCEPT = lemma "." pos "." sense        (checked by validation, not here)
    REL     = ":" label [ "-of" ]            (label format checked by validation)
    STRING  = '"' chars '"'  with backslash escaping the next character

Hard structural problems (unbalanced brackets, missing "/", bad variable
tokens, unterminated literals, trailing garbage) raise :class:`TmrParseError`.
Recoverable problems that the grammar cannot express but a graph can still be
built around (duplicate variable definitions, extra top-level nodes) are
returned as defects on the :class:`ParseOutcome` so validation can report
them by kind.
"""

from __future__ import annotations

from dataclasses import dataclass

from tmrkit.core.model import (
    Defect,
    DefectKind,
    Edge,
    NodeRef,
    Relation,
    TmrGraph,
    classify_literal,
    is_var,
)


class TmrParseError(ValueError):
    """Raised when text cannot be parsed into a TMR graph at all."""


# Token types
_LPAREN = "("
_RPAREN = ")"
_SLASH = "/"
_STRING = "string"
_RELATION = "relation"
_ATOM = "atom"
_EOF = "eof"


@dataclass(frozen=True)
class _Token:
    type: str
    value: str
    line: int
    col: int


@dataclass(frozen=True)
class ParseOutcome:
    """A parsed graph plus the recoverable defects met along the way."""

    graph: TmrGraph
    defects: tuple[Defect, ...]


def _strip_leading_comments(text: str) -> str:
    """Drop lines starting with '#' that appear before the first content line."""
    lines = text.splitlines(keepends=True)
    out: list[str] = []
    in_body = False
    for line in lines:
        stripped = line.lstrip()
        if not in_body and stripped.startswith("#"):
            continue
        if not in_body and stripped:
            in_body = True
        out.append(line)
    return "".join(out)


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance()
            continue
        if ch == "(":
            tokens.append(_Token(_LPAREN, ch, line, col))
            advance()
            continue
        if ch == ")":
            tokens.append(_Token(_RPAREN, ch, line, col))
            advance()
            continue
        if ch == "/":
            tokens.append(_Token(_SLASH, ch, line, col))
            advance()
            continue
        if ch == '"':
            start_line, start_col = line, col
            advance()
            buf: list[str] = []
            closed = False
            while i < n:
                c = text[i]
                if c == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    advance(2)
                    continue
                if c == '"':
                    advance()
                    closed = True
                    break
                buf.append(c)
                advance()
            if not closed:
                raise TmrParseError(
                    f"line {start_line}, col {start_col}: unterminated literal"
                )
            tokens.append(_Token(_STRING, "".join(buf), start_line, start_col))
            continue
        # Atom: run of characters up to whitespace or a structural character.
        start_line, start_col = line, col
        start = i
        while i < n and not text[i].isspace() and text[i] not in '()/"':
            advance()
        value = text[start:i]
        kind = _RELATION if value.startswith(":") else _ATOM
        tokens.append(_Token(kind, value, start_line, start_col))

    tokens.append(_Token(_EOF, "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.nodes: dict[str, str] = {}
        self.edges: list[Edge] = []
        self.defects: list[Defect] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: _Token, message: str) -> TmrParseError:
        return TmrParseError(f"line {tok.line}, col {tok.col}: {message}")

    def expect(self, token_type: str, what: str) -> _Token:
        tok = self.peek()
        if tok.type != token_type:
            raise self.fail(tok, f"expected {what}, got {tok.value!r}")
        return self.take()

    def parse_node(self) -> str:
        self.expect(_LPAREN, "'('")
        var_tok = self.expect(_ATOM, "variable")
        if not is_var(var_tok.value):
            raise self.fail(var_tok, f"bad variable token {var_tok.value!r}")
        var = var_tok.value
        self.expect(_SLASH, "'/'")
        concept_tok = self.expect(_ATOM, "concept")
        if var in self.nodes:
            self.defects.append(
                Defect(DefectKind.DUPLICATE_VAR, f"variable {var} redefined")
            )
        else:
            self.nodes[var] = concept_tok.value

        while self.peek().type == _RELATION:
            rel_tok = self.take()
            relation = Relation.from_token(rel_tok.value)
            target_tok = self.peek()
            if target_tok.type == _LPAREN:
                child = self.parse_node()
                self.edges.append(Edge(var, relation, NodeRef(child)))
            elif target_tok.type == _STRING:
                self.take()
                self.edges.append(
                    Edge(var, relation, classify_literal(target_tok.value))
                )
            elif target_tok.type == _ATOM:
                self.take()
                if not is_var(target_tok.value):
                    raise self.fail(
                        target_tok, f"bad variable token {target_tok.value!r}"
                    )
                self.edges.append(Edge(var, relation, NodeRef(target_tok.value)))
            else:
                raise self.fail(
                    target_tok, f"missing target after {rel_tok.value!r}"
                )

        self.expect(_RPAREN, "')'")
        return var


def parse_document(text: str) -> ParseOutcome:
    """Parse one TMR document; tolerates duplicate vars and extra roots."""
    body = _strip_leading_comments(text)
    tokens = _lex(body)
    parser = _Parser(tokens)
    head = parser.peek()
    if head.type == _EOF:
        raise TmrParseError("empty document")
    if head.type != _LPAREN:
        raise parser.fail(head, f"expected '(', got {head.value!r}")
    root = parser.parse_node()

    trailer = parser.peek()
    if trailer.type == _LPAREN:
        parser.defects.append(
            Defect(
                DefectKind.MULTIPLE_ROOTS,
                f"second top-level node at line {trailer.line}",
            )
        )
    elif trailer.type != _EOF:
        raise parser.fail(trailer, f"trailing content {trailer.value!r}")

    graph = TmrGraph(
        root=root,
        nodes=parser.nodes,
        edges=tuple(parser.edges),
        source_span=text,
    )
    return ParseOutcome(graph, tuple(parser.defects))


def parse_tmr(text: str) -> TmrGraph:
    """Parse TMR text into a graph.

    Raises :class:`TmrParseError` on structural failure.  Recoverable
    defects (duplicate variables, extra roots) do not raise; run
    :func:`tmrkit.core.validate.validate` to obtain the full verdict.
    """
    return parse_document(text).graph
