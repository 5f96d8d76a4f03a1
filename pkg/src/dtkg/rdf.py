"""Turtle-subset ingestion.

Supported syntax: ``@prefix`` declarations (keyword case-insensitive), prefixed
names, ``<absolute-iri>`` references, ``;`` predicate-object lists, ``.``
terminators and ``#`` comments. Literals, blank nodes, collections and the
``a`` shorthand are not part of the subset and are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import TurtleSyntaxError, UnknownPrefix

Iri = str


class Triple(NamedTuple):
    subject: Iri
    predicate: Iri
    object: Iri

    def __str__(self) -> str:
        return f"<{self.subject}> <{self.predicate}> <{self.object}>"


@dataclass(frozen=True, eq=False)
class RdfGraph:
    """An ordered, duplicate-free set of triples plus the prefix bindings in effect
    at the end of the source."""

    triples: tuple[Triple, ...] = ()
    prefixes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        seen = dict.fromkeys(self.triples)
        object.__setattr__(self, "triples", tuple(seen))
        object.__setattr__(self, "prefixes", MappingProxyType(dict(self.prefixes)))

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __contains__(self, triple) -> bool:
        return triple in self._triple_set

    @property
    def _triple_set(self) -> frozenset:
        cached = self.__dict__.get("_set")
        if cached is None:
            cached = frozenset(self.triples)
            object.__setattr__(self, "_set", cached)
        return cached

    def __eq__(self, other) -> bool:
        if not isinstance(other, RdfGraph):
            return NotImplemented
        return self.triples == other.triples and dict(self.prefixes) == dict(other.prefixes)

    def __hash__(self) -> int:
        return hash(self.triples)


_ABSOLUTE_IRI = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:[^\s]*\Z")

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("PREFIX_KW", r"@[A-Za-z]+"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    # prefixed name or bare namespace; the local part may contain '.' but not end with it
    ("PNAME", r"(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?"),
    ("SEMI", r";"),
    ("DOT", r"\."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            snippet = source[pos : pos + 12].split("\n")[0]
            raise TurtleSyntaxError(f"unexpected text {snippet!r}", line, col, "IRI, prefixed name, ';' or '.'")
        kind = m.lastgroup
        text = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise TurtleSyntaxError(f"unexpected {found!r}", tok.line, tok.column, what)
        return self.advance()

    def parse(self) -> RdfGraph:
        while self.peek().kind != "EOF":
            if self.peek().kind == "PREFIX_KW":
                self.prefix_decl()
            else:
                self.triple_stmt()
        return RdfGraph(tuple(self.triples), self.prefixes)

    def prefix_decl(self) -> None:
        kw = self.advance()
        if kw.text.lower() != "@prefix":
            raise TurtleSyntaxError(f"unsupported directive {kw.text!r}", kw.line, kw.column, "@prefix")
        ns = self.expect("PNAME", "prefix label ending in ':'")
        if not ns.text.endswith(":"):
            raise TurtleSyntaxError(f"bad prefix label {ns.text!r}", ns.line, ns.column, "prefix label ending in ':'")
        iri = self.iriref(self.expect("IRIREF", "<IRI>"))
        # '.' is optional here: SPARQL-style declarations omit it
        if self.peek().kind == "DOT":
            self.advance()
        self.prefixes[ns.text[:-1]] = iri

    def triple_stmt(self) -> None:
        subject = self.term("subject")
        while True:
            predicate = self.term("predicate")
            obj = self.term("object")
            self.triples.append(Triple(subject, predicate, obj))
            if self.peek().kind == "SEMI":
                self.advance()
                continue
            self.expect("DOT", "';' or '.'")
            return

    def term(self, role: str) -> Iri:
        tok = self.peek()
        if tok.kind == "IRIREF":
            return self.iriref(self.advance())
        if tok.kind == "PNAME":
            self.advance()
            label, _, local = tok.text.partition(":")
            if label not in self.prefixes:
                raise UnknownPrefix(label, tok.line, tok.column)
            return self.prefixes[label] + local
        found = tok.text or "end of input"
        raise TurtleSyntaxError(f"unexpected {found!r}", tok.line, tok.column, f"{role} (IRI or prefixed name)")

    @staticmethod
    def iriref(tok: _Token) -> Iri:
        iri = tok.text[1:-1]
        if not _ABSOLUTE_IRI.match(iri):
            raise TurtleSyntaxError(f"relative or empty IRI {tok.text}", tok.line, tok.column, "absolute IRI")
        return iri


def parse_turtle(source: str) -> RdfGraph:
    """Parse Turtle-subset text into an :class:`RdfGraph`.

    Raises :class:`TurtleSyntaxError` or :class:`UnknownPrefix`; no partial
    graph is ever returned.
    """
    return _Parser(source).parse()


def triples_matching(g: RdfGraph, s: Iri | None = None, p: Iri | None = None, o: Iri | None = None) -> list[Triple]:
    return [
        t
        for t in g.triples
        if (s is None or t.subject == s) and (p is None or t.predicate == p) and (o is None or t.object == o)
    ]


_LOCAL_OK = re.compile(r"[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?\Z")


def _compact(iri: Iri, prefixes: Mapping[str, str]) -> str:
    best = None
    for label, base in prefixes.items():
        if iri.startswith(base) and (best is None or len(base) > len(prefixes[best])):
            local = iri[len(base) :]
            if local == "" or _LOCAL_OK.match(local):
                best = label
    if best is None:
        return f"<{iri}>"
    return f"{best}:{iri[len(prefixes[best]):]}"


def serialize_turtle(g: RdfGraph, prefixes: Mapping[str, str] | None = None) -> str:
    """Write one triple per statement, compacting IRIs against ``prefixes``
    (the graph's own bindings by default)."""
    prefixes = dict(g.prefixes if prefixes is None else prefixes)
    lines = [f"@prefix {label}: <{base}> ." for label, base in prefixes.items()]
    if lines:
        lines.append("")
    for t in g.triples:
        lines.append(" ".join(_compact(x, prefixes) for x in t) + " .")
    return "\n".join(lines) + ("\n" if lines else "")


def graph_from_triples(triples: Iterable[tuple[Iri, Iri, Iri]], prefixes: Mapping[str, str] | None = None) -> RdfGraph:
    return RdfGraph(tuple(Triple(*t) for t in triples), prefixes or {})
