"""Parser for ``.dq`` query-definition files and goal expressions.

A query file holds record declarations and, optionally, extra witness
declarations::

    # who is x's father?
    record Father(x: Person) { father :> Person; proof : FatherOf(x, father) }
    record Father2(x: Person) { m : Mother(x); f :> Husband(m) }
    witness witness_DNA : FatherOf(sasha, barack);

Names inside a field type resolve against earlier fields, then parameters,
then enum terms of the store. Goals look like ``Father(sasha)``, optionally
bound for reuse: ``mm = Mother(malia)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from .errors import (
    ArgumentTypeMismatch,
    ArityMismatch,
    CyclicRecord,
    DuplicateDeclaration,
    DuplicateName,
    IllTyped,
    InvalidCoercion,
    KernelError,
    KernelTypeError,
    MultipleCoercibleFields,
    NoCoercibleField,
    QueryError,
    QuerySyntaxError,
    UnknownName,
    UnknownRecord,
    UnknownTerm,
    UnknownType,
)
from .kernel import (
    Const,
    Dtkg,
    EnumRef,
    FieldDecl,
    RecApp,
    RecordTerm,
    RecordType,
    RelApp,
    Var,
    add_record,
    assert_witness,
    coerce,
)

_TOKEN_RE = re.compile(
    r"(?P<WS>[ \t\r\n]+)|(?P<COMMENT>#[^\n]*)|(?P<COERCE>:>)|(?P<NAME>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<PUNCT>[(){},;:=])"
)


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise QuerySyntaxError(f"unexpected character {source[pos]!r}", line, col)
        kind, text = m.lastgroup, m.group()
        if kind == "PUNCT":
            kind = text
        elif kind == "COERCE":
            kind = ":>"
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, text, line, col))
        if "\n" in text:
            line += text.count("\n")
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, pos - line_start + 1))
    return tokens


# --- syntax trees ------------------------------------------------------------------


@dataclass(frozen=True)
class TypeSyntax:
    head: str
    args: tuple[str, ...] | None = None  # None: bare name, () : explicit empty list

    def __str__(self) -> str:
        if self.args is None:
            return self.head
        return f"{self.head}({', '.join(self.args)})"


@dataclass(frozen=True)
class FieldSyntax:
    name: str
    coercible: bool
    type: TypeSyntax


@dataclass(frozen=True)
class QueryDecl:
    name: str
    params: tuple[tuple[str, str], ...]
    fields: tuple[FieldSyntax, ...]
    record: RecordType | None = field(default=None, compare=False, repr=False)
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class WitnessDecl:
    name: str
    relation: str
    subject: str
    target: str
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    records: tuple[QueryDecl, ...]
    witnesses: tuple[WitnessDecl, ...]
    dtkg: Dtkg


@dataclass(frozen=True)
class GoalExpr:
    """A resolved goal: record name plus argument values.

    ``values`` holds enum terms or previously computed record terms; ``args``
    keeps the names as written.
    """

    record: str
    args: tuple[str, ...]
    values: tuple = ()
    bind: str | None = None

    @property
    def target(self) -> RecApp:
        return RecApp(self.record, self.values)

    def __str__(self) -> str:
        return f"{self.record}({', '.join(self.args)})" if self.args else self.record


# --- parsing ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise QuerySyntaxError(f"unexpected {found!r}", tok.line, tok.column, what or repr(kind))
        return self.advance()

    def accept(self, kind: str) -> bool:
        if self.peek().kind == kind:
            self.advance()
            return True
        return False

    def name_list(self, close: str) -> tuple[str, ...]:
        names = []
        if self.peek().kind != close:
            names.append(self.expect("NAME", "name").text)
            while self.accept(","):
                names.append(self.expect("NAME", "name").text)
        self.expect(close)
        return tuple(names)

    def type_expr(self) -> TypeSyntax:
        head = self.expect("NAME", "type name").text
        if self.accept("("):
            return TypeSyntax(head, self.name_list(")"))
        return TypeSyntax(head)

    def statements(self):
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind == "NAME" and tok.text == "record":
                yield self.record_decl()
            elif tok.kind == "NAME" and tok.text == "witness":
                yield self.witness_decl()
            else:
                raise QuerySyntaxError(f"unexpected {tok.text!r}", tok.line, tok.column, "'record' or 'witness'")

    def record_decl(self) -> tuple[QueryDecl, list[_Token]]:
        start = self.advance()
        name_tok = self.expect("NAME", "record name")
        params = []
        if self.accept("("):
            if self.peek().kind != ")":
                while True:
                    pname = self.expect("NAME", "parameter name").text
                    self.expect(":", "':'")
                    params.append((pname, self.expect("NAME", "parameter type").text))
                    if not self.accept(","):
                        break
            self.expect(")", "',' or ')'")
        self.expect("{", "'{'")
        fields = []
        positions = []
        while self.peek().kind != "}":
            ftok = self.expect("NAME", "field name or '}'")
            sep = self.peek()
            if sep.kind not in (":", ":>"):
                raise QuerySyntaxError(f"unexpected {sep.text or 'end of input'!r}", sep.line, sep.column, "':' or ':>'")
            self.advance()
            fields.append(FieldSyntax(ftok.text, sep.kind == ":>", self.type_expr()))
            positions.append(ftok)
            if not self.accept(";"):
                break
        self.expect("}", "';' or '}'")
        decl = QueryDecl(name_tok.text, tuple(params), tuple(fields), line=start.line)
        return decl, [name_tok, *positions]

    def witness_decl(self) -> tuple[WitnessDecl, _Token]:
        start = self.advance()
        name = self.expect("NAME", "witness name")
        self.expect(":", "':'")
        rel = self.expect("NAME", "relation name").text
        self.expect("(", "'('")
        s = self.expect("NAME", "subject term").text
        self.expect(",", "','")
        o = self.expect("NAME", "target term").text
        self.expect(")", "')'")
        self.expect(";", "';'")
        return WitnessDecl(name.text, rel, s, o, line=start.line), name

    def goal(self) -> tuple[str | None, str, tuple[str, ...] | None, _Token]:
        bind = None
        if self.peek().kind == "NAME" and self.peek(1).kind == "=":
            bind = self.advance().text
            self.advance()
        head = self.expect("NAME", "record name")
        args = self.name_list(")") if self.accept("(") else None
        self.expect("EOF", "end of goal")
        return bind, head.text, args, head


def _resolve(decl: QueryDecl, d: Dtkg, toks: list) -> RecordType:
    name_tok = toks[0]

    def fail(cls, msg, tok=name_tok):
        raise cls(f"{decl.name}: {msg}", tok.line, tok.column)

    kind = d.kind_of(decl.name)
    if kind is not None:
        fail(DuplicateDeclaration, f"name is already declared as a {kind} type")
    scope: dict[str, str] = {}
    params = []
    for pname, ptype in decl.params:
        if pname in scope:
            fail(DuplicateDeclaration, f"parameter {pname!r} declared twice")
        if d.kind_of(ptype) != "enum":
            fail(UnknownType, f"parameter type {ptype!r} is not an enumerated type")
        scope[pname] = "param"
        params.append((pname, ptype))

    coercible = [f.name for f in decl.fields if f.coercible]
    if decl.fields and not coercible:
        fail(NoCoercibleField, "no field is marked ':>'")
    if len(coercible) > 1:
        fail(MultipleCoercibleFields, f"several fields are marked ':>': {', '.join(coercible)}")

    fields = []
    for f, tok in zip(decl.fields, toks[1:]):
        if f.name in scope:
            fail(DuplicateDeclaration, f"field {f.name!r} redeclares an earlier name", tok)
        if d.enum_of(f.name) is not None:
            fail(DuplicateDeclaration, f"field {f.name!r} shadows an enum term", tok)

        def arg(a: str):
            if a in scope:
                return Var(a)
            if d.enum_of(a) is not None:
                return Const(a)
            fail(UnknownTerm, f"{a!r} is not an earlier field, a parameter or a known term", tok)

        head, args = f.type.head, f.type.args or ()
        if head == decl.name:
            fail(CyclicRecord, f"field {f.name!r} refers to the record being declared", tok)
        kind = d.kind_of(head)
        if kind == "enum":
            if args:
                fail(ArityMismatch, f"enumerated type {head} takes no arguments", tok)
            t = EnumRef(head)
        elif kind == "relation":
            if len(args) != 2:
                fail(ArityMismatch, f"relation {head} takes 2 arguments, got {len(args)}", tok)
            t = RelApp(head, arg(args[0]), arg(args[1]))
        elif kind == "record":
            want = len(d.record(head).params)
            if len(args) != want:
                fail(ArityMismatch, f"record {head} takes {want} argument(s), got {len(args)}", tok)
            t = RecApp(head, tuple(arg(a) for a in args))
        else:
            fail(UnknownType, f"unknown type {head!r}", tok)
        fields.append(FieldDecl(f.name, t, f.coercible))
        scope[f.name] = "field"
    return RecordType(decl.name, tuple(params), tuple(fields))


def parse_program(source: str, d: Dtkg) -> Program:
    """Parse a query file; declarations are registered in order, so later ones
    may use earlier records and witnesses."""
    records, witnesses = [], []
    for item, pos in _Parser(source).statements():
        if isinstance(item, QueryDecl):
            rt = _resolve(item, d, pos)
            try:
                d = add_record(d, rt)
            except (IllTyped, InvalidCoercion) as e:
                raise ArgumentTypeMismatch(f"{item.name}: {e}", pos[0].line, pos[0].column) from e
            except KernelError as e:
                raise QueryError(f"{item.name}: {e}", pos[0].line, pos[0].column) from e
            records.append(QueryDecl(item.name, item.params, item.fields, rt, item.line))
        else:
            try:
                d = assert_witness(d, item.name, item.relation, item.subject, item.target)
            except UnknownName as e:
                raise UnknownType(str(e), pos.line, pos.column) from e
            except DuplicateName as e:
                raise DuplicateDeclaration(str(e), pos.line, pos.column) from e
            except KernelTypeError as e:
                raise ArgumentTypeMismatch(str(e), pos.line, pos.column) from e
            witnesses.append(item)
    return Program(tuple(records), tuple(witnesses), d)


def parse_queries(source: str, d: Dtkg) -> list[QueryDecl]:
    return list(parse_program(source, d).records)


def load_queries(source: str, d: Dtkg) -> Dtkg:
    """Parse a query file and return ``d`` extended with its records and witnesses."""
    return parse_program(source, d).dtkg


def format_decl(decl: QueryDecl) -> str:
    params = ", ".join(f"{p}: {t}" for p, t in decl.params)
    head = f"record {decl.name}({params})" if decl.params else f"record {decl.name}"
    body = "; ".join(f"{f.name} {':>' if f.coercible else ':'} {f.type}" for f in decl.fields)
    return f"{head} {{ {body} }}" if body else f"{head} {{ }}"


def format_program(program: Program) -> str:
    lines = [format_decl(r) for r in program.records]
    lines += [f"witness {w.name} : {w.relation}({w.subject}, {w.target});" for w in program.witnesses]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_goal(source: str, d: Dtkg, answers: Mapping[str, RecordTerm] | None = None) -> GoalExpr:
    """Parse and resolve a goal such as ``Father(sasha)``.

    An argument may name an entry of ``answers`` (a previously computed record
    term); it is accepted when it coerces to the parameter's type.
    """
    answers = answers or {}
    bind, head, args, tok = _Parser(source).goal()
    args = args or ()
    if d.kind_of(head) != "record":
        raise UnknownRecord(f"unknown record {head!r}", tok.line, tok.column)
    rt = d.record(head)
    if len(args) != len(rt.params):
        raise ArityMismatch(f"{head} takes {len(rt.params)} argument(s), got {len(args)}", tok.line, tok.column)
    values = []
    for a, (pname, ptype) in zip(args, rt.params):
        if a in answers:
            v = answers[a]
            try:
                ground = coerce(d, v)
            except KernelError:
                raise ArgumentTypeMismatch(f"{a!r} does not coerce to an enum term", tok.line, tok.column) from None
        elif d.enum_of(a) is not None:
            v = ground = a
        else:
            raise UnknownTerm(f"unknown term {a!r}", tok.line, tok.column)
        actual = d.enum_of(ground)
        if actual != ptype:
            raise ArgumentTypeMismatch(f"{head}: parameter {pname} expects {ptype}, got {a} : {actual}", tok.line, tok.column)
        values.append(v)
    return GoalExpr(head, tuple(args), tuple(values), bind)
