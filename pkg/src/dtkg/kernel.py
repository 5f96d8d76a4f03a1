"""Minimal type-theory core for dependently typed knowledge graphs.

Entities are terms of enumerated types, edges are witnesses inhabiting
dependent relation types ``Rel subject target``, and queries are record types
with exactly one coercible answer field. Every value here is immutable;
operations that "extend" a :class:`Dtkg` return a new one.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Union

from .errors import (
    ConversionError,
    DuplicateName,
    IllTyped,
    InvalidCoercion,
    KernelTypeError,
    NameCollision,
    TypeMismatch,
    UnknownName,
)
from .naming import relation_name, term_name, type_name

# --- type expressions ----------------------------------------------------------


@dataclass(frozen=True)
class Var:
    """Reference to a record parameter or an earlier field inside a declaration."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    """A ground enum term written directly in a declaration."""

    term: str

    def __str__(self) -> str:
        return self.term


@dataclass(frozen=True)
class EnumRef:
    name: str


@dataclass(frozen=True)
class RelApp:
    relation: str
    subject: Any
    target: Any

    @property
    def args(self) -> tuple:
        return (self.subject, self.target)


@dataclass(frozen=True)
class RecApp:
    record: str
    args: tuple = ()


TypeExpr = Union[EnumRef, RelApp, RecApp]


def format_arg(a) -> str:
    return str(a)


def format_type(t: TypeExpr) -> str:
    if isinstance(t, EnumRef):
        return t.name
    if isinstance(t, RelApp):
        return f"{t.relation}({format_arg(t.subject)}, {format_arg(t.target)})"
    if isinstance(t, RecApp):
        if not t.args:
            return t.record
        return f"{t.record}({', '.join(format_arg(a) for a in t.args)})"
    raise TypeError(f"not a type expression: {t!r}")


def instantiate(t: TypeExpr, env: Mapping[str, Any]) -> TypeExpr:
    """Replace declaration-level references with the values bound in ``env``."""

    def arg(a):
        if isinstance(a, Var):
            return env[a.name]
        if isinstance(a, Const):
            return a.term
        return a

    if isinstance(t, RelApp):
        return RelApp(t.relation, arg(t.subject), arg(t.target))
    if isinstance(t, RecApp):
        return RecApp(t.record, tuple(arg(a) for a in t.args))
    return t


# --- store entities ------------------------------------------------------------


@dataclass(frozen=True)
class EnumType:
    name: str
    terms: tuple[str, ...] = ()
    iri: str | None = None
    term_iris: tuple[str, ...] = ()


@dataclass(frozen=True)
class RelType:
    name: str
    domain: str
    range: str
    iri: str | None = None


@dataclass(frozen=True)
class Witness:
    name: str
    relation: str
    subject: str
    target: str

    def __str__(self) -> str:
        return f"{self.name} : {self.relation} {self.subject} {self.target}"


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: TypeExpr
    coercible: bool = False


@dataclass(frozen=True)
class RecordType:
    name: str
    params: tuple[tuple[str, str], ...] = ()
    fields: tuple[FieldDecl, ...] = ()

    @property
    def coercible(self) -> FieldDecl | None:
        for f in self.fields:
            if f.coercible:
                return f
        return None

    def field(self, name: str) -> FieldDecl:
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(name)


@dataclass(frozen=True)
class RecordTerm:
    """An inhabitant of a record type: parameter instantiations plus one value
    per field (an enum term, a witness name, or a nested record term)."""

    record: str
    args: tuple = ()
    assignments: tuple[tuple[str, Any], ...] = ()

    def __getitem__(self, name: str):
        for k, v in self.assignments:
            if k == name:
                return v
        raise KeyError(name)

    def __str__(self) -> str:
        body = "; ".join(f"{k} := {v}" for k, v in self.assignments)
        return f"{{| {body} |}}" if body else "{| |}"


Value = Union[str, RecordTerm]


@dataclass(frozen=True)
class Dtkg:
    enums: tuple[EnumType, ...] = ()
    relations: tuple[RelType, ...] = ()
    witnesses: tuple[Witness, ...] = ()
    records: tuple[RecordType, ...] = ()
    _ix: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        types: dict[str, Any] = {}
        term_enum: dict[str, str] = {}
        term_iri: dict[str, str] = {}
        for e in self.enums:
            _fresh(types, e.name, "type")
            types[e.name] = e
            for i, t in enumerate(e.terms):
                if t in term_enum:
                    raise DuplicateName(f"term {t!r} already belongs to {term_enum[t]}")
                term_enum[t] = e.name
                if i < len(e.term_iris):
                    term_iri[t] = e.term_iris[i]
        for r in self.relations:
            _fresh(types, r.name, "type")
            for end in (r.domain, r.range):
                if not isinstance(types.get(end), EnumType):
                    raise UnknownName(f"relation {r.name} refers to unknown enum {end!r}")
            types[r.name] = r
        for q in self.records:
            _fresh(types, q.name, "type")
            types[q.name] = q
        witnesses: dict[str, Witness] = {}
        by_rel: dict[str, list[Witness]] = {r.name: [] for r in self.relations}
        for w in self.witnesses:
            _fresh(witnesses, w.name, "witness")
            _check_witness(types, term_enum, w)
            witnesses[w.name] = w
            by_rel[w.relation].append(w)
        ix = {
            "types": types,
            "term_enum": term_enum,
            "term_iri": term_iri,
            "witnesses": witnesses,
            "by_rel": {k: tuple(v) for k, v in by_rel.items()},
        }
        object.__setattr__(self, "_ix", ix)

    def _lookup(self, name: str, cls, what: str):
        found = self._ix["types"].get(name)
        if not isinstance(found, cls):
            raise UnknownName(f"unknown {what} {name!r}")
        return found

    def enum(self, name: str) -> EnumType:
        return self._lookup(name, EnumType, "enumerated type")

    def relation(self, name: str) -> RelType:
        return self._lookup(name, RelType, "relation type")

    def record(self, name: str) -> RecordType:
        return self._lookup(name, RecordType, "record type")

    def kind_of(self, name: str) -> str | None:
        found = self._ix["types"].get(name)
        return {EnumType: "enum", RelType: "relation", RecordType: "record"}.get(type(found))

    def witness(self, name: str) -> Witness:
        try:
            return self._ix["witnesses"][name]
        except KeyError:
            raise UnknownName(f"unknown witness {name!r}") from None

    def is_witness(self, name: str) -> bool:
        return name in self._ix["witnesses"]

    def witnesses_for(self, relation: str) -> tuple[Witness, ...]:
        return self._ix["by_rel"].get(relation, ())

    def enum_of(self, term: str) -> str | None:
        return self._ix["term_enum"].get(term)

    def term_iri(self, term: str) -> str | None:
        return self._ix["term_iri"].get(term)

    @property
    def term_count(self) -> int:
        return len(self._ix["term_enum"])


def _fresh(space: Mapping[str, Any], name: str, what: str) -> None:
    if name in space:
        raise DuplicateName(f"{what} name {name!r} is already declared")


def _check_witness(types, term_enum, w: Witness) -> None:
    rel = types.get(w.relation)
    if not isinstance(rel, RelType):
        raise UnknownName(f"witness {w.name} refers to unknown relation {w.relation!r}")
    for role, term, expected in (("subject", w.subject, rel.domain), ("target", w.target, rel.range)):
        actual = term_enum.get(term)
        if actual != expected:
            got = f"{term} : {actual}" if actual else f"unknown term {term!r}"
            raise KernelTypeError(f"{w.name} : {w.relation} {w.subject} {w.target}: {role} must be a {expected}, got {got}")


# --- operations ------------------------------------------------------------------


def build_dtkg(report) -> Dtkg:
    """Turn a clean conversion report into a typed store."""
    if report.diagnostics:
        raise ConversionError(report.diagnostics)
    type_ids: dict[str, str] = {}
    term_ids: dict[str, str] = {}
    witness_ids: dict[str, tuple] = {}

    def claim(space, ident, origin):
        if ident in space and space[ident] != origin:
            raise NameCollision(f"{space[ident]} and {origin} both map to identifier {ident!r}")
        space[ident] = origin
        return ident

    enums = []
    for cls, members in report.enum_types:
        name = claim(type_ids, type_name(cls), cls)
        terms = tuple(claim(term_ids, term_name(m), m) for m in members)
        enums.append(EnumType(name, terms, cls, tuple(members)))
    relations = [
        RelType(claim(type_ids, relation_name(p.name), p.name), type_name(p.domain), type_name(p.range), p.name)
        for p in report.relation_types
    ]
    witnesses = []
    for wid, rel, s, o in report.witnesses:
        claim(witness_ids, wid, (rel, s, o))
        witnesses.append(Witness(wid, relation_name(rel), term_name(s), term_name(o)))
    return Dtkg(tuple(enums), tuple(relations), tuple(witnesses))


def assert_witness(d: Dtkg, name: str, relation: str, subject: str, target: str) -> Dtkg:
    """Add one more witness; earlier witnesses of the same fact are kept."""
    if d.is_witness(name):
        raise DuplicateName(f"witness name {name!r} is already declared")
    rel = d.relation(relation)
    w = Witness(name, relation, subject, target)
    _check_witness({rel.name: rel}, d._ix["term_enum"], w)
    return replace(d, witnesses=d.witnesses + (w,))


def base_enum(d: Dtkg, record: str) -> str | None:
    """The enum reached by following coercible fields from ``record``."""
    seen = set()
    while record not in seen:
        seen.add(record)
        cf = d.record(record).coercible
        if cf is None:
            return None
        if isinstance(cf.type, EnumRef):
            return cf.type.name
        if isinstance(cf.type, RecApp):
            record = cf.type.record
            continue
        return None
    return None


def check_record_type(d: Dtkg, rt: RecordType) -> None:
    """Well-formedness of a record declaration against ``d``.

    Raises :class:`DuplicateName`, :class:`UnknownName`, :class:`IllTyped` or
    :class:`InvalidCoercion`.
    """
    if d.kind_of(rt.name) is not None:
        raise DuplicateName(f"type name {rt.name!r} is already declared")
    scope: dict[str, TypeExpr] = {}
    for pname, ptype in rt.params:
        if pname in scope:
            raise DuplicateName(f"{rt.name}: parameter {pname!r} declared twice")
        d.enum(ptype)
        scope[pname] = EnumRef(ptype)

    def arg_enum(a, path: str) -> str:
        if isinstance(a, Const):
            e = d.enum_of(a.term)
            if e is None:
                raise UnknownName(f"{path}: unknown term {a.term!r}")
            return e
        if isinstance(a, Var):
            if a.name not in scope:
                raise UnknownName(f"{path}: {a.name!r} is not a parameter or earlier field")
            t = scope[a.name]
            if isinstance(t, EnumRef):
                return t.name
            if isinstance(t, RecApp):
                e = base_enum(d, t.record)
                if e is not None:
                    return e
            raise IllTyped(path, "an enum term or coercible record", f"{a.name} : {format_type(t)}")
        raise IllTyped(path, "a parameter, field or term", repr(a))

    coercible = [f for f in rt.fields if f.coercible]
    if rt.fields and len(coercible) != 1:
        raise InvalidCoercion(f"{rt.name}: exactly one coercible field required, found {len(coercible)}")
    for f in rt.fields:
        path = f"{rt.name}.{f.name}"
        if f.name in scope:
            raise DuplicateName(f"{path}: name already used by a parameter or earlier field")
        t = f.type
        if isinstance(t, EnumRef):
            d.enum(t.name)
        elif isinstance(t, RelApp):
            rel = d.relation(t.relation)
            for a, expected in ((t.subject, rel.domain), (t.target, rel.range)):
                actual = arg_enum(a, path)
                if actual != expected:
                    raise IllTyped(path, f"{expected} argument to {rel.name}", f"{a} : {actual}")
        elif isinstance(t, RecApp):
            if t.record == rt.name:
                raise UnknownName(f"{path}: record {rt.name} refers to itself")
            sub = d.record(t.record)
            if len(t.args) != len(sub.params):
                raise IllTyped(path, f"{len(sub.params)} argument(s) to {sub.name}", str(len(t.args)))
            for a, (_, expected) in zip(t.args, sub.params):
                actual = arg_enum(a, path)
                if actual != expected:
                    raise IllTyped(path, f"{expected} argument to {sub.name}", f"{a} : {actual}")
        else:
            raise IllTyped(path, "a type expression", repr(t))
        if f.coercible:
            if isinstance(t, RelApp) or (isinstance(t, RecApp) and base_enum(d, t.record) is None):
                raise InvalidCoercion(f"{path}: coercible field must be an enum or a coercible record, not {format_type(t)}")
        scope[f.name] = t


def add_record(d: Dtkg, rt: RecordType) -> Dtkg:
    check_record_type(d, rt)
    return replace(d, records=d.records + (rt,))


def _describe(d: Dtkg, v) -> str:
    if isinstance(v, RecordTerm):
        return f"record term of {v.record}"
    if isinstance(v, str):
        if d.enum_of(v):
            return f"{v} : {d.enum_of(v)}"
        if d.is_witness(v):
            w = d.witness(v)
            return f"{v} : {w.relation}({w.subject}, {w.target})"
    return repr(v)


def _ground(d: Dtkg, v, path: str) -> str:
    if isinstance(v, RecordTerm):
        return coerce(d, v)
    if isinstance(v, str) and d.enum_of(v) is not None:
        return v
    raise IllTyped(path, "an enum term", _describe(d, v))


def check_term(d: Dtkg, t: RecordTerm, path: str | None = None) -> RecApp:
    """Type-check a record term and return its instantiated type.

    Later field types see the actual values of earlier fields, so a dependent
    field is checked against what was really assigned before it.
    """
    path = path or t.record
    if not isinstance(t, RecordTerm):
        raise IllTyped(path, "a record term", repr(t))
    try:
        rt = d.record(t.record)
    except UnknownName:
        raise IllTyped(path, "a registered record type", t.record) from None
    if len(t.args) != len(rt.params):
        raise IllTyped(path, f"{len(rt.params)} argument(s)", str(len(t.args)))
    env: dict[str, Any] = {}
    ground_args = []
    for (pname, ptype), arg in zip(rt.params, t.args):
        g = _ground(d, arg, f"{path}({pname})")
        if d.enum_of(g) != ptype:
            raise IllTyped(f"{path}({pname})", ptype, _describe(d, g))
        env[pname] = arg
        ground_args.append(g)
    names = tuple(k for k, _ in t.assignments)
    expected_names = tuple(f.name for f in rt.fields)
    if names != expected_names:
        raise IllTyped(path, f"fields {expected_names}", str(names))
    for f, (_, value) in zip(rt.fields, t.assignments):
        _check_value(d, value, instantiate(f.type, env), f"{path}.{f.name}")
        env[f.name] = value
    return RecApp(rt.name, tuple(ground_args))


def _check_value(d: Dtkg, value, expected: TypeExpr, path: str) -> None:
    if isinstance(expected, EnumRef):
        if not (isinstance(value, str) and d.enum_of(value) == expected.name):
            raise IllTyped(path, expected.name, _describe(d, value))
    elif isinstance(expected, RelApp):
        s = _ground(d, expected.subject, path)
        o = _ground(d, expected.target, path)
        want = f"{expected.relation}({s}, {o})"
        if not (isinstance(value, str) and d.is_witness(value)):
            raise IllTyped(path, want, _describe(d, value))
        w = d.witness(value)
        if (w.relation, w.subject, w.target) != (expected.relation, s, o):
            raise IllTyped(path, want, _describe(d, value))
    elif isinstance(expected, RecApp):
        want = format_type(RecApp(expected.record, tuple(_ground(d, a, path) for a in expected.args)))
        if not (isinstance(value, RecordTerm) and value.record == expected.record):
            raise IllTyped(path, want, _describe(d, value))
        actual = check_term(d, value, path)
        if format_type(actual) != want:
            raise IllTyped(path, want, format_type(actual))
    else:
        raise IllTyped(path, "a type expression", repr(expected))


def coerce(d: Dtkg, t: Value) -> str:
    """Follow coercible fields until a plain enum term is reached."""
    while isinstance(t, RecordTerm):
        cf = d.record(t.record).coercible
        if cf is None:
            raise InvalidCoercion(f"record {t.record} has no coercible field")
        t = t[cf.name]
    if isinstance(t, str) and d.enum_of(t) is not None:
        return t
    raise InvalidCoercion(f"{t!r} does not coerce to an enum term")


def eq_coerced(d: Dtkg, a: Value, b: Value) -> bool:
    ca, cb = coerce(d, a), coerce(d, b)
    ea, eb = d.enum_of(ca), d.enum_of(cb)
    if ea != eb:
        raise TypeMismatch(f"cannot compare {ca} : {ea} with {cb} : {eb}")
    return ca == cb


def eq_proof_relevant(d: Dtkg, a: RecordTerm, b: RecordTerm) -> bool:
    """Structural identity: same record, same arguments, same witnesses all the way down."""
    return a == b
