"""Conversion of a validated RDF graph into typed-store ingredients.

Two passes over the triples: class assertions first (each entity becomes a
term of the enumerated type named by its class), then property edges (each
becomes a fresh witness of the dependent relation type). Unlike plain RDFS,
domain and range declarations are enforced; every violation is collected as a
:class:`Diagnostic` rather than raised eagerly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SCHEMA_ERRORS, SchemaError
from .naming import relation_name, term_name
from .rdf import Iri, RdfGraph, Triple

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"


@dataclass(frozen=True)
class ClassDecl:
    name: Iri


@dataclass(frozen=True)
class PropertyDecl:
    name: Iri
    domain: Iri
    range: Iri


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    triple: Triple | None = None
    subject: Iri | None = None

    def error(self) -> SchemaError:
        return SCHEMA_ERRORS[self.kind](self)

    def __str__(self) -> str:
        text = f"{self.kind}: {self.message}"
        if self.triple is not None:
            text += f"\n    in triple {self.triple}"
        return text


@dataclass(frozen=True)
class ConversionReport:
    classes: tuple[ClassDecl, ...]
    enum_types: tuple[tuple[Iri, tuple[Iri, ...]], ...]
    relation_types: tuple[PropertyDecl, ...]
    witnesses: tuple[tuple[str, Iri, Iri, Iri], ...]
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    @property
    def term_count(self) -> int:
        return sum(len(terms) for _, terms in self.enum_types)


class _Vocabulary:
    """The handful of RDF/RDFS IRIs the conversion reacts to.

    Both the standard namespaces and whatever the source bound to ``rdf:`` and
    ``rdfs:`` are accepted, so a graph that binds ``rdf:`` to a nonstandard
    namespace still converts the way its author intended.
    """

    def __init__(self, g: RdfGraph):
        rdf = {RDF_NS, g.prefixes.get("rdf", RDF_NS)}
        rdfs = {RDFS_NS, g.prefixes.get("rdfs", RDFS_NS)}
        self.type = {ns + "type" for ns in rdf}
        self.property = {ns + "Property" for ns in rdf}
        self.cls = {ns + "Class" for ns in rdfs}
        self.domain = {ns + "domain" for ns in rdfs}
        self.range = {ns + "range" for ns in rdfs}

    def is_class_assertion(self, t: Triple) -> bool:
        return t.predicate in self.type and t.object not in self.cls and t.object not in self.property

    def is_schema(self, t: Triple) -> bool:
        if t.predicate in self.type:
            return t.object in self.cls or t.object in self.property
        return t.predicate in self.domain or t.predicate in self.range


def _unique(items):
    return list(dict.fromkeys(items))


def _extract(g: RdfGraph, vocab: _Vocabulary):
    classes = _unique(t.subject for t in g if t.predicate in vocab.type and t.object in vocab.cls)
    class_set = set(classes)
    declared = [t for t in g if t.predicate in vocab.type and t.object in vocab.property]
    props = []
    diags = []
    seen = set()
    for decl in declared:
        p = decl.subject
        if p in seen:
            continue
        seen.add(p)
        doms = _unique(t.object for t in g if t.subject == p and t.predicate in vocab.domain)
        rngs = _unique(t.object for t in g if t.subject == p and t.predicate in vocab.range)
        if not doms or not rngs:
            missing = " and ".join(w for w, v in (("domain", doms), ("range", rngs)) if not v)
            diags.append(Diagnostic("MissingDomainOrRange", f"property <{p}> has no {missing}", decl, p))
            continue
        if len(doms) > 1 or len(rngs) > 1:
            which = " and ".join(w for w, v in (("domain", doms), ("range", rngs)) if len(v) > 1)
            diags.append(Diagnostic("DuplicateDomainOrRange", f"property <{p}> declares more than one {which}", decl, p))
            continue
        bad = [c for c in (doms[0], rngs[0]) if c not in class_set]
        if bad:
            for c in _unique(bad):
                diags.append(Diagnostic("UndeclaredClass", f"property <{p}> refers to undeclared class <{c}>", decl, p))
            continue
        props.append(PropertyDecl(p, doms[0], rngs[0]))
    return [ClassDecl(c) for c in classes], props, diags, {d.subject for d in declared}


def extract_schema(g: RdfGraph) -> tuple[list[ClassDecl], list[PropertyDecl]]:
    """Classes and properties declared in ``g``; raises the first schema error found."""
    classes, props, diags, _ = _extract(g, _Vocabulary(g))
    if diags:
        raise diags[0].error()
    return classes, props


def witness_name(relation: str, subject: str, object: str, ordinal: int = 0) -> str:
    name = f"witness_{relation}_{subject}_{object}"
    return f"{name}_{ordinal}" if ordinal > 0 else name


def convert(g: RdfGraph) -> ConversionReport:
    vocab = _Vocabulary(g)
    classes, props, diags, declared_props = _extract(g, vocab)
    class_set = {c.name for c in classes}
    prop_map = {p.name: p for p in props}

    # pass 1: class assertions
    entity_classes: dict[Iri, list[Iri]] = {}
    first_extra: dict[Iri, Triple] = {}
    for t in g:
        if not vocab.is_class_assertion(t):
            continue
        if t.object not in class_set:
            diags.append(Diagnostic("UndeclaredClass", f"<{t.subject}> is typed with undeclared class <{t.object}>", t, t.subject))
            continue
        assigned = entity_classes.setdefault(t.subject, [])
        if t.object not in assigned:
            assigned.append(t.object)
            if len(assigned) == 2:
                first_extra[t.subject] = t
    for entity, assigned in entity_classes.items():
        if len(assigned) > 1:
            names = ", ".join(f"<{c}>" for c in assigned)
            diags.append(Diagnostic("MultipleClasses", f"<{entity}> is assigned several classes: {names}", first_extra[entity], entity))

    members: dict[Iri, list[Iri]] = {c: [] for c in class_set}
    for entity, assigned in entity_classes.items():
        if len(assigned) == 1:
            members[assigned[0]].append(entity)

    # pass 2: property edges
    witnesses = []
    for t in g:
        if vocab.is_schema(t) or vocab.is_class_assertion(t):
            continue
        prop = prop_map.get(t.predicate)
        if prop is None:
            why = "has an invalid declaration" if t.predicate in declared_props else "is not declared as rdf:Property"
            diags.append(Diagnostic("UndeclaredPredicate", f"predicate <{t.predicate}> {why}", t, t.predicate))
            continue
        ok = True
        for entity, expected, kind in ((t.subject, prop.domain, "DomainViolation"), (t.object, prop.range, "RangeViolation")):
            assigned = entity_classes.get(entity)
            if not assigned:
                diags.append(Diagnostic("UntypedEntity", f"<{entity}> has no class assertion", t, entity))
                ok = False
            elif len(assigned) > 1:
                ok = False
            elif assigned[0] != expected:
                role = "subject" if kind == "DomainViolation" else "object"
                diags.append(
                    Diagnostic(kind, f"{role} <{entity}> has class <{assigned[0]}> but <{t.predicate}> expects <{expected}>", t, entity)
                )
                ok = False
        if ok:
            wid = witness_name(relation_name(t.predicate), term_name(t.subject), term_name(t.object))
            witnesses.append((wid, t.predicate, t.subject, t.object))

    return ConversionReport(
        classes=tuple(classes),
        enum_types=tuple((c.name, tuple(members[c.name])) for c in classes),
        relation_types=tuple(props),
        witnesses=tuple(witnesses),
        diagnostics=tuple(diags),
    )
