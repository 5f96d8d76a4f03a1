"""Reference evaluator for SPARQL basic graph patterns over raw triples.

Deliberately naive: patterns are joined by nested loops in the order given.
It never looks at the typed store, which is what makes it useful for
cross-checking the proof-search engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import NotTranslatable, UnboundProjection
from .kernel import Const, Dtkg, EnumRef, RecApp, RecordTerm, RelApp, Var, coerce
from .rdf import Iri, Triple


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Iri, Variable]


@dataclass(frozen=True)
class Bgp:
    patterns: tuple[tuple[PatternTerm, Iri, PatternTerm], ...]
    projection: str

    def __str__(self) -> str:
        def fmt(x):
            return str(x) if isinstance(x, Variable) else f"<{x}>"

        body = " ".join(f"{fmt(s)} {fmt(p)} {fmt(o)} ." for s, p, o in self.patterns)
        return f"SELECT ?{self.projection} WHERE {{ {body} }}"


def _variables(q: Bgp) -> set[str]:
    return {x.name for pat in q.patterns for x in pat if isinstance(x, Variable)}


def _match(pattern, triple: Triple, env: dict) -> dict | None:
    out = env
    for pat, val in zip(pattern, triple):
        if isinstance(pat, Variable):
            bound = out.get(pat.name)
            if bound is None:
                out = {**out, pat.name: val}
            elif bound != val:
                return None
        elif pat != val:
            return None
    return out


def _solutions(patterns, triples: list[Triple], env: dict) -> Iterator[dict]:
    if not patterns:
        yield env
        return
    head, rest = patterns[0], patterns[1:]
    for t in triples:
        nxt = _match(head, t, env)
        if nxt is not None:
            yield from _solutions(rest, triples, nxt)


def eval_bgp(g: Iterable[Triple], q: Bgp) -> set[Iri]:
    """Projected values of every assignment that makes all patterns triples of ``g``."""
    if q.projection not in _variables(q):
        raise UnboundProjection(f"?{q.projection} occurs in no pattern")
    triples = list(g)
    return {env[q.projection] for env in _solutions(q.patterns, triples, {})}


def goal_to_bgp(d: Dtkg, g) -> Bgp:
    """Unfold a record goal into one triple pattern per relation field.

    Enum-valued fields become fresh variables in field order; nested records
    are unfolded in place and stand for their coercible slot. The projection is
    the slot the whole goal coerces to.
    """
    target = getattr(g, "target", g)
    if not isinstance(target, RecApp):
        raise NotTranslatable("only record goals translate to graph patterns")
    counter = iter(range(1 << 30))
    patterns: list[tuple] = []
    enum_vars: list[Variable] = []

    def ground_iri(v) -> Iri:
        if isinstance(v, RecordTerm):
            v = coerce(d, v)
        if not isinstance(v, str) or d.enum_of(v) is None:
            raise NotTranslatable(f"argument {v!r} is not ground")
        iri = d.term_iri(v)
        if iri is None:
            raise NotTranslatable(f"term {v} has no source IRI")
        return iri

    def unfold(record: str, args: tuple) -> PatternTerm | None:
        rt = d.record(record)
        env: dict[str, PatternTerm] = {p: a for (p, _), a in zip(rt.params, args)}

        def slot(a) -> PatternTerm:
            if isinstance(a, Var):
                return env[a.name]
            if isinstance(a, Const):
                return ground_iri(a.term)
            return a

        for f in rt.fields:
            t = f.type
            if isinstance(t, EnumRef):
                v = Variable(f"v{next(counter)}")
                enum_vars.append(v)
                env[f.name] = v
            elif isinstance(t, RelApp):
                rel = d.relation(t.relation)
                if rel.iri is None:
                    raise NotTranslatable(f"relation {rel.name} has no source IRI")
                patterns.append((slot(t.subject), rel.iri, slot(t.target)))
            elif isinstance(t, RecApp):
                env[f.name] = unfold(t.record, tuple(slot(a) for a in t.args))
        cf = rt.coercible
        return env[cf.name] if cf is not None else None

    top = unfold(target.record, tuple(ground_iri(a) for a in target.args))
    used = {x for pat in patterns for x in pat if isinstance(x, Variable)}
    loose = [v for v in enum_vars if v not in used]
    if loose:
        raise NotTranslatable(f"{', '.join(map(str, loose))} constrained by no relation field")
    if not isinstance(top, Variable):
        raise NotTranslatable(f"{target.record} does not coerce to a variable slot")
    return Bgp(tuple(patterns), top.name)
