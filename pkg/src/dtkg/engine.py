"""Backward-chaining proof search over record-type goals.

Applying a record's constructor splits a goal into one subgoal per field, all
in focus at once, with metavariables standing for field values that later
subgoals mention. Relation subgoals are discharged by witness lookup and record
subgoals recursively. Search is depth-first, left to right over fields, and
witnesses are tried in declaration order, so the answer sequence is
reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping

from .errors import NotARecordGoal, NotDirectForm, UnknownName, UnknownRelation
from .kernel import (
    Dtkg,
    EnumRef,
    RecApp,
    RecordTerm,
    RelApp,
    TypeExpr,
    Witness,
    coerce,
    format_type,
    instantiate,
)

DEFAULT_DEPTH = 16


@dataclass(frozen=True)
class MetaVar:
    id: int
    name: str = field(compare=False)
    expected: Any = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class Goal:
    """Find a value of ``target``; ``hole`` is the metavariable the solution fills."""

    target: TypeExpr
    hole: MetaVar | None = None

    def __str__(self) -> str:
        if isinstance(self.target, EnumRef) and self.hole is not None:
            return f"{self.hole} : {self.target.name}"
        if isinstance(self.target, RecApp) and self.hole is not None:
            return f"{self.hole} : {format_type(self.target)}"
        return format_type(self.target)


@dataclass(frozen=True)
class Answer:
    term: RecordTerm
    witness_chain: tuple[str, ...]
    coerced: str | None = None


@dataclass(frozen=True)
class Explanation:
    label: str
    value: str | None = None
    witness: str | None = None
    children: tuple["Explanation", ...] = ()

    def leaves(self) -> list[str]:
        if not self.children:
            return [self.witness] if self.witness else ([self.value] if self.value else [])
        return [leaf for c in self.children for leaf in c.leaves()]

    def render(self, indent: str = "  ") -> str:
        return "\n".join(self._lines(0, indent))

    def _lines(self, level: int, indent: str) -> Iterator[str]:
        text = self.label
        if self.witness:
            text += f" via {self.witness}"
        elif self.value is not None:
            text += f" = {self.value}"
        yield indent * level + text
        for c in self.children:
            yield from c._lines(level + 1, indent)


class AnswerStream:
    """Lazy answer iterator; ``truncated`` becomes true once any branch is
    pruned by the depth limit."""

    def __init__(self, produce: Callable[["AnswerStream"], Iterator[Answer]]):
        self.truncated = False
        self._it = produce(self)

    def __iter__(self):
        return self

    def __next__(self) -> Answer:
        return next(self._it)


Bindings = Mapping[MetaVar, Any]


def _goal_target(g) -> TypeExpr:
    return g.target if isinstance(g, Goal) else g


def _resolve(v, b: Bindings):
    while isinstance(v, MetaVar) and v in b:
        v = b[v]
    return v


def _resolve_type(t: TypeExpr, b: Bindings) -> TypeExpr:
    if isinstance(t, RelApp):
        return RelApp(t.relation, _resolve(t.subject, b), _resolve(t.target, b))
    if isinstance(t, RecApp):
        return RecApp(t.record, tuple(_resolve(a, b) for a in t.args))
    return t


def _is_ground(v) -> bool:
    return isinstance(v, (str, RecordTerm))


def apply_constructor(d: Dtkg, g, fresh: Iterator[int] | None = None) -> tuple[list[Goal], dict[str, Any]]:
    """Split a record goal into per-field subgoals.

    Returns the subgoals in field order and the context mapping each parameter
    to its argument and each field to the metavariable standing for its value.
    """
    target = _goal_target(g)
    if not isinstance(target, RecApp):
        raise NotARecordGoal(f"{format_type(target)} is not a record goal")
    try:
        rt = d.record(target.record)
    except UnknownName as e:
        raise NotARecordGoal(str(e)) from None
    if len(target.args) != len(rt.params) or not all(_is_ground(a) for a in target.args):
        raise NotARecordGoal(f"{format_type(target)} needs {len(rt.params)} ground argument(s)")
    fresh = fresh if fresh is not None else itertools.count()
    ctx: dict[str, Any] = {p: a for (p, _), a in zip(rt.params, target.args)}
    subgoals = []
    for f in rt.fields:
        expected = instantiate(f.type, ctx)
        mv = MetaVar(next(fresh), f.name, expected)
        ctx[f.name] = mv
        subgoals.append(Goal(expected, mv))
    return subgoals, ctx


def _ground_term(d: Dtkg, v):
    """Enum term for a bound value, or None while it is still a metavariable."""
    if isinstance(v, MetaVar):
        return None
    return coerce(d, v)


def solve_relation(d: Dtkg, g, bindings: Bindings | None = None) -> Iterator[tuple[Witness, dict]]:
    """Yield every witness matching a relation goal, with the metavariable
    bindings it induces. Record-valued positions are compared by coercion."""
    bindings = bindings or {}
    target = _resolve_type(_goal_target(g), bindings)
    if not isinstance(target, RelApp):
        raise NotARecordGoal(f"{format_type(target)} is not a relation goal")
    s = _ground_term(d, target.subject)
    o = _ground_term(d, target.target)
    for w in d.witnesses_for(target.relation):
        if s is not None and w.subject != s:
            continue
        if o is not None and w.target != o:
            continue
        new = {}
        if s is None:
            new[target.subject] = w.subject
        if o is None:
            if target.target in new and new[target.target] != w.target:
                continue
            new[target.target] = w.target
        yield w, new


def witness_chain(d: Dtkg, t: RecordTerm) -> tuple[str, ...]:
    """Atomic witnesses in a term's field assignments, depth-first, deduplicated."""
    out: dict[str, None] = {}

    def walk(term: RecordTerm):
        for _, v in term.assignments:
            if isinstance(v, RecordTerm):
                walk(v)
            elif isinstance(v, str) and d.is_witness(v):
                out.setdefault(v)

    walk(t)
    return tuple(out)


def _answer(d: Dtkg, term: RecordTerm) -> Answer:
    cf = d.record(term.record).coercible
    return Answer(term, witness_chain(d, term), coerce(d, term) if cf is not None else None)


def _unbound_enum_holes(subgoals, b: Bindings) -> list[MetaVar]:
    return [g.hole for g in subgoals if isinstance(g.target, EnumRef) and g.hole not in b]


def _ground_holes(d: Dtkg, holes: list[MetaVar], b: dict) -> Iterator[dict]:
    """Enumerate assignments for enum metavariables no subgoal constrained."""
    pools = [d.enum(h.expected.name).terms for h in holes]
    for combo in itertools.product(*pools):
        yield {**b, **dict(zip(holes, combo))}


def _build_term(rt_name: str, args, subgoals, b: Bindings) -> RecordTerm:
    return RecordTerm(rt_name, tuple(args), tuple((g.hole.name, _resolve(g.hole, b)) for g in subgoals))


class _Search:
    def __init__(self, d: Dtkg, stream: AnswerStream):
        self.d = d
        self.stream = stream
        self.fresh = itertools.count()

    def record(self, target: RecApp, depth: int) -> Iterator[RecordTerm]:
        if depth <= 0:
            self.stream.truncated = True
            return
        subgoals, _ = apply_constructor(self.d, target, self.fresh)
        for b in self.discharge(subgoals, 0, {}, depth):
            yield _build_term(target.record, target.args, subgoals, b)

    def discharge(self, subgoals: list[Goal], i: int, b: dict, depth: int) -> Iterator[dict]:
        if i == len(subgoals):
            yield from _ground_holes(self.d, _unbound_enum_holes(subgoals, b), b)
            return
        g = subgoals[i]
        target = _resolve_type(g.target, b)
        if isinstance(target, EnumRef):
            # left open; a later relation subgoal or final grounding fills it
            yield from self.discharge(subgoals, i + 1, b, depth)
        elif isinstance(target, RelApp):
            for w, new in solve_relation(self.d, target):
                yield from self.discharge(subgoals, i + 1, {**b, **new, g.hole: w.name}, depth)
        else:
            open_args = [a for a in dict.fromkeys(target.args) if isinstance(a, MetaVar)]
            for gb in _ground_holes(self.d, open_args, b):
                sub = _resolve_type(target, gb)
                for term in self.record(sub, depth - 1):
                    yield from self.discharge(subgoals, i + 1, {**gb, g.hole: term}, depth)


def solve(d: Dtkg, g, depth_limit: int = DEFAULT_DEPTH) -> AnswerStream:
    """All answers to a record goal reachable within ``depth_limit`` record
    expansions, as a lazy stream."""
    target = _goal_target(g)
    if not isinstance(target, RecApp):
        raise NotARecordGoal(f"{format_type(target)} is not a record goal")
    apply_constructor(d, target)  # validates the goal eagerly

    def produce(stream: AnswerStream) -> Iterator[Answer]:
        search = _Search(d, stream)
        for term in search.record(target, depth_limit):
            yield _answer(d, term)

    return AnswerStream(produce)


def is_direct_form(d: Dtkg, record: str) -> bool:
    rt = d.record(record)
    cf = rt.coercible
    if cf is None or not isinstance(cf.type, EnumRef):
        return False
    return all(isinstance(f.type, (EnumRef, RelApp)) for f in rt.fields)


def dqt(d: Dtkg, g) -> Iterator[Answer]:
    """Direct-query tactic: apply the constructor, then close every relation
    subgoal by witness lookup."""
    target = _goal_target(g)
    if not isinstance(target, RecApp):
        raise NotARecordGoal(f"{format_type(target)} is not a record goal")
    if not is_direct_form(d, target.record):
        raise NotDirectForm(f"{target.record} has record-typed fields; use solve")
    subgoals, _ = apply_constructor(d, target)
    relations = [g for g in subgoals if isinstance(g.target, RelApp)]

    def close(k: int, b: dict):
        if k == len(relations):
            yield b
            return
        g = relations[k]
        for w, new in solve_relation(d, g, b):
            yield from close(k + 1, {**b, **new, g.hole: w.name})

    for b in close(0, {}):
        for full in _ground_holes(d, _unbound_enum_holes(subgoals, b), b):
            yield _answer(d, _build_term(target.record, target.args, subgoals, full))


def search(d: Dtkg, relation: str, subject: str | None = None, target: str | None = None) -> list[Witness]:
    """Display-style lookup: witnesses of ``relation`` matching the given ends."""
    try:
        d.relation(relation)
    except UnknownName:
        raise UnknownRelation(f"unknown relation {relation!r}") from None
    return [
        w
        for w in d.witnesses_for(relation)
        if (subject is None or w.subject == subject) and (target is None or w.target == target)
    ]


def _instance_label(d: Dtkg, term: RecordTerm) -> str:
    args = tuple(coerce(d, a) for a in term.args)
    return format_type(RecApp(term.record, args))


def explain(d: Dtkg, a: Answer | RecordTerm) -> Explanation:
    """Tree mirroring the answer term: one node per field, relation fields cite
    the witness that discharged them."""
    term = a.term if isinstance(a, Answer) else a
    return _explain_term(d, term, _instance_label(d, term))


def _explain_term(d: Dtkg, term: RecordTerm, label: str) -> Explanation:
    rt = d.record(term.record)
    env: dict[str, Any] = {p: coerce(d, v) for (p, _), v in zip(rt.params, term.args)}
    children = []
    for f, (_, value) in zip(rt.fields, term.assignments):
        ty = instantiate(f.type, env)
        if isinstance(ty, (RelApp, RecApp)):
            ty = _coerce_args(d, ty)
        head = f"{f.name} : {format_type(ty)}"
        if isinstance(value, RecordTerm):
            children.append(_explain_term(d, value, head))
            env[f.name] = coerce(d, value) if d.record(value.record).coercible else value
        elif d.is_witness(value):
            children.append(Explanation(head, value, witness=value))
            env[f.name] = value
        else:
            children.append(Explanation(head, value))
            env[f.name] = value
    value = coerce(d, term) if rt.coercible is not None else None
    return Explanation(label, value, children=tuple(children))


def _coerce_args(d: Dtkg, t):
    def c(v):
        return coerce(d, v) if isinstance(v, RecordTerm) else v

    if isinstance(t, RelApp):
        return RelApp(t.relation, c(t.subject), c(t.target))
    return RecApp(t.record, tuple(c(a) for a in t.args))
