"""Command-line entry point.

Exit status depends only on the outcome class:

    0  success
    1  the graph violates its schema (conversion diagnostics)
    2  a source file could not be read or parsed
    3  the goal has no answers
    4  the goal or query file could not be resolved (unknown names, bad arity,
       answer index out of range, ...)
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from . import __version__
from .dsl import parse_goal, parse_program
from .engine import DEFAULT_DEPTH, Answer, explain, search, solve
from .errors import DtkgError, EngineError, OracleError, ParseError, QueryError
from .kernel import Dtkg, EnumRef, RecApp, RecordTerm, RelApp, build_dtkg, coerce, format_type
from .oracle import eval_bgp, goal_to_bgp
from .rdf import RdfGraph, parse_turtle
from .schema import convert

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_NO_ANSWER = 3
EXIT_QUERY = 4


class CommandFailed(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


@dataclass(frozen=True)
class SessionConfig:
    graph: Path
    queries: Path | None = None
    depth: int = DEFAULT_DEPTH
    format: str = "text"
    all_answers: bool = False

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth limit must be >= 0")
        if self.format not in ("text", "json-lines"):
            raise ValueError(f"unknown output format {self.format!r}")


def _read(path: Path | str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise CommandFailed(EXIT_PARSE, f"cannot read {path}: {e}") from None


def _parse_graph(path) -> RdfGraph:
    try:
        return parse_turtle(_read(path))
    except ParseError as e:
        raise CommandFailed(EXIT_PARSE, f"{path}:{e}") from None


def _plural(n: int, word: str, plural: str | None = None) -> str:
    return f"{n} {word if n == 1 else (plural or word + 's')}"


def _load_store(path) -> Dtkg:
    report = convert(_parse_graph(path))
    if report.diagnostics:
        lines = [f"{path}: {_plural(len(report.diagnostics), 'schema error')}"]
        lines += [f"error: {diag}" for diag in report.diagnostics]
        raise CommandFailed(EXIT_INVALID, "\n".join(lines))
    try:
        return build_dtkg(report)
    except DtkgError as e:
        raise CommandFailed(EXIT_INVALID, f"{path}: {e}") from None


def _load_session(cfg: SessionConfig) -> Dtkg:
    d = _load_store(cfg.graph)
    if cfg.queries is not None:
        try:
            d = parse_program(_read(cfg.queries), d).dtkg
        except ParseError as e:
            raise CommandFailed(EXIT_PARSE, f"{cfg.queries}:{e}") from None
        except DtkgError as e:
            raise CommandFailed(EXIT_QUERY, f"{cfg.queries}:{e}") from None
    return d


# --- rendering -------------------------------------------------------------------


def _value_json(v):
    if isinstance(v, RecordTerm):
        return {
            "record": v.record,
            "args": [_value_json(a) for a in v.args],
            "assignments": {k: _value_json(x) for k, x in v.assignments},
        }
    return v


def _instance_type(d: Dtkg, term: RecordTerm) -> str:
    return format_type(RecApp(term.record, tuple(coerce(d, a) for a in term.args)))


def render_answer_text(d: Dtkg, a: Answer, n: int) -> str:
    lines = [f"answer {n}: {a.term} : {_instance_type(d, a.term)}"]
    if a.coerced is not None:
        lines.append(f"  coerced: {a.coerced}")
    lines.append(f"  witnesses: {', '.join(a.witness_chain) if a.witness_chain else '(none)'}")
    return "\n".join(lines)


def render_answer_json(goal: str, a: Answer, truncated: bool) -> str:
    obj = {
        "goal": goal,
        "coerced": a.coerced,
        "assignments": {k: _value_json(v) for k, v in a.term.assignments},
        "witness_chain": list(a.witness_chain),
        "truncated": truncated,
    }
    return json.dumps(obj, ensure_ascii=False)


def emit_coq(d: Dtkg) -> str:
    """Render the store in proof-assistant surface syntax."""
    sections = []
    enums = [
        f"Inductive {e.name} := {' | '.join(e.terms)}." if e.terms else f"Inductive {e.name} := ."
        for e in d.enums
    ]
    if enums:
        sections.append("\n".join(enums))
    rels = []
    for r in d.relations:
        head = f"Inductive {r.name} : {r.domain} -> {r.range} -> Type :="
        ws = d.witnesses_for(r.name)
        if not ws:
            rels.append(head + " .")
            continue
        body = [f"  | {w.name} : {r.name} {w.subject} {w.target}" for w in ws]
        body[-1] += "."
        rels.append("\n".join([head, *body]))
    if rels:
        sections.append("\n".join(rels))
    if d.records:
        sections.append("\n".join(_coq_record(rt) for rt in d.records))
    return "\n\n".join(sections) + "\n" if sections else ""


def _coq_record(rt) -> str:
    params = "".join(f" ({p} : {t})" for p, t in rt.params)

    def ty(t):
        if isinstance(t, EnumRef):
            return t.name
        if isinstance(t, RelApp):
            return f"{t.relation} {t.subject} {t.target}"
        return " ".join([t.record, *map(str, t.args)])

    fields = "; ".join(f"{f.name} {':>' if f.coercible else ':'} {ty(f.type)}" for f in rt.fields)
    return f"Record {rt.name}{params} := {{ {fields} }}."


# --- commands ----------------------------------------------------------------------


def cmd_check(graph: Path | str, out: TextIO) -> int:
    g = _parse_graph(graph)
    report = convert(g)
    for diag in report.diagnostics:
        print(f"error: {diag}", file=out)
    summary = ", ".join(
        [
            _plural(len(report.classes), "class", "classes"),
            _plural(len(report.relation_types), "property", "properties"),
            _plural(report.term_count, "term"),
            _plural(len(report.witnesses), "witness", "witnesses"),
        ]
    )
    if report.diagnostics:
        print(f"FAILED: {_plural(len(report.diagnostics), 'schema error')} ({summary})", file=out)
        return EXIT_INVALID
    try:
        build_dtkg(report)
    except DtkgError as e:
        print(f"error: {e}", file=out)
        return EXIT_INVALID
    print(f"ok: {summary}", file=out)
    return EXIT_OK


def _run_goals(d: Dtkg, cfg: SessionConfig, goals: list[str]):
    """Solve goals in order; a goal written ``name = Goal(...)`` makes its first
    answer available as an argument to later goals."""
    bound: dict[str, RecordTerm] = {}
    results = []
    for text in goals:
        try:
            ge = parse_goal(text, d, bound)
        except ParseError as e:
            raise CommandFailed(EXIT_PARSE, f"goal {text!r}: {e}") from None
        except QueryError as e:
            raise CommandFailed(EXIT_QUERY, f"goal {text!r}: {e}") from None
        stream = solve(d, ge.target, cfg.depth)
        if cfg.all_answers:
            answers = list(stream)
        else:
            first = next(stream, None)
            answers = [first] if first is not None else []
        if ge.bind and answers:
            bound[ge.bind] = answers[0].term
        results.append((ge, answers, stream.truncated))
    return results


def cmd_query(cfg: SessionConfig, goals: list[str] | str, out: TextIO) -> int:
    goals = [goals] if isinstance(goals, str) else list(goals)
    d = _load_session(cfg)
    results = _run_goals(d, cfg, goals)
    missing = False
    for ge, answers, truncated in results:
        if cfg.format == "json-lines":
            for a in answers:
                print(render_answer_json(str(ge), a, truncated), file=out)
        else:
            print(f"goal {ge}", file=out)
            for n, a in enumerate(answers, 1):
                print(render_answer_text(d, a, n), file=out)
            if not answers:
                print("  no answers", file=out)
            if truncated:
                print(f"  (search truncated at depth {cfg.depth})", file=out)
        missing = missing or not answers
    return EXIT_NO_ANSWER if missing else EXIT_OK


def cmd_explain(cfg: SessionConfig, goals: list[str] | str, index: int, out: TextIO) -> int:
    goals = [goals] if isinstance(goals, str) else list(goals)
    d = _load_session(cfg)
    cfg_all = SessionConfig(cfg.graph, cfg.queries, cfg.depth, cfg.format, True)
    ge, answers, _ = _run_goals(d, cfg_all, goals)[-1]
    if not answers:
        print(f"goal {ge}: no answers", file=out)
        return EXIT_NO_ANSWER
    if not 0 <= index < len(answers):
        raise CommandFailed(EXIT_QUERY, f"IndexOutOfRange: answer index {index} but {ge} has {_plural(len(answers), 'answer')}")
    print(explain(d, answers[index]).render(), file=out)
    return EXIT_OK


def cmd_emit_coq(graph: Path | str, out_path: Path | str, queries: Path | str | None = None) -> int:
    d = _load_store(graph)
    if queries is not None:
        d = _load_session(SessionConfig(Path(graph), Path(queries)))
    try:
        Path(out_path).write_text(emit_coq(d), encoding="utf-8")
    except OSError as e:
        raise CommandFailed(EXIT_PARSE, f"cannot write {out_path}: {e}") from None
    return EXIT_OK


_PATTERN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*,\s*([A-Za-z_][A-Za-z0-9_']*)\s*\)\s*\Z")


def cmd_search(graph: Path | str, pattern: str, out: TextIO) -> int:
    d = _load_store(graph)
    m = _PATTERN.match(pattern)
    if not m:
        raise CommandFailed(EXIT_PARSE, f"bad search pattern {pattern!r}; expected Rel(a, b) with '_' wildcards")
    rel, s, o = m.groups()
    try:
        hits = search(d, rel, None if s == "_" else s, None if o == "_" else o)
    except EngineError as e:
        raise CommandFailed(EXIT_QUERY, str(e)) from None
    for w in hits:
        print(f"{w.name}: {w.relation} {w.subject} {w.target}", file=out)
    return EXIT_OK if hits else EXIT_NO_ANSWER


def cmd_bgp(cfg: SessionConfig, goal: str, out: TextIO) -> int:
    """Debug aid: show the graph pattern a goal unfolds to and compare results."""
    g = _parse_graph(cfg.graph)
    d = _load_session(cfg)
    try:
        ge = parse_goal(goal, d)
        q = goal_to_bgp(d, ge.target)
    except ParseError as e:
        raise CommandFailed(EXIT_PARSE, str(e)) from None
    except (QueryError, OracleError) as e:
        raise CommandFailed(EXIT_QUERY, str(e)) from None
    oracle = sorted(eval_bgp(g, q))
    engine = sorted({d.term_iri(a.coerced) for a in solve(d, ge.target, cfg.depth)})
    print(q, file=out)
    print(f"oracle: {' '.join(oracle) or '(none)'}", file=out)
    print(f"engine: {' '.join(engine) or '(none)'}", file=out)
    print("agree" if oracle == engine else "DISAGREE", file=out)
    return EXIT_OK if oracle == engine else EXIT_INVALID


# --- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtkg", description="Typed knowledge graphs with witness-backed queries.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def session(p, goal=True, multi=True):
        p.add_argument("--graph", required=True, type=Path, help="Turtle file")
        p.add_argument("--queries", type=Path, help=".dq query-definition file")
        if goal:
            p.add_argument("--goal", required=True, action="append" if multi else "store",
                           help="goal such as 'Father(sasha)'; repeat to chain bound goals")
        p.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="record expansion limit (default %(default)s)")

    p = sub.add_parser("check", help="validate a graph against its domain/range declarations")
    p.add_argument("--graph", required=True, type=Path)

    p = sub.add_parser("query", help="answer goals")
    session(p)
    p.add_argument("--all", action="store_true", help="enumerate every answer instead of the first")
    p.add_argument("--format", choices=("text", "json-lines"), default="text")

    p = sub.add_parser("explain", help="print the witness tree behind one answer")
    session(p)
    p.add_argument("--index", type=int, default=0, help="answer index (0-based)")

    p = sub.add_parser("emit-coq", help="write the typed store in proof-assistant syntax")
    p.add_argument("--graph", required=True, type=Path)
    p.add_argument("--queries", type=Path, help="also emit records and extra witnesses")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("search", help="list witnesses matching Rel(a, b); '_' is a wildcard")
    p.add_argument("--graph", required=True, type=Path)
    p.add_argument("--pattern", required=True)

    p = sub.add_parser("bgp", help="compare a goal against the graph-pattern oracle")
    session(p, multi=False)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args.graph, out)
        if args.command == "emit-coq":
            return cmd_emit_coq(args.graph, args.out, args.queries)
        if args.command == "search":
            return cmd_search(args.graph, args.pattern, out)
        try:
            cfg = SessionConfig(args.graph, args.queries, args.depth, getattr(args, "format", "text"), getattr(args, "all", False))
        except ValueError as e:
            raise CommandFailed(EXIT_PARSE, str(e)) from None
        if args.command == "query":
            return cmd_query(cfg, args.goal, out)
        if args.command == "explain":
            return cmd_explain(cfg, args.goal, args.index, out)
        return cmd_bgp(cfg, args.goal, out)
    except CommandFailed as e:
        print(e.message, file=err)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
