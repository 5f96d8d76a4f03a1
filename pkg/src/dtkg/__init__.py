"""Dependently typed knowledge graphs.

Pipeline: :func:`parse_turtle` -> :func:`convert` -> :func:`build_dtkg` ->
:func:`load_queries` -> :func:`solve` / :func:`explain`.
"""

from .dsl import GoalExpr, QueryDecl, format_decl, load_queries, parse_goal, parse_program, parse_queries
from .engine import Answer, AnswerStream, Explanation, Goal, MetaVar, apply_constructor, dqt, explain, search, solve, solve_relation
from .kernel import (
    Dtkg,
    EnumRef,
    EnumType,
    RecApp,
    RecordTerm,
    RecordType,
    RelApp,
    RelType,
    Witness,
    assert_witness,
    build_dtkg,
    check_term,
    coerce,
    eq_coerced,
    eq_proof_relevant,
)
from .oracle import Bgp, Variable, eval_bgp, goal_to_bgp
from .rdf import RdfGraph, Triple, parse_turtle, serialize_turtle, triples_matching
from .schema import ConversionReport, convert, extract_schema, witness_name

__version__ = "0.1.0"
