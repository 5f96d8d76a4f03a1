import pytest

from dtkg import build_dtkg, convert, load_queries, parse_turtle
from dtkg.dsl import format_decl, format_program, parse_goal, parse_program, parse_queries
from dtkg.errors import (
    ArgumentTypeMismatch,
    ArityMismatch,
    CyclicRecord,
    DuplicateDeclaration,
    MultipleCoercibleFields,
    NoCoercibleField,
    QuerySyntaxError,
    UnknownRecord,
    UnknownTerm,
    UnknownType,
)
from dtkg.kernel import Const, EnumRef, FieldDecl, RecApp, RecordTerm, RelApp, Var

FATHER = "record Father(x: Person) { father :> Person; proof : FatherOf(x, father) }"


def test_father_declaration(base):
    [decl] = parse_queries(FATHER, base)
    assert decl.params == (("x", "Person"),)
    assert decl.record.fields == (
        FieldDecl("father", EnumRef("Person"), True),
        FieldDecl("proof", RelApp("FatherOf", Var("x"), Var("father"))),
    )


def test_constant_arguments_resolve_to_terms(base):
    [decl] = parse_queries("record FS { father :> Person; p : FatherOf(sasha, father) }", base)
    assert decl.record.fields[1].type == RelApp("FatherOf", Const("sasha"), Var("father"))


def test_family_file(family):
    rt = family.record("Father2")
    assert rt.fields == (
        FieldDecl("m", RecApp("Mother", (Var("x"),))),
        FieldDecl("f", RecApp("Husband", (Var("m"),)), True),
    )


@pytest.mark.parametrize(
    "source, error",
    [
        ("record R(x: Person) { a : Person; p : FatherOf(x, a) }", NoCoercibleField),
        ("record R { a :> Person; b :> Person }", MultipleCoercibleFields),
        ("record R { a :> R }", CyclicRecord),
        ("record R { a :> Place }", UnknownType),
        ("record R(x: Place) { a :> Person }", UnknownType),
        ("record R { a :> Person; p : FatherOf(a, nobody) }", UnknownTerm),
        ("record R { a :> Person; p : FatherOf(a) }", ArityMismatch),
        ("record R { a :> Person; a : Person }", DuplicateDeclaration),
        ("record R { barack :> Person }", DuplicateDeclaration),
        ("record Person { a :> Person }", DuplicateDeclaration),
        ("record R { p :> FatherOf(sasha, barack) }", ArgumentTypeMismatch),
        ("record R { a :> Person", QuerySyntaxError),
        ("record R { a Person }", QuerySyntaxError),
        ("query R { }", QuerySyntaxError),
        ("witness w : FatherOf(sasha, barack)", QuerySyntaxError),
        ("witness w : SisterOf(sasha, malia);", UnknownType),
        ("witness witness_FatherOf_sasha_barack : FatherOf(sasha, barack);", DuplicateDeclaration),
    ],
)
def test_declaration_errors(base, source, error):
    with pytest.raises(error):
        parse_program(source, base)


def test_syntax_error_position(base):
    with pytest.raises(QuerySyntaxError) as info:
        parse_program("record R {\n  a :> Person\n  b : Person }", base)
    assert (info.value.line, info.value.column) == (3, 3)


def test_witness_ill_typed_against_place(obama_text):
    d = build_dtkg(convert(parse_turtle(obama_text + "\nex:Place rdf:type rdfs:Class.\nex:Chicago rdf:type ex:Place.\n")))
    with pytest.raises(ArgumentTypeMismatch):
        parse_program("witness w : FatherOf(chicago, barack);", d)


def test_goal_resolution(family):
    g = parse_goal("Father(sasha)", family)
    assert g.target == RecApp("Father", ("sasha",))
    assert str(g) == "Father(sasha)" and g.bind is None
    assert parse_goal("FatherSasha", family).target == RecApp("FatherSasha", ())
    assert parse_goal("ff = Father(sasha)", family).bind == "ff"


def test_goal_errors(obama_text, family_text):
    d = build_dtkg(convert(parse_turtle(obama_text + "\nex:Place rdf:type rdfs:Class.\nex:Chicago rdf:type ex:Place.\n")))
    d = load_queries(family_text, d)
    with pytest.raises(ArgumentTypeMismatch):
        parse_goal("Father(chicago)", d)
    with pytest.raises(ArityMismatch):
        parse_goal("Father(sasha, malia)", d)
    with pytest.raises(ArityMismatch):
        parse_goal("Father", d)
    with pytest.raises(UnknownRecord):
        parse_goal("Uncle(sasha)", d)
    with pytest.raises(UnknownTerm):
        parse_goal("Father(obama)", d)
    with pytest.raises(QuerySyntaxError):
        parse_goal("Father(sasha", d)


def test_goal_accepts_bound_answer(family):
    mother = RecordTerm("Mother", ("malia",), (("mother", "michelle"), ("proof", "witness_MotherOf_malia_michelle")))
    g = parse_goal("Husband(mm)", family, {"mm": mother})
    assert g.values == (mother,)


def test_format_round_trip(base, family_text):
    program = parse_program(family_text + "witness witness_DNA : FatherOf(sasha, barack);\n", base)
    text = format_program(program)
    again = parse_program(text, base)
    assert again.records == program.records
    assert again.witnesses == program.witnesses
    assert format_decl(program.records[1]) == FATHER
