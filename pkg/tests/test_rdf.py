import pytest

from dtkg.errors import TurtleSyntaxError, UnknownPrefix
from dtkg.rdf import RdfGraph, Triple, parse_turtle, serialize_turtle, triples_matching

EX = "http://example.org/"
FOAF = "http://xmlns.com/foaf/0.1/"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"

# The sample graph with every ';' list expanded by hand, in source order.
OBAMA_EXPANDED = [
    ("Person", FOAF + "type", RDFS + "Class"),
    ("father", FOAF + "type", FOAF + "Property"),
    ("father", RDFS + "domain", EX + "Person"),
    ("father", RDFS + "range", EX + "Person"),
    ("mother", FOAF + "type", FOAF + "Property"),
    ("mother", RDFS + "domain", EX + "Person"),
    ("mother", RDFS + "range", EX + "Person"),
    ("husband", FOAF + "type", FOAF + "Property"),
    ("husband", RDFS + "domain", EX + "Person"),
    ("husband", RDFS + "range", EX + "Person"),
    ("Barack", FOAF + "type", EX + "Person"),
    ("Michelle", FOAF + "type", EX + "Person"),
    ("Michelle", EX + "husband", EX + "Barack"),
    ("Malia", FOAF + "type", EX + "Person"),
    ("Malia", EX + "mother", EX + "Michelle"),
    ("Sasha", FOAF + "type", EX + "Person"),
    ("Sasha", EX + "father", EX + "Barack"),
]


def test_obama_expands_to_17_triples(obama):
    expected = [Triple(EX + s, p, o) for s, p, o in OBAMA_EXPANDED]
    assert len(expected) == 17
    assert list(obama.triples) == expected


def test_obama_contains_family_edges(obama):
    assert Triple(EX + "Michelle", EX + "husband", EX + "Barack") in obama
    assert Triple(EX + "Malia", EX + "mother", EX + "Michelle") in obama


def test_obama_prefixes_are_opaque(obama):
    # the sample binds rdf: to FOAF; the parser keeps that as written
    assert obama.prefixes["rdf"] == FOAF
    assert set(obama.prefixes) == {"ex", "rdf", "rdfs"}


def test_empty_source():
    g = parse_turtle("")
    assert len(g) == 0 and dict(g.prefixes) == {}


def test_comments_only():
    assert len(parse_turtle("# nothing here\n   # still nothing\n")) == 0


def test_undeclared_prefix():
    with pytest.raises(UnknownPrefix) as info:
        parse_turtle("ex:A rdf:type ex:B .")
    assert info.value.prefix == "ex"
    assert (info.value.line, info.value.column) == (1, 1)


@pytest.mark.parametrize(
    "source, line, column",
    [
        ("@prefix ex: <http://e/> .\nex:a ex:b .", 2, 11),
        ("@prefix ex: <http://e/> .\nex:a ex:b ex:c", 2, 15),
        ("@prefix ex: <http://e/> .\nex:a a ex:c .", 2, 6),
        ('@prefix ex: <http://e/> .\nex:a ex:b "literal" .', 2, 11),
        ("@prefix ex: <http://e/> .\n_:b ex:b ex:c .", 2, 1),
        ("@base <http://e/> .", 1, 1),
        ("<relative> <http://e/p> <http://e/o> .", 1, 1),
        ("@prefix ex <http://e/> .", 1, 9),
    ],
)
def test_syntax_errors_carry_position(source, line, column):
    with pytest.raises(TurtleSyntaxError) as info:
        parse_turtle(source)
    assert (info.value.line, info.value.column) == (line, column)


def test_error_names_expected_token():
    with pytest.raises(TurtleSyntaxError) as info:
        parse_turtle("<http://e/s> <http://e/p> <http://e/o> <http://e/x> .")
    assert info.value.expected == "';' or '.'"


def test_prefix_keyword_case_insensitive_and_iriref_form():
    g = parse_turtle("@Prefix e: <http://e/> .\n<http://e/a> e:p e:b .")
    assert g.triples == (Triple("http://e/a", "http://e/p", "http://e/b"),)


def test_prefix_redeclaration_shadows_from_that_point():
    src = "@prefix e: <http://one/> .\ne:a e:p e:b .\n@prefix e: <http://two/> .\ne:a e:p e:b ."
    g = parse_turtle(src)
    assert [t.subject for t in g] == ["http://one/a", "http://two/a"]
    assert g.prefixes["e"] == "http://two/"


def test_duplicates_collapse_keeping_first_position():
    g = parse_turtle("@prefix e: <http://e/> .\ne:a e:p e:b ; e:p e:c .\ne:a e:p e:b .")
    assert [t.object for t in g] == ["http://e/b", "http://e/c"]


def test_local_name_with_inner_dot():
    g = parse_turtle("@prefix e: <http://e/> .\ne:a.b e:p e:c.")
    assert g.triples[0].subject == "http://e/a.b"
    assert g.triples[0].object == "http://e/c"


def test_triples_matching_examples(obama):
    hits = triples_matching(obama, s=EX + "Sasha", p=EX + "father")
    assert hits == [Triple(EX + "Sasha", EX + "father", EX + "Barack")]
    typed = triples_matching(obama, p=FOAF + "type", o=EX + "Person")
    assert {t.subject for t in typed} == {EX + n for n in ("Barack", "Michelle", "Malia", "Sasha")}
    assert len(typed) == 4
    assert triples_matching(RdfGraph()) == []
    assert triples_matching(obama) == list(obama.triples)


def test_serialize_round_trip(obama):
    text = serialize_turtle(obama)
    assert ";" not in text
    again = parse_turtle(text)
    assert set(again.triples) == set(obama.triples)


def test_serialize_falls_back_to_iriref():
    g = RdfGraph((Triple("http://e/a", "http://e/p", "urn:x:y"),), {"e": "http://e/"})
    text = serialize_turtle(g)
    assert "e:a e:p <urn:x:y> ." in text
    assert parse_turtle(text) == g


def test_parsing_is_deterministic(obama_text):
    assert parse_turtle(obama_text) == parse_turtle(obama_text)
