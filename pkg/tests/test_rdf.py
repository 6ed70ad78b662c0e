import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitalign.rdf import (
    RDF_TYPE,
    RDFS_LABEL,
    XML_LITERAL,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    DuplicatePrefixWarning,
    Graph,
    Iri,
    Literal,
    Triple,
    TurtleSyntaxError,
    UnsupportedConstruct,
    parse_graph,
    serialize_graph,
)

EX = "http://example.org/ex#"

DOC = """
@prefix ex: <http://example.org/ex#> .
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
ex:a a ex:Unit ; rdfs:label "metre"@en , "meter" ;
    ex:n 3 ; ex:d 2.5 ; ex:e 1e-3 ;
    ex:ref _:b1 .
_:b1 ex:x <http://other.example/y> ; .
"""


def test_parses_subset_features():
    g = parse_graph(DOC)
    a = Iri(EX + "a")
    assert Triple(a, RDF_TYPE, Iri(EX + "Unit")) in g
    assert set(g.objects(a, RDFS_LABEL)) == {Literal("metre", language="en"), Literal("meter")}
    assert g.value(a, Iri(EX + "n")) == Literal("3", XSD_INTEGER)
    assert g.value(a, Iri(EX + "d")) == Literal("2.5", XSD_DECIMAL)
    assert g.value(a, Iri(EX + "e")) == Literal("1e-3", XSD_DOUBLE)
    blank = g.value(a, Iri(EX + "ref"))
    assert blank.is_blank and g.value(blank, Iri(EX + "x")) == Iri("http://other.example/y")
    assert len(g) == 8


def test_local_name():
    assert Iri("http://x.org/a#metre").local_name == "metre"
    assert Iri("http://x.org/units/Meter").local_name == "Meter"
    assert Iri("urn:isbn:123").local_name == "123"


@pytest.mark.parametrize("text, kind", [
    ("@prefix ex: <http://e/> . ex:a ex:b [ ex:c ex:d ] .", UnsupportedConstruct),
    ("@prefix ex: <http://e/> . ex:a ex:b ( ex:c ) .", UnsupportedConstruct),
    ("@base <http://e/> .", UnsupportedConstruct),
    ("<rel> <http://e/p> <http://e/o> .", TurtleSyntaxError),
    ("ex:a ex:b ex:c .", TurtleSyntaxError),
    ("@prefix ex: <http://e/> . ex:a ex:b ex:c", TurtleSyntaxError),
])
def test_rejects(text, kind):
    with pytest.raises(kind):
        parse_graph(text)


def test_error_position():
    with pytest.raises(TurtleSyntaxError) as info:
        parse_graph("@prefix ex: <http://e/> .\nex:a ex:b ex:c ;; .")
    assert (info.value.line, info.value.column) == (2, 17)


def test_duplicate_prefix_last_wins():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = parse_graph("@prefix ex: <http://one/> .\n@prefix ex: <http://two/> .\nex:a ex:b ex:c .")
    assert any(issubclass(w.category, DuplicatePrefixWarning) for w in caught)
    assert next(iter(g)).subject == Iri("http://two/a")


def test_xml_literal_must_be_well_formed():
    Literal("<a><b/></a>", XML_LITERAL)
    with pytest.raises(ValueError):
        Literal("<a><b></a>", XML_LITERAL)


def test_serialization_is_deterministic_and_round_trips():
    g = parse_graph(DOC)
    text = serialize_graph(g)
    again = parse_graph(text)
    assert again.triples == g.triples
    assert serialize_graph(again) == text


def test_triple_quoted_xml_round_trips():
    xml = '<math xmlns="http://www.w3.org/1998/Math/MathML">\n  <cn>"1"</cn>\n</math>'
    g = Graph([Triple(Iri(EX + "u"), Iri(EX + "c"), Literal(xml, XML_LITERAL))], {"ex": EX})
    text = serialize_graph(g)
    assert '"""' in text
    assert parse_graph(text).triples == g.triples


_text = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")) | st.sampled_from('\n\t"\\\''),
                max_size=30)
_iri = st.sampled_from([Iri(EX + n) for n in ("a", "b", "c-d", "e.f", "g_1")] + [Iri("_:n1"), Iri("_:n2")])
_literal = st.builds(Literal, _text) | st.builds(lambda t: Literal(t, language="en"), _text) \
    | st.builds(lambda t: Literal(t, XSD_INTEGER), st.integers().map(str))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(_iri, _iri.filter(lambda i: not i.is_blank), _iri | _literal), max_size=12))
def test_serialize_parse_round_trip(rows):
    g = Graph([Triple(*r) for r in rows], {"ex": EX})
    assert parse_graph(serialize_graph(g)).triples == g.triples


def test_expand_and_replace():
    g = parse_graph(DOC)
    assert g.expand("ex:a") == Iri(EX + "a")
    assert g.expand("<http://z/q>") == Iri("http://z/q")
    t = Triple(Iri(EX + "a"), RDF_TYPE, Iri(EX + "Unit"))
    smaller = g.replace(remove=[t])
    assert t not in smaller and t in g and len(smaller) == len(g) - 1
