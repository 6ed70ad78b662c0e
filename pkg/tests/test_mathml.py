from fractions import Fraction

import pytest

from conftest import NEWTON_XML
from unitalign.mathml import (
    MalformedXml,
    NotANumber,
    NotUnitMathML,
    UnitExpression,
    UnitRef,
    generate_mathml,
    parse_mathml,
    rational_from_lexical,
)
from unitalign.rdf import Iri

M, KG, S, K = (Iri(f"http://u.example/#{n}") for n in ("m", "kg", "s", "K"))


@pytest.mark.parametrize("text, value", [
    ("3", Fraction(3)), ("-2.5", Fraction(-5, 2)), ("1e-3", Fraction(1, 1000)),
    ("1.0E3", Fraction(1000)), ("273.15", Fraction(5463, 20)), ("3/7", Fraction(3, 7)), (".5", Fraction(1, 2)),
])
def test_rational_from_lexical(text, value):
    assert rational_from_lexical(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1/0", "nan", "inf", "1e", "0x10"])
def test_rational_from_lexical_rejects(text):
    with pytest.raises(NotANumber):
        rational_from_lexical(text)


def test_build_assigns_variables_in_order():
    e = UnitExpression.build(2, 0, [(M, 1), (KG, 1)], [(S, 2)])
    assert [r.var_name for r in e.refs] == ["n1", "n2", "d3"]
    assert str(e) == "2 * (m * kg) / (s^2)"


def test_expression_validation():
    with pytest.raises(ValueError):
        UnitExpression.build(0)
    with pytest.raises(ValueError):
        UnitExpression(numerator=((UnitRef(M, "d1"), 1),))
    with pytest.raises(ValueError):
        UnitExpression(numerator=((UnitRef(M, "n1"), 0),))
    with pytest.raises(ValueError):
        UnitRef(M, "x1")


def test_generated_shapes():
    scalar = generate_mathml(UnitExpression.build(Fraction(1, 100)))
    assert "<cn type=\"rational\">1<sep />100</cn>" in scalar and "apply" not in scalar
    inverse = generate_mathml(UnitExpression.build(denominator=[(S, 1)]))
    assert "divide" in inverse and "<cn>1</cn>" in inverse
    affine = generate_mathml(UnitExpression.build(1, Fraction(5463, 20), [(K, 1)]))
    assert "plus" in affine and "times" not in affine
    assert not generate_mathml(UnitExpression.build(numerator=[(M, 1)])).startswith("<?xml")


def test_newton_example_with_prefixed_ids():
    e = parse_mathml(NEWTON_XML)
    assert [(r.iri.value, r.var_name, x) for r, x in e.numerator] == [
        ("myOntology:Meter", "n1", 1), ("myOntology:Kilogram", "n2", 1)]
    assert [(r.iri.value, r.var_name, x) for r, x in e.denominator] == [("myOntology:Second-Time", "d3", 2)]


def test_parse_accepts_other_shapes():
    xml = f"""<math xmlns="http://www.w3.org/1998/Math/MathML"><bind><csymbol cd="fns1">lambda</csymbol>
      <bvar><ci id="{M.value}">n1</ci></bvar><bvar><ci id="{S.value}">n2</ci></bvar>
      <apply><csymbol cd="arith1">plus</csymbol><cn type="e-notation">5<sep/>-1</cn>
        <apply><csymbol cd="arith1">times</csymbol><cn>3</cn><ci>n1</ci>
          <apply><csymbol cd="arith1">power</csymbol><ci>n2</ci><cn>-2</cn></apply></apply></apply>
    </bind></math>"""
    e = parse_mathml(xml)
    assert e.multiplier == 3 and e.offset == Fraction(1, 2)
    assert [(r.iri, x) for r, x in e.numerator] == [(M, 1)]
    # n2 ended up below the fraction bar, so it is renamed to a d variable
    assert [(r.iri, r.var_name[0], x) for r, x in e.denominator] == [(S, "d", 2)]


@pytest.mark.parametrize("xml, error", [
    ("<math><bind>", MalformedXml),
    ("<foo/>", NotUnitMathML),
    ('<math><bind><csymbol cd="fns1">lambda</csymbol><cn>1</cn><cn>2</cn></bind></math>', NotUnitMathML),
    ('<math><bind><csymbol cd="fns1">lambda</csymbol><ci>n1</ci></bind></math>', NotUnitMathML),
    ('<math><bind><csymbol cd="fns1">lambda</csymbol><cn>0</cn></bind></math>', NotUnitMathML),
    ('<math><bind><csymbol cd="fns1">lambda</csymbol><bvar><ci id="u:a">n1</ci></bvar>'
     '<apply><csymbol cd="arith1">power</csymbol><ci xref="u:b">n1</ci><cn>2</cn></apply></bind></math>',
     NotUnitMathML),
    ('<math><bind><csymbol cd="fns1">lambda</csymbol>'
     '<apply><csymbol cd="arith1">minus</csymbol><cn>1</cn><cn>2</cn></apply></bind></math>', NotUnitMathML),
])
def test_parse_rejects(xml, error):
    with pytest.raises(error):
        parse_mathml(xml)
