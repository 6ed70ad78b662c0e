from fractions import Fraction

import pytest

from conftest import GOLDEN, Q
from unitalign.enricher import PatternProfile, ProfileMismatch, extract_unit_defs, run_enrichment
from unitalign.matcher import extract_units
from unitalign.mathml import UnitExpression
from unitalign.rdf import RDFS_COMMENT, Graph, Iri, load_graph, parse_graph, serialize_graph

F = "http://example.org/flat-units#"


def q(name):
    return Iri(Q + name)


def signed(expr):
    return {r.iri.local_name: e for r, e in expr.signed_factors()}


def test_golden_left_definitions(golden_enriched):
    left = golden_enriched[0]
    defs = {d.iri: d.expression for d in left.defs}
    assert signed(defs[q("newton")]) == {"metre": 1, "kilogram": 1, "second-time": -2}
    assert defs[q("millimetre")] == UnitExpression.build(Fraction(1, 1000), 0, [(q("metre"), 1)])
    # named compound units stay references
    assert signed(defs[q("joule")]) == {"newton": 1, "metre": 1}
    assert defs[q("degree-Celsius")].offset == Fraction(5463, 20)
    assert defs[q("hertz")] == UnitExpression.build(denominator=[(q("second-time"), 1)])
    assert defs[q("metre")] == UnitExpression.build(numerator=[(q("metre"), 1)])
    reasons = {s.iri: s.reason for s in left.skipped}
    assert reasons == {q("mystery-unit"): "no pattern matched", q("broken-speed"): "dimension conflict"}


def test_golden_right_definitions(golden_enriched):
    right = golden_enriched[1]
    assert not right.skipped
    defs = {d.iri.local_name: d.expression for d in right.defs}
    assert signed(defs["Newton"]) == {"Meter": 1, "Kilogram": 1, "Second": -2}
    assert defs["DegreeFahrenheit"].multiplier == Fraction(5, 9)


def test_enrichment_is_idempotent(golden_profiles, golden_enriched):
    once = golden_enriched[0].graph
    twice = run_enrichment(once, golden_profiles[0]).graph
    assert twice.triples == once.triples
    assert serialize_graph(twice) == serialize_graph(once)


def test_enriched_graph_survives_serialization(golden_enriched):
    g = golden_enriched[0].graph
    again = parse_graph(serialize_graph(g))
    assert again.triples == g.triples
    assert extract_units(again)[0] == {d.iri: d.expression for d in golden_enriched[0].defs}


def test_original_triples_are_kept(golden_enriched):
    original = load_graph(GOLDEN / "left.ttl")
    assert original.triples <= golden_enriched[0].graph.triples
    added = golden_enriched[0].graph.triples - original.triples
    assert all(t.predicate == RDFS_COMMENT for t in added)


PROFILE = {
    "namespaces": {"ex": "http://ex.org/#"},
    "unit_class": "ex:Unit",
    "roles": {"ex:prefix": "prefix", "ex:unit": "singular-unit", "ex:factor": "numerical-factor",
              "ex:of": "unit-of-measure", "ex:base": "base", "ex:exp": "exponent"},
    "base_units": {"ex:m": "length", "ex:kg": "mass", "ex:s": "time", "ex:A": "electric-current",
                   "ex:K": "temperature", "ex:mol": "amount-of-substance", "ex:cd": "luminosity"},
}
HEADER = "@prefix ex: <http://ex.org/#> .\nex:m a ex:Unit .\n"


def defs_of(body, profile=PROFILE):
    defs, skipped = extract_unit_defs(parse_graph(HEADER + body), PatternProfile.from_dict(profile))
    return {d.iri.local_name: d.expression for d in defs}, {s.iri.local_name: s.reason for s in skipped}


def test_si_prefix_by_name_and_alias():
    defs, _ = defs_of("ex:dam a ex:Unit ; ex:prefix ex:deka ; ex:unit ex:m .\n"
                      "ex:um a ex:Unit ; ex:prefix ex:Micro ; ex:unit ex:m .")
    assert defs["dam"].multiplier == 10 and defs["um"].multiplier == Fraction(1, 10 ** 6)


def test_declared_prefix_overrides_table():
    profile = dict(PROFILE, prefixes={"ex:odd": "7"})
    defs, _ = defs_of("ex:x a ex:Unit ; ex:prefix ex:odd ; ex:unit ex:m .", profile)
    assert defs["x"].multiplier == 7


def test_factor_of_unit_and_scalar():
    defs, _ = defs_of("ex:ft a ex:Unit ; ex:factor \"0.3048\" ; ex:of ex:m .\n"
                      "ex:pct a ex:Unit ; ex:factor \"1/100\" .\n"
                      "ex:sqft a ex:Unit ; ex:base ex:ft ; ex:exp 2 .")
    assert defs["ft"].multiplier == Fraction(381, 1250)
    assert defs["pct"].is_scalar and defs["pct"].multiplier == Fraction(1, 100)
    # a simple named unit is inlined
    assert defs["sqft"] == UnitExpression.build(Fraction(381, 1250) ** 2, 0, [(Iri("http://ex.org/#m"), 2)])


def test_bad_values_are_skipped():
    _, skipped = defs_of("ex:a a ex:Unit ; ex:factor \"abc\" ; ex:of ex:m .\n"
                         "ex:b a ex:Unit ; ex:prefix ex:bogus ; ex:unit ex:m .\n"
                         "ex:c a ex:Unit ; ex:base ex:m ; ex:exp \"1.5\" .\n"
                         "ex:d a ex:Unit ; ex:factor \"0\" .")
    assert set(skipped) == {"a", "b", "c", "d"}


def test_profile_mismatch_and_empty_graph():
    profile = PatternProfile.from_dict(PROFILE)
    with pytest.raises(ProfileMismatch):
        extract_unit_defs(parse_graph("@prefix ex: <http://ex.org/#> .\nex:x ex:y ex:z ."), profile)
    empty = Graph([], {})
    assert run_enrichment(empty, profile).graph is empty


def test_unknown_role_rejected():
    with pytest.raises(ValueError):
        PatternProfile.from_dict(dict(PROFILE, roles={"ex:p": "nonsense"}))
