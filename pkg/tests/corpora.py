"""Random unit definition graphs and two-ontology corpora built from them."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from oracles import symbolic_expansion
from unitalign.calculus import DIMENSIONS
from unitalign.matcher import SeedAlignment
from unitalign.mathml import UnitExpression, generate_mathml
from unitalign.rdf import RDFS_COMMENT, RDFS_LABEL, XML_LITERAL, Graph, Iri, Literal, Triple

MULTIPLIER_POOL = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(1, 10),
                   Fraction(1000), Fraction(5, 9), Fraction(60)]
BASE_NAMES = ["len", "mass", "time", "cur", "temp", "amt", "lum"]
DIMLESS_NAMES = ["radian", "steradian", "percent", "neper", "turn", "cycle", "degreeAngle"]


def random_definitions(rng: random.Random, n_units: int = 10, max_factors: int = 3):
    """Acyclic definitions ``name -> (multiplier, [(ref, exp)])``; refs point to earlier units or bases."""
    defs = {}
    names = []
    for i in range(n_units):
        name = f"unit{i}"
        pool = BASE_NAMES + names
        k = rng.randint(0, max_factors)
        refs = rng.sample(pool, min(k, len(pool)))
        factors = [(r, rng.choice([e for e in range(-3, 4) if e != 0])) for r in refs]
        defs[name] = (rng.choice(MULTIPLIER_POOL), factors)
        names.append(name)
    return defs


def expression_of(ns: str, multiplier, factors, offset=Fraction(0)) -> UnitExpression:
    return UnitExpression.from_signed(multiplier, offset, [(Iri(ns + r), e) for r, e in factors])


def graph_from_expressions(exprs: dict[Iri, UnitExpression], labels: dict[Iri, str] = None) -> Graph:
    triples = [Triple(iri, RDFS_COMMENT, Literal(generate_mathml(e), XML_LITERAL)) for iri, e in exprs.items()]
    for iri, label in (labels or {}).items():
        triples.append(Triple(iri, RDFS_LABEL, Literal(label)))
    return Graph(triples, {"rdfs": "http://www.w3.org/2000/01/rdf-schema#"})


@dataclass
class Corpus:
    g1: Graph
    g2: Graph
    seed: SeedAlignment
    ns1: str
    ns2: str
    dimensionless: set


def random_corpus(rng: random.Random, n_units: int = 8) -> Corpus:
    """Two ontologies over the same random unit set.

    The left one keeps the nested definitions; the right one states each
    unit nested, flattened to base units, or not at all, and adds a few of
    its own.
    Dimensionless units come from a fixed name list.
    """
    ns1, ns2 = "http://left.example/u#", "http://right.example/u#"
    defs = random_definitions(rng, n_units)
    exprs1 = {Iri(ns1 + b): UnitExpression.build(numerator=[(Iri(ns1 + b), 1)]) for b in BASE_NAMES}
    exprs2 = {Iri(ns2 + b): UnitExpression.build(numerator=[(Iri(ns2 + b), 1)]) for b in BASE_NAMES}
    for name, (mult, factors) in defs.items():
        exprs1[Iri(ns1 + name)] = expression_of(ns1, mult, factors)
        roll = rng.random()
        if roll < 0.4:
            exprs2[Iri(ns2 + name)] = expression_of(ns2, mult, factors)
        elif roll < 0.8:
            flat_mult, exps = symbolic_expansion(defs, BASE_NAMES, name)
            exprs2[Iri(ns2 + name)] = expression_of(ns2, flat_mult, zip(BASE_NAMES, exps))
    extra = random_definitions(rng, 3)
    for name, (mult, factors) in extra.items():
        local = "x" + name
        fixed = [(("x" + r) if r.startswith("unit") else r, e) for r, e in factors]
        exprs2[Iri(ns2 + local)] = expression_of(ns2, mult, fixed)

    dimless = set()
    for side, ns, exprs in ((1, ns1, exprs1), (2, ns2, exprs2)):
        for name in rng.sample(DIMLESS_NAMES, rng.randint(1, 4)):
            spelled = name if rng.random() < 0.5 else name.capitalize()
            exprs[Iri(ns + spelled)] = UnitExpression.build(rng.choice([1, 1, Fraction(1, 100)]))
            dimless.add(Iri(ns + spelled))
    if rng.random() < 0.5:
        # an affine unit over a base, present on both sides
        for ns, exprs in ((ns1, exprs1), (ns2, exprs2)):
            exprs[Iri(ns + "degC")] = UnitExpression.build(1, Fraction(5463, 20), [(Iri(ns + "temp"), 1)])

    seed = SeedAlignment(tuple((ns1 + b, ns2 + b) for b in BASE_NAMES), DIMENSIONS)
    return Corpus(graph_from_expressions(exprs1), graph_from_expressions(exprs2), seed, ns1, ns2, dimless)


def rename_graph(g: Graph, mapping: dict[Iri, Iri]) -> Graph:
    """Rename IRIs everywhere, including inside MathML literals."""
    from unitalign.mathml import parse_mathml, UnitRef

    triples = []
    for t in g.triples:
        s = mapping.get(t.subject, t.subject)
        o = t.object
        if isinstance(o, Literal) and o.is_xml:
            e = parse_mathml(o.lexical)
            e = UnitExpression(e.multiplier, e.offset,
                               tuple((UnitRef(mapping.get(r.iri, r.iri), r.var_name), x) for r, x in e.numerator),
                               tuple((UnitRef(mapping.get(r.iri, r.iri), r.var_name), x) for r, x in e.denominator))
            o = Literal(generate_mathml(e), XML_LITERAL)
        triples.append(Triple(s, t.predicate, o))
    return Graph(triples, g.prefixes)
