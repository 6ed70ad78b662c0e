"""Phase I: derive each unit's conversion equation from ontology structure.

A :class:`PatternProfile` tells the extractor which properties play which
structural role, so quotient-style ontologies (numerator/denominator,
prefix + singular unit, numerical factor + unit of measure) and flat
multiplier-style ones (multiplier + base-unit components) go through the
same code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional

from unitalign.calculus import (
    DIMENSIONS,
    DimensionVector,
    UnitContext,
    UnitError,
    canonicalize,
    reduce,
)
from unitalign.mathml import (
    MathMLError,
    NotANumber,
    UnitExpression,
    generate_mathml,
    parse_mathml,
    rational_from_lexical,
)
from unitalign.rdf import (
    RDF,
    RDF_TYPE,
    RDFS,
    RDFS_COMMENT,
    XML_LITERAL,
    Graph,
    Iri,
    Literal,
    Term,
    Triple,
)

ROLES = frozenset({
    "numerator", "denominator",
    "term1", "term2",
    "base", "exponent",
    "prefix", "prefix-value",
    "numerical-factor", "singular-unit", "unit-of-measure",
    "dimension",
    "offset", "component",
})

# the 20 standard SI prefixes, looked up by the prefix's local name
SI_PREFIXES = {
    "yotta": Fraction(10) ** 24, "zetta": Fraction(10) ** 21, "exa": Fraction(10) ** 18,
    "peta": Fraction(10) ** 15, "tera": Fraction(10) ** 12, "giga": Fraction(10) ** 9,
    "mega": Fraction(10) ** 6, "kilo": Fraction(10) ** 3, "hecto": Fraction(10) ** 2,
    "deca": Fraction(10), "deci": Fraction(1, 10), "centi": Fraction(1, 10 ** 2),
    "milli": Fraction(1, 10 ** 3), "micro": Fraction(1, 10 ** 6), "nano": Fraction(1, 10 ** 9),
    "pico": Fraction(1, 10 ** 12), "femto": Fraction(1, 10 ** 15), "atto": Fraction(1, 10 ** 18),
    "zepto": Fraction(1, 10 ** 21), "yocto": Fraction(1, 10 ** 24),
}
_PREFIX_ALIASES = {"deka": "deca"}

_COMPOUND_ROLES = ("numerator", "denominator", "term1", "term2", "base", "exponent", "component")


class ProfileMismatch(ValueError):
    pass


@dataclass
class PatternProfile:
    unit_class: Iri
    roles: Mapping[Iri, str]
    base_units: Mapping[Iri, str]
    prefixes: Mapping[Iri, Fraction] = field(default_factory=dict)
    dimensions: Mapping[Iri, DimensionVector] = field(default_factory=dict)

    def __post_init__(self):
        bad = sorted(set(self.roles.values()) - ROLES)
        if bad:
            raise ValueError(f"unknown roles: {', '.join(bad)}")
        if sorted(self.base_units.values()) != sorted(DIMENSIONS) or len(self.base_units) != 7:
            raise ValueError("base_units must name exactly one unit per base dimension")

    @property
    def base_unit_map(self) -> dict[Iri, DimensionVector]:
        return {iri: DimensionVector.unit(dim) for iri, dim in self.base_units.items()}

    def properties(self, role: str) -> list[Iri]:
        return sorted(p for p, r in self.roles.items() if r == role)

    @classmethod
    def from_dict(cls, data: Mapping) -> "PatternProfile":
        ns = data.get("namespaces", {})

        def iri(name: str) -> Iri:
            prefix, sep, local = name.partition(":")
            if sep and prefix in ns:
                return Iri(ns[prefix] + local)
            return Iri(name)

        return cls(
            unit_class=iri(data["unit_class"]),
            roles={iri(k): v for k, v in data["roles"].items()},
            base_units={iri(k): v for k, v in data["base_units"].items()},
            prefixes={iri(k): rational_from_lexical(str(v)) for k, v in data.get("prefixes", {}).items()},
            dimensions={iri(k): DimensionVector(v) for k, v in data.get("dimensions", {}).items()},
        )

    @classmethod
    def load(cls, path) -> "PatternProfile":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class UnitDef:
    iri: Iri
    expression: UnitExpression


@dataclass(frozen=True)
class SkippedUnit:
    iri: Iri
    reason: str


class _Skip(Exception):
    pass


# (scale, offset, signed factors)
_Partial = tuple[Fraction, Fraction, list]


class _Extractor:
    def __init__(self, g: Graph, profile: PatternProfile):
        self.g = g
        self.profile = profile
        self.base = profile.base_unit_map
        self.props = {role: profile.properties(role) for role in ROLES}

    def all(self, node: Iri, role: str) -> list[Term]:
        found = []
        for prop in self.props[role]:
            found += self.g.objects(node, prop)
        return found

    def one(self, node: Iri, role: str) -> Optional[Term]:
        found = self.all(node, role)
        if len(set(found)) > 1:
            raise _Skip(f"{len(found)} values for {role}")
        return found[0] if found else None

    def number(self, term: Term, what: str) -> Fraction:
        if not isinstance(term, Literal):
            raise _Skip(f"{what} is not a literal")
        try:
            return rational_from_lexical(term.lexical)
        except NotANumber:
            raise _Skip(f"{what} {term.lexical!r} is not a number") from None

    def prefix_value(self, term: Term) -> Fraction:
        if isinstance(term, Literal):
            return self.number(term, "prefix value")
        if term in self.profile.prefixes:
            return self.profile.prefixes[term]
        declared = self.one(term, "prefix-value")
        if declared is not None:
            return self.number(declared, "prefix value")
        name = term.local_name.lower()
        name = _PREFIX_ALIASES.get(name, name)
        if name in SI_PREFIXES:
            return SI_PREFIXES[name]
        raise _Skip(f"unknown prefix {term}")

    def is_compound(self, node: Iri) -> bool:
        return any(self.all(node, role) for role in _COMPOUND_ROLES)

    def expression(self, node: Iri) -> UnitExpression:
        if node in self.base:
            return UnitExpression.build(numerator=[(node, 1)])
        scale, offset, factors = self.structure(node, (node,))
        if scale == 0:
            raise _Skip("conversion multiplier is zero")
        return reduce(UnitExpression.from_signed(scale, offset, factors))

    def structure(self, node: Iri, stack: tuple) -> _Partial:
        get = lambda role: self.one(node, role)  # noqa: E731
        core: Optional[_Partial] = None
        if get("numerator") is not None or get("denominator") is not None:
            num, den = get("numerator"), get("denominator")
            if num is None or den is None:
                raise _Skip("division without both numerator and denominator")
            core = _divide(self.operand(num, stack), self.operand(den, stack))
        elif get("term1") is not None or get("term2") is not None:
            t1, t2 = get("term1"), get("term2")
            if t1 is None or t2 is None:
                raise _Skip("multiplication without both terms")
            core = _multiply(self.operand(t1, stack), self.operand(t2, stack))
        elif get("base") is not None or get("exponent") is not None:
            base, exp = get("base"), get("exponent")
            if base is None or exp is None:
                raise _Skip("exponentiation without both base and exponent")
            k = self.number(exp, "exponent")
            if k.denominator != 1:
                raise _Skip(f"non-integer exponent {k}")
            core = _power(self.operand(base, stack), int(k))
        elif self.all(node, "component"):
            core = (Fraction(1), Fraction(0), [])
            for comp in sorted(set(self.all(node, "component")), key=str):
                core = _multiply(core, self.operand(comp, stack))
        elif get("singular-unit") is not None:
            core = self.operand(get("singular-unit"), stack)
        elif get("unit-of-measure") is not None:
            core = self.operand(get("unit-of-measure"), stack)

        prefix, factor, offset = get("prefix"), get("numerical-factor"), get("offset")
        if core is None:
            if prefix is not None:
                raise _Skip("prefix without a singular unit")
            if factor is None:
                raise _Skip("no pattern matched")
            core = (Fraction(1), Fraction(0), [])
        # operands never carry an offset, so the only offset is this node's own
        scale, _, factors = core
        if prefix is not None:
            scale *= self.prefix_value(prefix)
        if factor is not None:
            scale *= self.number(factor, "numerical factor")
        shift = self.number(offset, "offset") if offset is not None else Fraction(0)
        return scale, shift, factors

    def operand(self, term: Term, stack: tuple) -> _Partial:
        """Named compound units are referenced; blank nodes and simple units are inlined."""
        if not isinstance(term, Iri):
            raise _Skip(f"literal {term.lexical!r} used where a unit was expected")
        ref = (Fraction(1), Fraction(0), [(term, 1)])
        if term in self.base:
            return ref
        if term in stack:
            raise _Skip(f"structure of {term} refers to itself")
        if term.is_blank:
            part = self.structure(term, stack + (term,))
            if part[1]:
                raise _Skip("offset inside a composite unit")
            return part
        if self.is_compound(term):
            return ref
        try:
            part = self.structure(term, stack + (term,))
        except _Skip:
            return ref
        # affine operands stay references so the matcher can report them
        return ref if part[1] else part


def _multiply(p: _Partial, q: _Partial) -> _Partial:
    if p[1] or q[1]:
        raise _Skip("offset inside a composite unit")
    return p[0] * q[0], Fraction(0), p[2] + q[2]


def _divide(p: _Partial, q: _Partial) -> _Partial:
    if p[1] or q[1]:
        raise _Skip("offset inside a composite unit")
    if q[0] == 0:
        raise _Skip("division by a zero factor")
    return p[0] / q[0], Fraction(0), p[2] + [(i, -e) for i, e in q[2]]


def _power(p: _Partial, k: int) -> _Partial:
    if p[1]:
        raise _Skip("offset inside a composite unit")
    if p[0] == 0 and k < 0:
        raise _Skip("zero raised to a negative power")
    return p[0] ** k, Fraction(0), [(i, e * k) for i, e in p[2]]


def unit_subjects(g: Graph, profile: PatternProfile) -> list[Iri]:
    subjects = set(g.subjects(RDF_TYPE, profile.unit_class))
    subjects |= {iri for iri in profile.base_units if g.query(iri)}
    return sorted(subjects)


def extract_unit_defs(g: Graph, profile: PatternProfile) -> tuple[list[UnitDef], list[SkippedUnit]]:
    units = unit_subjects(g, profile)
    if not units:
        raise ProfileMismatch(f"no subject is typed as {profile.unit_class}")
    ex = _Extractor(g, profile)
    defs, skipped = [], []
    for iri in units:
        try:
            defs.append(UnitDef(iri, ex.expression(iri)))
        except _Skip as why:
            skipped.append(SkippedUnit(iri, str(why)))

    declared = {}
    for d in defs:
        dim = ex.one(d.iri, "dimension") if d.iri not in ex.base else None
        if isinstance(dim, Iri) and dim in profile.dimensions:
            declared[d.iri] = profile.dimensions[dim]
    if declared:
        ctx = UnitContext({d.iri: d.expression for d in defs}, ex.base)
        conflicts = set()
        for iri, vector in declared.items():
            try:
                if canonicalize(iri, ctx).dims != vector:
                    conflicts.add(iri)
            except UnitError:
                pass
        defs = [d for d in defs if d.iri not in conflicts]
        skipped += [SkippedUnit(iri, "dimension conflict") for iri in sorted(conflicts)]
        skipped.sort(key=lambda s: s.iri)
    return defs, skipped


def is_unit_mathml(term: Term) -> bool:
    if not isinstance(term, Literal) or not term.is_xml:
        return False
    try:
        parse_mathml(term.lexical)
    except MathMLError:
        return False
    return True


@dataclass
class EnrichResult:
    graph: Graph
    defs: list[UnitDef]
    skipped: list[SkippedUnit]


def run_enrichment(g: Graph, profile: PatternProfile) -> EnrichResult:
    if not g.triples:
        return EnrichResult(g, [], [])
    defs, skipped = extract_unit_defs(g, profile)
    units = set(unit_subjects(g, profile))
    stale = [t for t in g.query(None, RDFS_COMMENT, None) if t.subject in units and is_unit_mathml(t.object)]
    fresh = [Triple(d.iri, RDFS_COMMENT, Literal(generate_mathml(d.expression), XML_LITERAL)) for d in defs]
    prefixes = {}
    bound = set(g.prefixes.values())
    for name, ns in (("rdf", RDF), ("rdfs", RDFS)):
        if fresh and name not in g.prefixes and ns not in bound:
            prefixes[name] = ns
    return EnrichResult(g.replace(add=fresh, remove=stale, prefixes=prefixes), defs, skipped)


def enrich(g: Graph, profile: PatternProfile) -> Graph:
    """Attach a MathML ``rdfs:comment`` to every unit whose structure is understood."""
    return run_enrichment(g, profile).graph
