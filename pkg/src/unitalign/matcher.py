"""Phase II: align two MathML-enriched unit ontologies.

Every unit is reduced to its canonical form inside its own ontology, with
the seven seeded base units as the shared basis.  Units whose forms are
identical are equivalent; dimensionless units additionally need their local
names to be lexically close.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from unitalign.alignment import Alignment, Correspondence
from unitalign.calculus import (
    DIMENSIONS,
    CanonicalForm,
    DimensionVector,
    Step,
    UnitContext,
    UnitError,
    breakdown,
    canonicalize,
    compare_forms,
    dimensions_of,
    forms_equal,
    reduce,
)
from unitalign.mathml import MathMLError, UnitExpression, parse_mathml
from unitalign.rdf import OWL, RDF_TYPE, RDFS_COMMENT, RDFS_LABEL, Graph, Iri, Literal

DEFAULT_THRESHOLD = 0.85
# canonical-form cells whose names never get this close are reported as unverified
CORROBORATION_THRESHOLD = 0.5
UNVERIFIED = "mathematically equivalent, conceptually unverified"


class SeedInvalid(ValueError):
    pass


@dataclass(frozen=True)
class SeedAlignment:
    """The user-supplied matching of the seven base units, one per dimension."""

    pairs: tuple
    dimensions: tuple = DIMENSIONS

    def __post_init__(self):
        pairs = tuple((Iri(str(a)), Iri(str(b))) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if len(pairs) != 7:
            raise SeedInvalid(f"a seed needs exactly 7 base-unit pairs, got {len(pairs)}")
        if sorted(self.dimensions) != sorted(DIMENSIONS):
            raise SeedInvalid("seed pairs must cover each base dimension exactly once")
        for side in (0, 1):
            iris = [p[side] for p in pairs]
            if len(set(iris)) != 7:
                raise SeedInvalid("an IRI is repeated in the seed")

    def bases(self, side: int) -> dict[Iri, DimensionVector]:
        return {p[side]: DimensionVector.unit(d) for p, d in zip(self.pairs, self.dimensions)}

    def flipped(self) -> "SeedAlignment":
        return SeedAlignment(tuple((b, a) for a, b in self.pairs), self.dimensions)

    @classmethod
    def parse(cls, text: str) -> "SeedAlignment":
        """TSV: ``iri1<TAB>iri2[<TAB>dimension]``; ``#`` starts a comment."""
        pairs, dims = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            # whole-line comments only: IRIs may contain '#'
            if not line or line.startswith("#"):
                continue
            cols = [c.strip() for c in line.split("\t")]
            if len(cols) not in (2, 3):
                raise SeedInvalid(f"line {lineno}: expected two tab-separated IRIs")
            try:
                pairs.append((Iri(cols[0]), Iri(cols[1])))
            except ValueError as exc:
                raise SeedInvalid(f"line {lineno}: {exc}") from None
            dims.append(cols[2] if len(cols) == 3 else None)
        if any(d is not None for d in dims):
            if any(d is None for d in dims):
                raise SeedInvalid("either every seed line names its dimension or none does")
            return cls(tuple(pairs), tuple(dims))
        return cls(tuple(pairs))

    @classmethod
    def load(cls, path) -> "SeedAlignment":
        return cls.parse(Path(path).read_text(encoding="utf-8"))


# -- lexical comparison ------------------------------------------------------

_DELIMITERS = re.compile(r"[\s_\-.]+")


def normalize_name(name: str) -> str:
    return _DELIMITERS.sub("", name).lower()


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def lexical_similarity(s1: str, s2: str) -> float:
    """``1 - levenshtein / max(len)`` on lower-cased, delimiter-free names."""
    a, b = normalize_name(s1), normalize_name(s2)
    if a == b:
        return 1.0
    return float(1 - Fraction(levenshtein(a, b), max(len(a), len(b))))


# -- extraction --------------------------------------------------------------

def extract_units(g: Graph) -> tuple[dict[Iri, UnitExpression], list[str]]:
    """Units carrying MathML in an ``rdfs:comment``; unparseable MathML becomes a warning."""
    found: dict[Iri, list[UnitExpression]] = defaultdict(list)
    warnings = []
    for t in g.query(None, RDFS_COMMENT, None):
        if not isinstance(t.object, Literal) or "<math" not in t.object.lexical:
            continue
        try:
            found[t.subject].append(parse_mathml(t.object.lexical))
        except MathMLError as exc:
            warnings.append(f"{t.subject}: unreadable MathML ({type(exc).__name__}: {exc})")
    units = {}
    for iri, exprs in sorted(found.items()):
        if len(set(exprs)) > 1:
            warnings.append(f"{iri}: {len(exprs)} conflicting MathML comments, unit ignored")
        else:
            units[iri] = exprs[0]
    return units, warnings


def ontology_id(g: Graph) -> str:
    found = g.subjects(RDF_TYPE, Iri(OWL + "Ontology"))
    return found[0].value if found else ""


def unit_names(g: Graph, iri: Iri) -> list[str]:
    names = [iri.local_name]
    names += [o.lexical for o in g.objects(iri, RDFS_LABEL) if isinstance(o, Literal)]
    return names


# -- alignment ---------------------------------------------------------------

@dataclass
class Side:
    graph: Graph
    context: UnitContext
    forms: dict[Iri, CanonicalForm]
    excluded: list[tuple[Iri, str]]
    warnings: list[str]


def prepare(g: Graph, bases: dict[Iri, DimensionVector]) -> Side:
    units, warnings = extract_units(g)
    ctx = UnitContext(units, bases)
    forms, excluded = {}, []
    for iri in sorted(set(units) | set(bases)):
        try:
            forms[iri] = canonicalize(iri, ctx)
        except UnitError as exc:
            excluded.append((iri, f"{type(exc).__name__}: {exc}"))
    return Side(g, ctx, forms, excluded, warnings)


@dataclass
class Coverage:
    extracted: tuple[int, int]
    excluded: tuple[list, list]
    unmatched: tuple[list, list]
    flagged: list[tuple[Correspondence, str]]
    warnings: list[str] = field(default_factory=list)

    def render(self) -> str:
        lines = [f"units with MathML: {self.extracted[0]} (left), {self.extracted[1]} (right)"]
        for side, name in ((0, "left"), (1, "right")):
            for iri, reason in self.excluded[side]:
                lines.append(f"excluded ({name}): {iri}: {reason}")
        for side, name in ((0, "left"), (1, "right")):
            for iri in self.unmatched[side]:
                lines.append(f"unmatched ({name}): {iri}")
        for cell, category in self.flagged:
            lines.append(f"flagged: {cell.entity1} = {cell.entity2}: {category}")
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


@dataclass
class MatchResult:
    alignment: Alignment
    coverage: Coverage
    left: Side
    right: Side


def _cells(left: Side, right: Side, seed: SeedAlignment, threshold: float,
           order: Iterable[Iri]) -> set[Correspondence]:
    seed_pairs = set(seed.pairs)
    cells = {Correspondence(a, b, "=", 1.0, "seed") for a, b in seed.pairs}
    by_form: dict[CanonicalForm, list[Iri]] = defaultdict(list)
    for iri, form in right.forms.items():
        by_form[form].append(iri)
    for iri1 in order:
        form = left.forms[iri1]
        for iri2 in by_form.get(form, ()):
            if (iri1, iri2) in seed_pairs:
                continue
            assert forms_equal(form, right.forms[iri2])
            if form.dims.is_dimensionless:
                score = lexical_similarity(iri1.local_name, iri2.local_name)
                if score >= threshold:
                    cells.add(Correspondence(iri1, iri2, "=", score, "lexical-dimensionless"))
            else:
                cells.add(Correspondence(iri1, iri2, "=", 1.0, "canonical-form"))
    return cells


def match(g1: Graph, g2: Graph, seed: SeedAlignment, lexical_threshold: float = DEFAULT_THRESHOLD) -> MatchResult:
    if not 0.0 <= lexical_threshold <= 1.0:
        raise ValueError("lexical_threshold must lie in [0, 1]")
    left, right = prepare(g1, seed.bases(0)), prepare(g2, seed.bases(1))
    order = sorted(left.forms)
    cells = _cells(left, right, seed, lexical_threshold, order)
    if _cells(left, right, seed, lexical_threshold, reversed(order)) != cells:
        raise RuntimeError("alignment depends on processing order")

    matched1 = {c.entity1 for c in cells}
    matched2 = {c.entity2 for c in cells}
    flagged = []
    for c in sorted(cells):
        if c.evidence != "canonical-form":
            continue
        support = max(lexical_similarity(a, b) for a in unit_names(g1, c.entity1) for b in unit_names(g2, c.entity2))
        if support < CORROBORATION_THRESHOLD:
            flagged.append((c, UNVERIFIED))
    coverage = Coverage(
        extracted=(len(left.context.definitions), len(right.context.definitions)),
        excluded=(left.excluded, right.excluded),
        unmatched=(sorted(set(left.forms) - matched1), sorted(set(right.forms) - matched2)),
        flagged=flagged,
        warnings=left.warnings + right.warnings,
    )
    return MatchResult(Alignment(cells, ontology_id(g1), ontology_id(g2)), coverage, left, right)


def align(g1: Graph, g2: Graph, seed: SeedAlignment, lexical_threshold: float = DEFAULT_THRESHOLD) -> Alignment:
    return match(g1, g2, seed, lexical_threshold).alignment


# -- explanation -------------------------------------------------------------

@dataclass
class ComparisonTrace:
    unit1: Iri
    unit2: Iri
    steps: list[Step]
    broken_down: Optional[tuple[UnitExpression, UnitExpression]] = None
    reduced: Optional[tuple[UnitExpression, UnitExpression]] = None

    @property
    def equivalent(self) -> bool:
        return len(self.steps) == 5 and all(s.passed for s in self.steps)

    @property
    def failed_step(self) -> Optional[str]:
        return next((s.name for s in self.steps if not s.passed), None)

    def render(self) -> str:
        lines = [f"compare {self.unit1} with {self.unit2}"]
        for i, s in enumerate(self.steps, 1):
            lines.append(f"step {i} {s.name}: {'pass' if s.passed else 'FAIL'}  {s.detail}")
        lines.append("result: " + ("equivalent" if self.equivalent else "not equivalent"))
        return "\n".join(lines)


def _expression(iri: Iri, ctx: UnitContext) -> UnitExpression:
    if iri in ctx.base_units:
        return UnitExpression.build(numerator=[(iri, 1)])
    return ctx.definitions[iri]


def comparison_trace(u1: Iri, u2: Iri, g1: Graph, g2: Graph, seed: SeedAlignment) -> ComparisonTrace:
    """Offset, multiplier, base-unit breakdown, reduction, dimension check."""
    ctx1 = UnitContext(extract_units(g1)[0], seed.bases(0))
    ctx2 = UnitContext(extract_units(g2)[0], seed.bases(1))
    f1, f2 = canonicalize(u1, ctx1), canonicalize(u2, ctx2)
    steps = compare_forms(f1, f2)[:2]
    if not all(s.passed for s in steps):
        return ComparisonTrace(u1, u2, steps)

    b1, b2 = breakdown(_expression(u1, ctx1), ctx1), breakdown(_expression(u2, ctx2), ctx2)
    steps.append(Step("breakdown", True, f"{b1}  |  {b2}"))
    r1, r2 = reduce(b1), reduce(b2)
    steps.append(Step("reduce", True, f"{r1}  |  {r2}"))
    d1, d2 = dimensions_of(r1, ctx1), dimensions_of(r2, ctx2)
    steps.append(Step("dimensions", d1 == d2, f"{tuple(d1)} vs {tuple(d2)}"))
    return ComparisonTrace(u1, u2, steps, (b1, b2), (r1, r2))
