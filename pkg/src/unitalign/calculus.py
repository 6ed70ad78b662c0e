"""Reduction of unit expressions to (multiplier, offset, dimension vector)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple, Optional

from unitalign.mathml import UnitExpression, as_fraction
from unitalign.rdf import Iri

DIMENSIONS = (
    "length",
    "mass",
    "time",
    "electric-current",
    "temperature",
    "amount-of-substance",
    "luminosity",
)


class UnitError(Exception):
    pass


class UnknownUnit(UnitError):
    pass


class CyclicDefinition(UnitError):
    pass


class OffsetComposition(UnitError):
    pass


class DimensionMismatch(UnitError):
    pass


class DimensionVector(tuple):
    """Seven integer exponents in :data:`DIMENSIONS` order."""

    def __new__(cls, exponents=(0,) * 7):
        values = tuple(exponents)
        if len(values) != 7 or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
            raise ValueError(f"a dimension vector needs 7 integers, got {values!r}")
        return super().__new__(cls, values)

    @classmethod
    def unit(cls, dimension: str) -> "DimensionVector":
        values = [0] * 7
        values[DIMENSIONS.index(dimension)] = 1
        return cls(values)

    def __add__(self, other):
        return DimensionVector(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return DimensionVector(a - b for a, b in zip(self, other))

    def scale(self, k: int) -> "DimensionVector":
        return DimensionVector(a * k for a in self)

    @property
    def is_dimensionless(self) -> bool:
        return not any(self)

    def __repr__(self):
        return f"DimensionVector({tuple(self)})"

    def __str__(self):
        parts = [f"{name}^{e}" if e != 1 else name for name, e in zip(DIMENSIONS, self) if e]
        return " * ".join(parts) or "dimensionless"


@dataclass(frozen=True)
class CanonicalForm:
    multiplier: Fraction
    offset: Fraction
    dims: DimensionVector

    def __post_init__(self):
        object.__setattr__(self, "multiplier", as_fraction(self.multiplier))
        object.__setattr__(self, "offset", as_fraction(self.offset))
        object.__setattr__(self, "dims", DimensionVector(self.dims))
        if self.multiplier == 0:
            raise ValueError("multiplier must be non-zero")
        if self.offset and sorted(self.dims) != [0] * 6 + [1]:
            raise ValueError("only single-dimension units with exponent 1 may carry an offset")

    def __str__(self):
        text = f"{self.multiplier} [{self.dims}]"
        return f"{text} + {self.offset}" if self.offset else text


@dataclass
class UnitContext:
    """Unit definitions of one ontology plus its seven designated base units.

    Canonical forms are memoised per context; the context is not meant to
    be mutated after the first :func:`canonicalize` call.
    """

    definitions: Mapping[Iri, UnitExpression]
    base_units: Mapping[Iri, DimensionVector]
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.base_units = {iri: DimensionVector(v) for iri, v in self.base_units.items()}
        vectors = sorted(tuple(v) for v in self.base_units.values())
        expected = sorted(tuple(DimensionVector.unit(d)) for d in DIMENSIONS)
        if len(self.base_units) != 7 or vectors != expected:
            raise ValueError("base_units must map exactly one unit to each of the 7 base dimensions")

    def knows(self, iri: Iri) -> bool:
        return iri in self.base_units or iri in self.definitions


def canonicalize(iri: Iri, ctx: UnitContext) -> CanonicalForm:
    """Expand ``iri`` through its definitions down to the base units."""
    return _canonical(iri, ctx, ())


def _canonical(iri: Iri, ctx: UnitContext, stack: tuple) -> CanonicalForm:
    memo = ctx._memo
    if iri in memo:
        return memo[iri]
    if iri in ctx.base_units:
        form = CanonicalForm(Fraction(1), Fraction(0), ctx.base_units[iri])
    else:
        if iri in stack:
            cycle = " -> ".join(str(i) for i in stack[stack.index(iri):] + (iri,))
            raise CyclicDefinition(f"cyclic unit definition: {cycle}")
        if iri not in ctx.definitions:
            raise UnknownUnit(f"no definition for {iri}")
        form = _expression_form(ctx.definitions[iri], ctx, stack + (iri,), str(iri))
    memo[iri] = form
    return form


def _expression_form(expr: UnitExpression, ctx: UnitContext, stack: tuple, label: str) -> CanonicalForm:
    factors = expr.signed_factors()
    scale = Fraction(1)
    inner_offset = Fraction(0)
    dims = DimensionVector()
    for ref, exp in factors:
        sub = _canonical(ref.iri, ctx, stack)
        if sub.offset:
            if len(factors) != 1 or exp != 1:
                raise OffsetComposition(
                    f"{label}: {ref.iri} has an offset and cannot appear in a product, power or denominator")
            inner_offset = sub.offset
        scale *= sub.multiplier ** exp
        dims = dims + sub.dims.scale(exp)
    # x unit = (a x + b) P, and 1 P = scale base units (+ inner offset for a lone affine factor)
    multiplier = expr.multiplier * scale
    offset = expr.offset * scale + inner_offset
    try:
        return CanonicalForm(multiplier, offset, dims)
    except ValueError as exc:
        raise OffsetComposition(f"{label}: {exc}") from None


def expression_form(expr: UnitExpression, ctx: UnitContext) -> CanonicalForm:
    """Canonical form of an anonymous expression over ``ctx``'s units."""
    return _expression_form(expr, ctx, (), "<expression>")


def reduce(expr: UnitExpression) -> UnitExpression:
    """Cancel units that occur in both numerator and denominator.

    Factors are matched by IRI; a surviving factor keeps the variable name
    of its first occurrence.
    """
    totals: dict[Iri, int] = {}
    first_ref = {}
    for ref, exp in expr.signed_factors():
        totals[ref.iri] = totals.get(ref.iri, 0) + exp
        first_ref.setdefault(ref.iri, ref)
    if len(totals) == len(expr.refs) and all(totals.values()):
        return expr
    num, den = [], []
    for iri, total in totals.items():
        if total == 0:
            continue
        ref = first_ref[iri]
        letter = "n" if total > 0 else "d"
        if ref.var_name[0] != letter:
            ref = type(ref)(iri, letter + ref.var_name[1:])
        (num if total > 0 else den).append((ref, abs(total)))
    return UnitExpression(expr.multiplier, expr.offset, tuple(num), tuple(den))


def breakdown(expr: UnitExpression, ctx: UnitContext) -> UnitExpression:
    """Substitute every non-base reference by its definition, without cancelling.

    Only used for explaining comparisons; :func:`canonicalize` does the same
    work with exponent arithmetic and memoisation.
    """
    scale, offset, factors = _breakdown(expr, ctx, ())
    return UnitExpression.from_signed(scale, offset, factors)


def _breakdown(expr: UnitExpression, ctx: UnitContext, stack: tuple):
    scale = expr.multiplier
    factors: list[tuple[Iri, int]] = []
    inner_offset = Fraction(0)
    signed = expr.signed_factors()
    for ref, exp in signed:
        iri = ref.iri
        if iri in ctx.base_units:
            factors.append((iri, exp))
            continue
        if iri in stack:
            raise CyclicDefinition(f"cyclic unit definition through {iri}")
        if iri not in ctx.definitions:
            raise UnknownUnit(f"no definition for {iri}")
        sub_scale, sub_offset, sub_factors = _breakdown(ctx.definitions[iri], ctx, stack + (iri,))
        if sub_offset:
            if len(signed) != 1 or exp != 1:
                raise OffsetComposition(f"{iri} has an offset and cannot appear in a product")
            inner_offset = sub_offset
        scale *= sub_scale ** exp
        factors += [(i, e * exp) for i, e in sub_factors]
    product_scale = scale / expr.multiplier
    return scale, expr.offset * product_scale + inner_offset, factors


def dimensions_of(expr: UnitExpression, ctx: UnitContext) -> DimensionVector:
    """Dimension vector of an expression written purely in base units."""
    dims = DimensionVector()
    for ref, exp in expr.signed_factors():
        if ref.iri not in ctx.base_units:
            raise UnknownUnit(f"{ref.iri} is not a base unit")
        dims = dims + ctx.base_units[ref.iri].scale(exp)
    return dims


class Step(NamedTuple):
    name: str
    passed: bool
    detail: str


def compare_forms(f1: CanonicalForm, f2: CanonicalForm) -> list[Step]:
    """Offset, then multiplier, then dimensions; stops at the first failure."""
    steps = []
    checks = (
        ("offset", f1.offset == f2.offset, f"{f1.offset} vs {f2.offset}"),
        ("multiplier", f1.multiplier == f2.multiplier, f"{f1.multiplier} vs {f2.multiplier}"),
        ("dimensions", f1.dims == f2.dims, f"{tuple(f1.dims)} vs {tuple(f2.dims)}"),
    )
    for name, passed, detail in checks:
        steps.append(Step(name, passed, detail))
        if not passed:
            break
    return steps


def forms_equal(f1: CanonicalForm, f2: CanonicalForm, trace: Optional[list] = None) -> bool:
    steps = compare_forms(f1, f2)
    if trace is not None:
        trace.extend(steps)
    return all(s.passed for s in steps) and len(steps) == 3


def convert_value(x, source: CanonicalForm, target: CanonicalForm) -> Fraction:
    """Convert ``x`` expressed in ``source`` into ``target`` units."""
    if source.dims != target.dims:
        raise DimensionMismatch(f"cannot convert {source.dims} into {target.dims}")
    x = as_fraction(x)
    return (source.multiplier * x + source.offset - target.offset) / target.multiplier
