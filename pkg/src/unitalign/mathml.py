"""Content MathML for unit conversion equations.

A unit is written as ``unit = a * (n1^x1 * n2^x2 ...) / (d1^y1 ...) + b``.
The markup is a ``bind`` over a ``fns1`` lambda with one ``bvar`` per
referenced unit; the body uses the ``arith1`` symbols ``times``,
``divide``, ``power`` and ``plus``.  For example, newton (m*kg/s^2)::

    <math xmlns="http://www.w3.org/1998/Math/MathML">
      <bind>
        <csymbol cd="fns1">lambda</csymbol>
        <bvar><ci id="ex:Meter">n1</ci></bvar>
        <bvar><ci id="ex:Kilogram">n2</ci></bvar>
        <bvar><ci id="ex:Second">d3</ci></bvar>
        <apply>
          <csymbol cd="arith1">divide</csymbol>
          <apply>
            <csymbol cd="arith1">times</csymbol>
            <apply><csymbol cd="arith1">power</csymbol><ci xref="ex:Meter">n1</ci><cn>1</cn></apply>
            ...

All numbers are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from unitalign.rdf import Iri

MATHML_NS = "http://www.w3.org/1998/Math/MathML"

Number = Union[int, Fraction, str]


class NotANumber(ValueError):
    pass


class MathMLError(ValueError):
    pass


class MalformedXml(MathMLError):
    pass


class NotUnitMathML(MathMLError):
    """Well-formed MathML that is not a unit conversion equation."""


_DECIMAL_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")
_FRACTION_RE = re.compile(r"[+-]?\d+/\d+\Z")


def rational_from_lexical(text: str) -> Fraction:
    """Exact value of an integer, decimal, ``p/q`` or scientific-notation string.

    >>> rational_from_lexical("1e-3")
    Fraction(1, 1000)
    """
    s = text.strip()
    if not (_DECIMAL_RE.match(s) or _FRACTION_RE.match(s)):
        raise NotANumber(f"not a number: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise NotANumber(f"zero denominator: {text!r}") from None


def as_fraction(value: Number) -> Fraction:
    if isinstance(value, str):
        return rational_from_lexical(value)
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise TypeError(f"expected an exact number, got {value!r}")
    return Fraction(value)


_VAR_RE = re.compile(r"[nd][1-9]\d*\Z")


@dataclass(frozen=True, order=True)
class UnitRef:
    iri: Iri
    var_name: str

    def __post_init__(self):
        if not _VAR_RE.match(self.var_name):
            raise ValueError(f"bad variable name {self.var_name!r}; expected n<k> or d<k>")

    @property
    def index(self) -> int:
        return int(self.var_name[1:])


Factor = tuple[UnitRef, int]


def _ordered(factors: Iterable[Factor]) -> tuple[Factor, ...]:
    return tuple(sorted(((ref, exp) for ref, exp in factors), key=lambda f: f[0].index))


@dataclass(frozen=True)
class UnitExpression:
    """``multiplier * prod(numerator) / prod(denominator) + offset``.

    Exponents are stored positive; the side carries the sign.  Factors are
    kept in variable-index order so equal expressions compare equal.
    """

    multiplier: Fraction = Fraction(1)
    offset: Fraction = Fraction(0)
    numerator: tuple[Factor, ...] = ()
    denominator: tuple[Factor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "multiplier", as_fraction(self.multiplier))
        object.__setattr__(self, "offset", as_fraction(self.offset))
        object.__setattr__(self, "numerator", _ordered(self.numerator))
        object.__setattr__(self, "denominator", _ordered(self.denominator))
        if self.multiplier == 0:
            raise ValueError("multiplier must be non-zero")
        seen = set()
        for side, letter in ((self.numerator, "n"), (self.denominator, "d")):
            for ref, exp in side:
                if isinstance(exp, bool) or not isinstance(exp, int) or exp < 1:
                    raise ValueError(f"exponent of {ref.var_name} must be a positive integer, got {exp!r}")
                if ref.var_name[0] != letter:
                    raise ValueError(f"variable {ref.var_name} is on the wrong side of the fraction")
                if ref.index in seen:
                    raise ValueError(f"variable index {ref.index} used twice")
                seen.add(ref.index)

    @classmethod
    def build(cls, multiplier: Number = 1, offset: Number = 0,
              numerator: Iterable[tuple[Iri, int]] = (),
              denominator: Iterable[tuple[Iri, int]] = ()) -> "UnitExpression":
        """Assign ``n1..nk`` then ``d(k+1)..`` in the order given."""
        num, den = list(numerator), list(denominator)
        k = 0
        named_num, named_den = [], []
        for iri, exp in num:
            k += 1
            named_num.append((UnitRef(iri, f"n{k}"), exp))
        for iri, exp in den:
            k += 1
            named_den.append((UnitRef(iri, f"d{k}"), exp))
        return cls(as_fraction(multiplier), as_fraction(offset), tuple(named_num), tuple(named_den))

    @classmethod
    def from_signed(cls, multiplier: Number, offset: Number,
                    factors: Iterable[tuple[Iri, int]]) -> "UnitExpression":
        factors = [(iri, e) for iri, e in factors if e != 0]
        return cls.build(multiplier, offset,
                         [(iri, e) for iri, e in factors if e > 0],
                         [(iri, -e) for iri, e in factors if e < 0])

    def signed_factors(self) -> list[tuple[UnitRef, int]]:
        return [(r, e) for r, e in self.numerator] + [(r, -e) for r, e in self.denominator]

    @property
    def refs(self) -> list[UnitRef]:
        return [r for r, _ in self.numerator] + [r for r, _ in self.denominator]

    @property
    def is_scalar(self) -> bool:
        return not self.numerator and not self.denominator

    def __str__(self):
        def side(factors):
            parts = [r.iri.local_name + (f"^{e}" if e != 1 else "") for r, e in factors]
            return " * ".join(parts)
        text = side(self.numerator) or "1"
        if self.denominator:
            text = f"({text}) / ({side(self.denominator)})"
        if self.multiplier != 1:
            text = f"{self.multiplier} * {text}"
        if self.offset:
            text = f"{text} + {self.offset}"
        return text


# -- generation --------------------------------------------------------------

def _csymbol(parent, cd: str, name: str):
    el = ET.SubElement(parent, "csymbol", {"cd": cd})
    el.text = name
    return el


def _cn(parent, value: Fraction):
    el = ET.SubElement(parent, "cn")
    if value.denominator == 1:
        el.text = str(value.numerator)
    else:
        el.set("type", "rational")
        el.text = str(value.numerator)
        ET.SubElement(el, "sep").tail = str(value.denominator)
    return el


def _apply(parent, name: str):
    el = ET.SubElement(parent, "apply")
    _csymbol(el, "arith1", name)
    return el


def _power(parent, ref: UnitRef, exp: int):
    el = _apply(parent, "power")
    ci = ET.SubElement(el, "ci", {"xref": ref.iri.value})
    ci.text = ref.var_name
    _cn(el, Fraction(exp))


def _powers(parent, factors):
    if len(factors) == 1:
        _power(parent, *factors[0])
    else:
        holder = _apply(parent, "times")
        for ref, exp in factors:
            _power(holder, ref, exp)


def generate_mathml(expr: UnitExpression) -> str:
    """Render ``expr`` as Content MathML (no XML declaration)."""
    math = ET.Element("math", {"xmlns": MATHML_NS})
    bind = ET.SubElement(math, "bind")
    _csymbol(bind, "fns1", "lambda")
    for ref in expr.refs:
        ci = ET.SubElement(ET.SubElement(bind, "bvar"), "ci", {"id": ref.iri.value})
        ci.text = ref.var_name

    parent = bind
    if expr.offset:
        parent = _apply(parent, "plus")
    if expr.is_scalar:
        _cn(parent, expr.multiplier)
    else:
        if expr.multiplier != 1:
            parent = _apply(parent, "times")
            _cn(parent, expr.multiplier)
        if expr.denominator:
            div = _apply(parent, "divide")
            if expr.numerator:
                _powers(div, expr.numerator)
            else:
                _cn(div, Fraction(1))
            _powers(div, expr.denominator)
        else:
            _powers(parent, expr.numerator)
    if expr.offset:
        # the offset is the second operand of the outer plus
        _cn(bind[-1], expr.offset)

    ET.indent(math, "  ")
    return ET.tostring(math, encoding="unicode")


# -- parsing -----------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(el) -> list:
    return [c for c in el if isinstance(c.tag, str)]


def _cn_value(el) -> Fraction:
    kind = el.get("type", "real")
    if el.get("base", "10") != "10":
        raise NotUnitMathML("only base-10 numbers are supported")
    try:
        if kind in ("integer", "real", "double", "constant"):
            if _children(el):
                raise NotUnitMathML(f"unexpected markup inside <cn type={kind!r}>")
            return rational_from_lexical(el.text or "")
        if kind in ("rational", "e-notation"):
            parts = _children(el)
            if len(parts) != 1 or _local(parts[0].tag) != "sep":
                raise NotUnitMathML(f"<cn type={kind!r}> needs exactly one <sep/>")
            first = rational_from_lexical(el.text or "")
            second = rational_from_lexical(parts[0].tail or "")
            if kind == "rational":
                if second == 0:
                    raise NotUnitMathML("rational with zero denominator")
                return first / second
            if second.denominator != 1:
                raise NotUnitMathML("e-notation exponent must be an integer")
            return first * Fraction(10) ** int(second)
    except NotANumber as exc:
        raise NotUnitMathML(str(exc)) from None
    raise NotUnitMathML(f"unsupported number type {kind!r}")


class _BodyReader:
    def __init__(self, bvars: dict[str, Iri]):
        self.bvars = bvars

    def operator(self, el):
        kids = _children(el)
        if not kids or _local(kids[0].tag) != "csymbol":
            raise NotUnitMathML("apply without a csymbol operator")
        head = kids[0]
        name = (head.text or "").strip()
        if head.get("cd") != "arith1" or name not in ("times", "divide", "power", "plus"):
            raise NotUnitMathML(f"unsupported symbol {head.get('cd')}:{name}")
        return name, kids[1:]

    def product(self, el) -> tuple[Fraction, list[tuple[str, int]]]:
        """Scale and signed factor list of a multiplicative sub-expression."""
        tag = _local(el.tag)
        if tag == "cn":
            return _cn_value(el), []
        if tag == "ci":
            var = (el.text or "").strip()
            if var not in self.bvars:
                raise NotUnitMathML(f"unbound variable {var!r}")
            xref = el.get("xref")
            if xref is not None and xref != self.bvars[var].value:
                raise NotUnitMathML(f"xref {xref!r} does not match the binding of {var!r}")
            return Fraction(1), [(var, 1)]
        if tag != "apply":
            raise NotUnitMathML(f"unexpected element <{tag}>")
        name, args = self.operator(el)
        if name == "times":
            if not args:
                raise NotUnitMathML("times needs operands")
            scale, factors = Fraction(1), []
            for arg in args:
                s, f = self.product(arg)
                scale *= s
                factors += f
            return scale, factors
        if name == "divide":
            if len(args) != 2:
                raise NotUnitMathML("divide takes exactly two operands")
            s1, f1 = self.product(args[0])
            s2, f2 = self.product(args[1])
            if s2 == 0:
                raise NotUnitMathML("division by zero")
            return s1 / s2, f1 + [(v, -e) for v, e in f2]
        if name == "power":
            if len(args) != 2 or _local(args[1].tag) != "cn":
                raise NotUnitMathML("power takes a base and a numeric exponent")
            k = _cn_value(args[1])
            if k.denominator != 1:
                raise NotUnitMathML(f"fractional exponent {k} is not supported")
            s, f = self.product(args[0])
            if s == 0 and k < 0:
                raise NotUnitMathML("zero raised to a negative power")
            return s ** int(k), [(v, e * int(k)) for v, e in f]
        raise NotUnitMathML("plus may only appear at the top of the body")

    def affine(self, el) -> tuple[Fraction, Fraction, list[tuple[str, int]]]:
        if _local(el.tag) == "apply" and self.operator(el)[0] == "plus":
            args = self.operator(el)[1]
            if len(args) != 2:
                raise NotUnitMathML("plus takes exactly two operands")
            first, second = args
            if _local(second.tag) != "cn" and _local(first.tag) == "cn":
                first, second = second, first
            if _local(second.tag) != "cn":
                raise NotUnitMathML("the offset must be a number")
            scale, factors = self.product(first)
            return scale, _cn_value(second), factors
        scale, factors = self.product(el)
        return scale, Fraction(0), factors


def parse_mathml(xml: str) -> UnitExpression:
    """Read a unit conversion equation back from Content MathML."""
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None
    if _local(root.tag) != "math":
        raise NotUnitMathML("root element is not <math>")
    top = _children(root)
    if len(top) != 1 or _local(top[0].tag) != "bind":
        raise NotUnitMathML("expected a single <bind> lambda binder")
    parts = _children(top[0])
    if not parts or _local(parts[0].tag) != "csymbol" or parts[0].get("cd") != "fns1" \
            or (parts[0].text or "").strip() != "lambda":
        raise NotUnitMathML("missing fns1 lambda binder")

    bvars: dict[str, Iri] = {}
    body = []
    for part in parts[1:]:
        if _local(part.tag) == "bvar":
            cis = _children(part)
            if len(cis) != 1 or _local(cis[0].tag) != "ci" or not cis[0].get("id"):
                raise NotUnitMathML("bvar must hold one <ci> with an id")
            var = (cis[0].text or "").strip()
            if not _VAR_RE.match(var) or var in bvars:
                raise NotUnitMathML(f"bad or repeated variable name {var!r}")
            try:
                bvars[var] = Iri(cis[0].get("id"))
            except ValueError as exc:
                raise NotUnitMathML(str(exc)) from None
        else:
            body.append(part)
    if len(body) != 1:
        raise NotUnitMathML("lambda must have exactly one body expression")

    scale, offset, signed = _BodyReader(bvars).affine(body[0])
    if scale == 0:
        raise NotUnitMathML("conversion multiplier is zero")

    totals: dict[str, int] = {}
    for var, exp in signed:
        totals[var] = totals.get(var, 0) + exp
    used = {int(v[1:]) for v in totals}
    next_index = max(used | {int(v[1:]) for v in bvars}, default=0) + 1
    num, den, taken = [], [], set()
    for var, exp in totals.items():
        if exp == 0:
            continue
        letter = "n" if exp > 0 else "d"
        index = int(var[1:])
        if index in taken:
            index, next_index = next_index, next_index + 1
        taken.add(index)
        ref = UnitRef(bvars[var], f"{letter}{index}")
        (num if exp > 0 else den).append((ref, abs(exp)))
    return UnitExpression(scale, offset, tuple(num), tuple(den))
