"""A small Turtle subset: IRIs, prefixed names, labelled blank nodes and literals.

Only what the unit ontologies need is supported.  Anonymous blank nodes
(``[ ... ]``) and collections (``( ... )``) are rejected with
:class:`UnsupportedConstruct` instead of being skipped.
"""

from __future__ import annotations

import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Union

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
OWL = "http://www.w3.org/2002/07/owl#"


class TurtleSyntaxError(SyntaxError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedConstruct(TurtleSyntaxError):
    pass


class DuplicatePrefixWarning(UserWarning):
    pass


@dataclass(frozen=True, order=True)
class Iri:
    """An absolute IRI, or a blank node when the value starts with ``_:``."""

    value: str

    def __post_init__(self):
        if not self.value or ":" not in self.value:
            raise ValueError(f"not an absolute IRI: {self.value!r}")

    def __str__(self):
        return self.value

    @property
    def is_blank(self) -> bool:
        return self.value.startswith("_:")

    @property
    def local_name(self) -> str:
        v = self.value
        for sep in ("#", "/", ":"):
            i = v.rfind(sep)
            if i >= 0 and i < len(v) - 1:
                return v[i + 1:]
        return v


RDF_TYPE = Iri(RDF + "type")
RDFS_COMMENT = Iri(RDFS + "comment")
RDFS_LABEL = Iri(RDFS + "label")
XML_LITERAL = Iri(RDF + "XMLLiteral")
XSD_STRING = Iri(XSD + "string")
XSD_INTEGER = Iri(XSD + "integer")
XSD_DECIMAL = Iri(XSD + "decimal")
XSD_DOUBLE = Iri(XSD + "double")
XSD_BOOLEAN = Iri(XSD + "boolean")


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Optional[Iri] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.datatype is not None and self.language is not None:
            raise ValueError("a literal cannot carry both a datatype and a language tag")
        if self.datatype == XML_LITERAL:
            try:
                ET.fromstring(f"<_fragment>{self.lexical}</_fragment>")
            except ET.ParseError as exc:
                raise ValueError(f"XML literal is not well-formed: {exc}") from None

    def __str__(self):
        return self.lexical

    @property
    def is_xml(self) -> bool:
        return self.datatype == XML_LITERAL


Term = Union[Iri, Literal]


class Triple(NamedTuple):
    subject: Iri
    predicate: Iri
    object: Term


def term_key(term: Term) -> str:
    """N-Triples style rendering, used as the sort key for deterministic output."""
    if isinstance(term, Iri):
        return term.value if term.is_blank else f"<{term.value}>"
    out = '"' + _escape_short(term.lexical) + '"'
    if term.language:
        out += "@" + term.language
    elif term.datatype is not None:
        out += f"^^<{term.datatype.value}>"
    return out


def triple_key(t: Triple) -> tuple[str, str, str]:
    return term_key(t.subject), term_key(t.predicate), term_key(t.object)


@dataclass(frozen=True)
class Graph:
    """Immutable set of triples plus the prefix map it was written with."""

    triples: frozenset = frozenset()
    prefixes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "triples", frozenset(self.triples))
        object.__setattr__(self, "prefixes", dict(self.prefixes))

    def __len__(self):
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.sorted_triples)

    def __contains__(self, triple) -> bool:
        return triple in self.triples

    @cached_property
    def sorted_triples(self) -> tuple[Triple, ...]:
        return tuple(sorted(self.triples, key=triple_key))

    @cached_property
    def _by_subject(self) -> dict[Iri, list[Triple]]:
        index: dict[Iri, list[Triple]] = {}
        for t in self.sorted_triples:
            index.setdefault(t.subject, []).append(t)
        return index

    @cached_property
    def _by_predicate(self) -> dict[Iri, list[Triple]]:
        index: dict[Iri, list[Triple]] = {}
        for t in self.sorted_triples:
            index.setdefault(t.predicate, []).append(t)
        return index

    def query(self, subject: Optional[Iri] = None, predicate: Optional[Iri] = None,
              obj: Optional[Term] = None) -> list[Triple]:
        """Triples matching the pattern; ``None`` components are wildcards."""
        if subject is not None:
            candidates = self._by_subject.get(subject, [])
        elif predicate is not None:
            candidates = self._by_predicate.get(predicate, [])
        else:
            candidates = self.sorted_triples
        return [
            t for t in candidates
            if (predicate is None or t.predicate == predicate)
            and (obj is None or t.object == obj)
        ]

    def objects(self, subject: Iri, predicate: Iri) -> list[Term]:
        return [t.object for t in self.query(subject, predicate)]

    def subjects(self, predicate: Iri, obj: Term) -> list[Iri]:
        return [t.subject for t in self.query(None, predicate, obj)]

    def value(self, subject: Iri, predicate: Iri) -> Optional[Term]:
        found = self.objects(subject, predicate)
        return found[0] if found else None

    def replace(self, add: Iterable[Triple] = (), remove: Iterable[Triple] = (),
                prefixes: Optional[Mapping[str, str]] = None) -> "Graph":
        triples = (self.triples - frozenset(remove)) | frozenset(add)
        merged = dict(self.prefixes)
        if prefixes:
            merged.update(prefixes)
        return Graph(triples, merged)

    def expand(self, name: str) -> Iri:
        """Resolve ``prefix:local`` through the prefix map; full IRIs pass through."""
        if name.startswith("<") and name.endswith(">"):
            return Iri(name[1:-1])
        prefix, sep, local = name.partition(":")
        if sep and prefix in self.prefixes:
            return Iri(self.prefixes[prefix] + local)
        return Iri(name)


# -- parsing -----------------------------------------------------------------

_PN_PREFIX = r"[A-Za-z](?:[\w.-]*[\w-])?"
_PN_LOCAL = r"[\w:%-](?:[\w.:%-]*[\w:%-])?"
_ECHAR = r'\\[tbnrf"\'\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}'

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("LONG2", r'"""(?:(?:"|"")?(?:[^"\\]|' + _ECHAR + r'))*"""'),
    ("LONG1", r"'''(?:(?:'|'')?(?:[^'\\]|" + _ECHAR + r"))*'''"),
    ("STR2", r'"(?:[^"\\\r\n]|' + _ECHAR + r')*"'),
    ("STR1", r"'(?:[^'\\\r\n]|" + _ECHAR + r")*'"),
    ("IRIREF", r'<[^<>"{}|^`\\\x00-\x20]*>'),
    ("DIRECTIVE", r"@(?:prefix|base)\b"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("BLANK", r"_:[\w](?:[\w.-]*[\w-])?"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("PNAME", rf"(?:{_PN_PREFIX})?:(?:{_PN_LOCAL})?"),
    ("NAME", r"[A-Za-z]+"),
    ("PUNCT", r"[.;,\[\]()]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))
_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(_ECHAR)


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            raise TurtleSyntaxError(f"unexpected character {text[pos]!r}", line, column)
        kind, value = m.lastgroup, m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, value, line, column))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    return tokens


def _unescape(body: str) -> str:
    def sub(m):
        s = m.group()
        if s[1] in "uU":
            return chr(int(s[2:], 16))
        return _ESCAPES[s[1]]
    return _ESCAPE_RE.sub(sub, body)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.prefixes: dict[str, str] = {}
        self.triples: set[Triple] = set()

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise TurtleSyntaxError("unexpected end of document", last.line, last.column + len(last.text))
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise TurtleSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def parse(self) -> Graph:
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == "DIRECTIVE" or (tok.kind == "NAME" and tok.text.upper() in ("PREFIX", "BASE")):
                self.directive()
            else:
                self.statement()
        return Graph(self.triples, self.prefixes)

    def directive(self):
        tok = self.next()
        keyword = tok.text.lstrip("@").lower()
        if keyword == "base":
            raise UnsupportedConstruct("base IRI declarations are not supported", tok.line, tok.column)
        name = self.next()
        if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
            raise TurtleSyntaxError(f"expected a prefix name, found {name.text!r}", name.line, name.column)
        iri = self.next()
        if iri.kind != "IRIREF":
            raise TurtleSyntaxError(f"expected an IRI, found {iri.text!r}", iri.line, iri.column)
        prefix = name.text[:-1]
        if prefix in self.prefixes and self.prefixes[prefix] != iri.text[1:-1]:
            warnings.warn(f"prefix {prefix!r} redeclared at line {name.line}; last declaration wins",
                          DuplicatePrefixWarning, stacklevel=4)
        self.prefixes[prefix] = iri.text[1:-1]
        if tok.kind == "DIRECTIVE":
            self.expect(".")

    def statement(self):
        subject = self.resource(self.next(), "subject")
        while True:
            pred_tok = self.next()
            predicate = RDF_TYPE if pred_tok.text == "a" and pred_tok.kind == "NAME" else self.resource(pred_tok, "predicate")
            if predicate.is_blank:
                raise TurtleSyntaxError("a blank node cannot be a predicate", pred_tok.line, pred_tok.column)
            while True:
                self.triples.add(Triple(subject, predicate, self.object()))
                if self.peek() is not None and self.peek().text == ",":
                    self.next()
                    continue
                break
            sep = self.next()
            if sep.text == ".":
                return
            if sep.text != ";":
                raise TurtleSyntaxError(f"expected '.', ';' or ',', found {sep.text!r}", sep.line, sep.column)
            # trailing ';' before '.' is legal Turtle
            if self.peek() is not None and self.peek().text == ".":
                self.next()
                return

    def resource(self, tok: _Token, role: str) -> Iri:
        if tok.kind == "IRIREF":
            value = _unescape(tok.text[1:-1])
            if ":" not in value:
                raise TurtleSyntaxError(f"relative IRI {tok.text} is not supported", tok.line, tok.column)
            return Iri(value)
        if tok.kind == "PNAME":
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.prefixes:
                raise TurtleSyntaxError(f"undeclared prefix {prefix!r}", tok.line, tok.column)
            return Iri(self.prefixes[prefix] + local)
        if tok.kind == "BLANK":
            return Iri(tok.text)
        self.reject_unsupported(tok)
        raise TurtleSyntaxError(f"expected a {role}, found {tok.text!r}", tok.line, tok.column)

    def reject_unsupported(self, tok: _Token):
        if tok.text == "[":
            raise UnsupportedConstruct("anonymous blank nodes ('[ ... ]') are not supported", tok.line, tok.column)
        if tok.text == "(":
            raise UnsupportedConstruct("collections ('( ... )') are not supported", tok.line, tok.column)

    def object(self) -> Term:
        tok = self.next()
        if tok.kind in ("IRIREF", "PNAME", "BLANK"):
            return self.resource(tok, "object")
        if tok.kind in ("LONG2", "LONG1"):
            return self.literal_tail(_unescape(tok.text[3:-3]), tok)
        if tok.kind in ("STR2", "STR1"):
            return self.literal_tail(_unescape(tok.text[1:-1]), tok)
        if tok.kind == "INTEGER":
            return Literal(tok.text, XSD_INTEGER)
        if tok.kind == "DECIMAL":
            return Literal(tok.text, XSD_DECIMAL)
        if tok.kind == "DOUBLE":
            return Literal(tok.text, XSD_DOUBLE)
        if tok.kind == "NAME" and tok.text in ("true", "false"):
            return Literal(tok.text, XSD_BOOLEAN)
        self.reject_unsupported(tok)
        raise TurtleSyntaxError(f"expected an object, found {tok.text!r}", tok.line, tok.column)

    def literal_tail(self, lexical: str, start: _Token) -> Literal:
        nxt = self.peek()
        try:
            if nxt is not None and nxt.kind == "LANGTAG":
                self.next()
                return Literal(lexical, language=nxt.text[1:])
            if nxt is not None and nxt.kind == "DTYPE":
                self.next()
                return Literal(lexical, datatype=self.resource(self.next(), "datatype"))
            return Literal(lexical)
        except ValueError as exc:
            raise TurtleSyntaxError(str(exc), start.line, start.column) from None


def parse_graph(text: str) -> Graph:
    """Parse a document in the supported Turtle subset."""
    return _Parser(text).parse()


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_graph(fh.read())


# -- serialization -----------------------------------------------------------

_LOCAL_OK = re.compile(rf"(?:{_PN_LOCAL})?\Z")


def _escape_short(s: str) -> str:
    return (s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
            .replace("\r", "\\r").replace("\t", "\\t"))


def _escape_long(s: str) -> str:
    out = []
    for i, ch in enumerate(s):
        if ch == "\\":
            out.append("\\\\")
        elif ch == "\r":
            out.append("\\r")
        elif ch == '"' and (i == len(s) - 1 or s[i + 1] == '"'):
            out.append('\\"')
        else:
            out.append(ch)
    return "".join(out)


class _Writer:
    def __init__(self, prefixes: Mapping[str, str]):
        # longest namespace first so the most specific prefix wins
        self.namespaces = sorted(prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))

    def iri(self, iri: Iri) -> str:
        if iri.is_blank:
            return iri.value
        for prefix, ns in self.namespaces:
            if iri.value.startswith(ns):
                local = iri.value[len(ns):]
                if _LOCAL_OK.match(local):
                    return f"{prefix}:{local}"
        return f"<{iri.value}>"

    def term(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.iri(term)
        if "\n" in term.lexical or "\r" in term.lexical:
            out = '"""' + _escape_long(term.lexical) + '"""'
        else:
            out = '"' + _escape_short(term.lexical) + '"'
        if term.language:
            return out + "@" + term.language
        if term.datatype is not None:
            return out + "^^" + self.iri(term.datatype)
        return out


def serialize_graph(g: Graph) -> str:
    """Deterministic Turtle: prefixes by name, then triples in sorted order."""
    w = _Writer(g.prefixes)
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(g.prefixes.items())]
    current_subject = current_predicate = None
    body: list[str] = []
    for t in g.sorted_triples:
        pred = "a" if t.predicate == RDF_TYPE else w.iri(t.predicate)
        obj = w.term(t.object)
        if t.subject != current_subject:
            if body:
                body[-1] += " ."
                body.append("")
            body.append(f"{w.iri(t.subject)} {pred} {obj}")
        elif t.predicate != current_predicate:
            body[-1] += " ;"
            body.append(f"    {pred} {obj}")
        else:
            body[-1] += " ,"
            body.append(f"        {obj}")
        current_subject, current_predicate = t.subject, t.predicate
    if body:
        body[-1] += " ."
        if lines:
            lines.append("")
        lines.extend(body)
    return "\n".join(lines) + "\n" if lines else ""


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_graph(g))
