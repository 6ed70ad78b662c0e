"""Correspondences, alignments, and their TSV / Alignment-format XML files."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from unitalign.rdf import RDF, XSD, Iri

EVIDENCE = ("seed", "canonical-form", "lexical-dimensionless")

ALIGN_NS = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment"
# cell evidence is not part of the Alignment format; it rides along in its own namespace
EVIDENCE_NS = "urn:unitalign:evidence#"


class AlignmentFormatError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Correspondence:
    entity1: Iri
    entity2: Iri
    relation: str = "="
    confidence: float = 1.0
    evidence: str = "canonical-form"

    def __post_init__(self):
        if self.relation != "=":
            raise ValueError(f"only equivalence ('=') is supported, got {self.relation!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")
        if self.evidence not in EVIDENCE:
            raise ValueError(f"unknown evidence {self.evidence!r}")

    @property
    def key(self) -> tuple[Iri, Iri, str]:
        return self.entity1, self.entity2, self.relation

    def swapped(self) -> "Correspondence":
        return Correspondence(self.entity2, self.entity1, self.relation, self.confidence, self.evidence)


@dataclass(frozen=True)
class Alignment:
    cells: frozenset = field(default_factory=frozenset)
    onto1: str = ""
    onto2: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset(self.cells))

    def __len__(self):
        return len(self.cells)

    def __iter__(self) -> Iterator[Correspondence]:
        return iter(sorted(self.cells))

    def swapped(self) -> "Alignment":
        return Alignment({c.swapped() for c in self.cells}, self.onto2, self.onto1)

    def keys(self) -> set:
        return {c.key for c in self.cells}


# -- TSV ---------------------------------------------------------------------

def to_tsv(alignment: Alignment) -> str:
    lines = [f"# onto1: {alignment.onto1}", f"# onto2: {alignment.onto2}"]
    for c in alignment:
        lines.append("\t".join([c.entity1.value, c.entity2.value, c.relation, repr(float(c.confidence)), c.evidence]))
    return "\n".join(lines) + "\n"


def from_tsv(text: str) -> Alignment:
    onto = {"onto1": "", "onto2": ""}
    cells = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition(":")
            if sep and key.strip() in onto:
                onto[key.strip()] = value.strip()
            continue
        cols = raw.rstrip("\r\n").split("\t")
        if len(cols) < 3 or len(cols) > 5:
            raise AlignmentFormatError(f"line {lineno}: expected 3 to 5 tab-separated columns")
        try:
            confidence = float(cols[3]) if len(cols) > 3 else 1.0
            evidence = cols[4] if len(cols) > 4 else "canonical-form"
            cells.append(Correspondence(Iri(cols[0]), Iri(cols[1]), cols[2], confidence, evidence))
        except ValueError as exc:
            raise AlignmentFormatError(f"line {lineno}: {exc}") from None
    return Alignment(cells, onto["onto1"], onto["onto2"])


# -- Alignment-format XML ----------------------------------------------------

def _q(ns: str, name: str) -> str:
    return f"{{{ns}}}{name}"


def to_xml(alignment: Alignment) -> str:
    ET.register_namespace("", ALIGN_NS)
    ET.register_namespace("rdf", RDF)
    ET.register_namespace("ua", EVIDENCE_NS)
    root = ET.Element(_q(RDF, "RDF"))
    al = ET.SubElement(root, _q(ALIGN_NS, "Alignment"))
    ET.SubElement(al, _q(ALIGN_NS, "xml")).text = "yes"
    ET.SubElement(al, _q(ALIGN_NS, "level")).text = "0"
    ET.SubElement(al, _q(ALIGN_NS, "type")).text = "**"
    for tag, value in (("onto1", alignment.onto1), ("onto2", alignment.onto2)):
        holder = ET.SubElement(al, _q(ALIGN_NS, tag))
        ET.SubElement(holder, _q(ALIGN_NS, "Ontology"), {_q(RDF, "about"): value})
    for c in alignment:
        cell = ET.SubElement(ET.SubElement(al, _q(ALIGN_NS, "map")), _q(ALIGN_NS, "Cell"))
        ET.SubElement(cell, _q(ALIGN_NS, "entity1"), {_q(RDF, "resource"): c.entity1.value})
        ET.SubElement(cell, _q(ALIGN_NS, "entity2"), {_q(RDF, "resource"): c.entity2.value})
        ET.SubElement(cell, _q(ALIGN_NS, "relation")).text = c.relation
        ET.SubElement(cell, _q(ALIGN_NS, "measure"), {_q(RDF, "datatype"): XSD + "float"}).text = repr(float(c.confidence))
        ET.SubElement(cell, _q(EVIDENCE_NS, "evidence")).text = c.evidence
    ET.indent(root, "  ")
    return "<?xml version='1.0' encoding='utf-8'?>\n" + ET.tostring(root, encoding="unicode") + "\n"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find(el, name: str):
    for child in el:
        if _local(child.tag) == name:
            return child
    return None


def from_xml(text: str) -> Alignment:
    try:
        root = ET.fromstring(text.encode("utf-8"))
    except ET.ParseError as exc:
        raise AlignmentFormatError(f"not well-formed XML: {exc}") from None
    al = root if _local(root.tag) == "Alignment" else next((e for e in root.iter() if _local(e.tag) == "Alignment"), None)
    if al is None:
        raise AlignmentFormatError("no <Alignment> element")
    onto = {}
    for name in ("onto1", "onto2"):
        holder = _find(al, name)
        value = ""
        if holder is not None:
            ontology = _find(holder, "Ontology")
            if ontology is not None:
                value = ontology.get(_q(RDF, "about"), "")
            else:
                value = (holder.text or "").strip()
        onto[name] = value
    cells = []
    for cell in (e for e in al.iter() if _local(e.tag) == "Cell"):
        try:
            e1, e2 = _find(cell, "entity1"), _find(cell, "entity2")
            if e1 is None or e2 is None:
                raise ValueError("cell without entity1/entity2")
            relation = _find(cell, "relation")
            measure = _find(cell, "measure")
            evidence = _find(cell, "evidence")
            cells.append(Correspondence(
                Iri(e1.get(_q(RDF, "resource"), "")),
                Iri(e2.get(_q(RDF, "resource"), "")),
                (relation.text or "").strip() if relation is not None else "=",
                float(measure.text) if measure is not None else 1.0,
                (evidence.text or "").strip() if evidence is not None else "canonical-form",
            ))
        except ValueError as exc:
            raise AlignmentFormatError(str(exc)) from None
    return Alignment(cells, onto["onto1"], onto["onto2"])


def write_alignment(alignment: Alignment, path, fmt: str = "tsv") -> None:
    text = to_xml(alignment) if fmt == "xml" else to_tsv(alignment)
    Path(path).write_text(text, encoding="utf-8")


def parse_alignment(text: str) -> Alignment:
    """Either format; XML is recognised by its leading ``<``."""
    return from_xml(text) if text.lstrip().startswith("<") else from_tsv(text)


def read_alignment(path) -> Alignment:
    return parse_alignment(Path(path).read_text(encoding="utf-8"))


def merge(cells: Iterable[Correspondence], onto1: str = "", onto2: str = "") -> Alignment:
    return Alignment(frozenset(cells), onto1, onto2)
