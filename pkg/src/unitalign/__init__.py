"""Align units-of-measurement ontologies through Content MathML conversion equations."""

from unitalign.alignment import Alignment, Correspondence
from unitalign.calculus import CanonicalForm, DimensionVector, UnitContext, canonicalize, convert_value, forms_equal, reduce
from unitalign.enricher import PatternProfile, enrich, extract_unit_defs
from unitalign.evaluator import Metrics, evaluate
from unitalign.matcher import SeedAlignment, align, comparison_trace, extract_units, lexical_similarity
from unitalign.mathml import UnitExpression, UnitRef, generate_mathml, parse_mathml, rational_from_lexical
from unitalign.rdf import Graph, Iri, Literal, Triple, parse_graph, serialize_graph

__version__ = "0.1.0"
