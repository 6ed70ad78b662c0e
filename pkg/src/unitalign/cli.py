"""Command line: enrich, align, eval, convert, trace.

Exit status is 0 on success, 1 on a hard error and 2 when ``enrich`` had to
skip some units.  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from unitalign.alignment import AlignmentFormatError, read_alignment, to_tsv, to_xml
from unitalign.calculus import DIMENSIONS, DimensionVector, UnitContext, UnitError, canonicalize, convert_value
from unitalign.enricher import PatternProfile, ProfileMismatch, run_enrichment
from unitalign.evaluator import OntologyPairMismatch, evaluate
from unitalign.matcher import (
    DEFAULT_THRESHOLD,
    SeedAlignment,
    SeedInvalid,
    comparison_trace,
    extract_units,
    match,
)
from unitalign.mathml import MathMLError, NotANumber, UnitExpression, rational_from_lexical
from unitalign.rdf import Graph, Iri, TurtleSyntaxError, load_graph, serialize_graph


class CliError(Exception):
    pass


def _say(*lines: str) -> None:
    for line in lines:
        print(line, file=sys.stderr)


def _load(path: str) -> Graph:
    if not Path(path).is_file():
        raise CliError(f"no such file: {path}")
    return load_graph(path)


def _threshold(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1]")
    return value


def cmd_enrich(args) -> int:
    graph = _load(args.input)
    profile = PatternProfile.load(args.profile)
    result = run_enrichment(graph, profile)
    Path(args.out).write_text(serialize_graph(result.graph), encoding="utf-8")
    _say(f"units with MathML: {len(result.defs)}", f"units skipped: {len(result.skipped)}")
    for s in result.skipped:
        _say(f"skipped: {s.iri}: {s.reason}")
    return 2 if result.skipped else 0


def cmd_align(args) -> int:
    seed = SeedAlignment.load(args.seed)
    result = match(_load(args.left), _load(args.right), seed, args.threshold)
    text = to_xml(result.alignment) if args.format == "xml" else to_tsv(result.alignment)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    _say(result.coverage.render(), f"cells: {len(result.alignment)}")
    return 0


def cmd_eval(args) -> int:
    for path in (args.alignment, args.reference):
        if not Path(path).is_file():
            raise CliError(f"no such file: {path}")
    metrics = evaluate(read_alignment(args.alignment), read_alignment(args.reference), args.ignore_seed)
    print(f"precision\t{float(metrics.precision):.4f}")
    print(f"recall\t{float(metrics.recall):.4f}")
    print(f"f-measure\t{float(metrics.f_measure):.4f}")
    for c in metrics.false_positive_cells:
        print(f"false-positive\t{c.entity1}\t{c.entity2}\t{c.evidence}")
    return 0


def _base_units(graph: Graph, units: dict[Iri, UnitExpression], args) -> dict[Iri, DimensionVector]:
    if args.profile:
        return PatternProfile.load(args.profile).base_unit_map
    if args.seed:
        seed = SeedAlignment.load(args.seed)
        # use whichever column of the seed this ontology's units refer to
        hits = [len(set(units) & set(seed.bases(side))) for side in (0, 1)]
        return seed.bases(0 if hits[0] >= hits[1] else 1)
    # a unit whose MathML is just itself is a base unit; which dimension it
    # gets is arbitrary, since conversion only needs the labels to be distinct
    own = sorted(iri for iri, e in units.items() if e == UnitExpression.build(numerator=[(iri, 1)]))
    if len(own) > 7:
        raise CliError("more than seven self-defining units; pass --profile or --seed")
    bases = {iri: DimensionVector.unit(d) for iri, d in zip(own, DIMENSIONS)}
    for d in DIMENSIONS[len(own):]:
        bases[Iri(f"urn:unitalign:unused-base:{d}")] = DimensionVector.unit(d)
    return bases


def cmd_convert(args) -> int:
    graph = _load(args.ontology)
    units, _ = extract_units(graph)
    ctx = UnitContext(units, _base_units(graph, units, args))
    source, target = graph.expand(args.source), graph.expand(args.target)
    for iri in (source, target):
        if not ctx.knows(iri):
            raise CliError(f"{iri} has no MathML definition")
    f_source, f_target = canonicalize(source, ctx), canonicalize(target, ctx)
    if f_source.dims != f_target.dims:
        raise CliError(f"DimensionMismatch: {source} and {target} measure different dimensions")
    value = convert_value(rational_from_lexical(args.value), f_source, f_target)
    print(value)
    print(f"{float(value):.12g}")
    return 0


def cmd_trace(args) -> int:
    g1, g2 = _load(args.left), _load(args.right)
    seed = SeedAlignment.load(args.seed)
    u1, u2 = g1.expand(args.unit1), g2.expand(args.unit2)
    for iri, g, side in ((u1, g1, 0), (u2, g2, 1)):
        if iri not in extract_units(g)[0] and iri not in seed.bases(side):
            raise CliError(f"{iri} has no MathML definition")
    print(comparison_trace(u1, u2, g1, g2, seed).render())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unitalign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enrich", help="insert MathML conversion equations into an ontology")
    p.add_argument("input")
    p.add_argument("--profile", required=True, help="pattern profile (JSON)")
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("align", help="align two enriched ontologies")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--seed", required=True, help="TSV with the seven base-unit pairs")
    p.add_argument("--out", "-o")
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD,
                   help="lexical similarity needed for dimensionless units (default %(default)s)")
    p.add_argument("--format", choices=("tsv", "xml"), default="tsv")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("eval", help="score an alignment against a reference")
    p.add_argument("alignment")
    p.add_argument("reference")
    p.add_argument("--ignore-seed", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("convert", help="convert a value between two units of one ontology")
    p.add_argument("ontology")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--value", required=True)
    p.add_argument("--profile")
    p.add_argument("--seed")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("trace", help="explain the comparison of two units step by step")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--seed", required=True)
    p.add_argument("--unit1", required=True)
    p.add_argument("--unit2", required=True)
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, OSError, TurtleSyntaxError, ProfileMismatch, SeedInvalid, UnitError, MathMLError,
            NotANumber, AlignmentFormatError, OntologyPairMismatch, KeyError, ValueError) as exc:
        _say(f"error: {type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
