"""Precision, recall and F-measure of an alignment against a reference."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from unitalign.alignment import Alignment, Correspondence


class OntologyPairMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Metrics:
    precision: Fraction
    recall: Fraction
    f_measure: Fraction
    true_positives: int
    false_positives: int
    false_negatives: int
    false_positive_cells: tuple[Correspondence, ...] = ()

    def summary(self) -> str:
        return (f"precision {float(self.precision):.4f}  recall {float(self.recall):.4f}  "
                f"F-measure {float(self.f_measure):.4f}")


def evaluate(produced: Alignment, reference: Alignment, ignore_seed: bool = False) -> Metrics:
    """Set-based scores; cells are identified by (entity1, entity2, relation).

    With ``ignore_seed`` the produced seed cells, and the same pairs in the
    reference, are left out of every count.  An empty produced set scores
    precision 0.
    """
    for mine, theirs in ((produced.onto1, reference.onto1), (produced.onto2, reference.onto2)):
        if mine and theirs and mine != theirs:
            raise OntologyPairMismatch(f"alignments describe different ontologies: {mine} vs {theirs}")

    cells = {c.key: c for c in produced.cells}
    ref_keys = reference.keys()
    if ignore_seed:
        seeds = {c.key for c in produced.cells if c.evidence == "seed"}
        cells = {k: c for k, c in cells.items() if k not in seeds}
        ref_keys = ref_keys - seeds

    tp = len(cells.keys() & ref_keys)
    fp = len(cells) - tp
    fn = len(ref_keys) - tp
    precision = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    recall = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    f = 2 * precision * recall / (precision + recall) if precision + recall else Fraction(0)
    wrong = tuple(sorted(c for k, c in cells.items() if k not in ref_keys))
    return Metrics(precision, recall, f, tp, fp, fn, wrong)
