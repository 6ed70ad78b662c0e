"""Sweep the lexical threshold for dimensionless units.

On the golden corpus the score is measured against the hand-built
reference.  On random corpora (built by the test-suite generator) the
reference is the set of same-named units, so the sweep shows where the
fallback starts to confuse radian with steradian and similar pairs.
"""

import argparse
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from unitalign.alignment import Alignment, Correspondence, read_alignment
from unitalign.enricher import PatternProfile, run_enrichment
from unitalign.evaluator import evaluate
from unitalign.matcher import SeedAlignment, match
from unitalign.rdf import load_graph

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))
from corpora import random_corpus  # noqa: E402


@dataclass
class Sweep:
    thresholds: list = field(default_factory=lambda: [0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 1.0])
    corpora: int = 30
    seed: int = 0


def same_name_reference(result) -> Alignment:
    """Cells whose two units share a normalized local name."""
    right = {iri.local_name.lower(): iri for iri in result.right.forms}
    cells = []
    for iri, form in result.left.forms.items():
        other = right.get(iri.local_name.lower())
        if other is not None and result.right.forms[other] == form:
            cells.append(Correspondence(iri, other))
    return Alignment(cells)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpora", type=int, default=Sweep.corpora)
    parser.add_argument("--seed", type=int, default=Sweep.seed)
    args = parser.parse_args()
    cfg = Sweep(corpora=args.corpora, seed=args.seed)

    golden = ROOT / "tests" / "data" / "golden"
    g1 = run_enrichment(load_graph(golden / "left.ttl"), PatternProfile.load(golden / "left_profile.json")).graph
    g2 = run_enrichment(load_graph(golden / "right.ttl"), PatternProfile.load(golden / "right_profile.json")).graph
    seed = SeedAlignment.load(golden / "seed.tsv")
    reference = read_alignment(golden / "reference.tsv")
    rng = random.Random(cfg.seed)
    corpora = [random_corpus(random.Random(rng.random())) for _ in range(cfg.corpora)]

    print("threshold\tgolden-P\tgolden-R\trandom-P\trandom-R")
    for t in cfg.thresholds:
        m = evaluate(match(g1, g2, seed, t).alignment, reference)
        tp = fp = fn = 0
        for c in corpora:
            result = match(c.g1, c.g2, c.seed, t)
            r = evaluate(result.alignment, same_name_reference(result), ignore_seed=True)
            tp, fp, fn = tp + r.true_positives, fp + r.false_positives, fn + r.false_negatives
        p = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        print(f"{t:.2f}\t{float(m.precision):.4f}\t{float(m.recall):.4f}\t{p:.4f}\t{rec:.4f}")


if __name__ == "__main__":
    main()
