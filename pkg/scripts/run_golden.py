"""Enrich, align and score the golden corpus, printing timings and the coverage report."""

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from unitalign.alignment import read_alignment, write_alignment
from unitalign.enricher import PatternProfile, run_enrichment
from unitalign.evaluator import evaluate
from unitalign.matcher import DEFAULT_THRESHOLD, SeedAlignment, match
from unitalign.rdf import load_graph, save_graph

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden"


@dataclass
class GoldenRun:
    data: Path = GOLDEN
    out: Path = Path("golden-out")
    threshold: float = DEFAULT_THRESHOLD


def run(cfg: GoldenRun) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    graphs = []
    for side in ("left", "right"):
        result = run_enrichment(load_graph(cfg.data / f"{side}.ttl"),
                                PatternProfile.load(cfg.data / f"{side}_profile.json"))
        save_graph(result.graph, cfg.out / f"{side}.enriched.ttl")
        print(f"{side}: {len(result.defs)} units enriched, {len(result.skipped)} skipped")
        for s in result.skipped:
            print(f"  skipped {s.iri.local_name}: {s.reason}")
        graphs.append(result.graph)

    result = match(graphs[0], graphs[1], SeedAlignment.load(cfg.data / "seed.tsv"), cfg.threshold)
    write_alignment(result.alignment, cfg.out / "alignment.tsv")
    elapsed = time.perf_counter() - start
    print(result.coverage.render())

    m = evaluate(result.alignment, read_alignment(cfg.data / "reference.tsv"))
    print(f"{m.summary()}  ({m.true_positives} tp, {m.false_positives} fp, {m.false_negatives} fn)")
    print(f"exact: P={m.precision} R={m.recall} F={m.f_measure}")
    print(f"pipeline time {elapsed:.3f}s")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", type=Path, default=GoldenRun.data)
    parser.add_argument("--out", type=Path, default=GoldenRun.out)
    parser.add_argument("--threshold", type=float, default=GoldenRun.threshold)
    args = parser.parse_args()
    run(GoldenRun(args.data, args.out, args.threshold))


if __name__ == "__main__":
    main()
