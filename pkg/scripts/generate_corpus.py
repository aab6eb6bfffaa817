#!/usr/bin/env python3
"""Generate a labelled synthetic corpus for benchmarking and validation.

Writes docs/, manifest.csv, truth.csv and plantings.csv under --out.
"""

import argparse
from pathlib import Path

from litscan.dsl import load_bundle
from litscan.synthetic import generate_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--analyzers", default=Path(__file__).resolve().parent.parent / "analyzers")
    parser.add_argument("--out", required=True)
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--words", type=int, default=6000)
    parser.add_argument("--seed", type=int, default=20240601)
    args = parser.parse_args()

    bundle = load_bundle(args.analyzers)
    corpus = generate_corpus(bundle, args.out, n_docs=args.docs, words_per_doc=args.words, seed=args.seed)
    planted = sum(1 for p in corpus.plans if p.exact or p.typo)
    print(f"wrote {len(corpus.plans)} documents to {corpus.out_dir}")
    print(f"  {planted} carry planted positive evidence, "
          f"{sum(1 for p in corpus.plans if p.typo)} with injected typos, "
          f"{sum(1 for p in corpus.plans if p.negated)} with negations, "
          f"{sum(p.traps for p in corpus.plans)} trap phrases")
    print(f"  manifest: {corpus.manifest_path}")
    print(f"  truth:    {corpus.truth_path}")


if __name__ == "__main__":
    main()
