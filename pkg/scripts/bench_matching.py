#!/usr/bin/env python3
"""Benchmark the pairwise-matching stage on synthetic variant corpora.

Blocking by publication year keeps matching near-linear in the corpus for
realistic year spreads; this script measures wall time and pair counts as
the corpus grows.

Usage: python3 scripts/bench_matching.py [n_records ...]
"""

from __future__ import annotations

import random
import sys
import time

from crkit.dedup import SimilarityConfig, cluster, match_pairs
from crkit.model import CitedReference, Dataset

SOURCES = [
    "SCIENTOMETRICS", "J INFORMETR", "J AM SOC INF SCI", "RES POLICY",
    "P NATL ACAD SCI USA", "SCIENCE", "NATURE", "J DOC",
]
SURNAMES = ["SMITH", "WANG", "MULLER", "GARCIA", "KIM", "IVANOV", "ROSSI", "TANAKA"]


def synth_corpus(n: int, seed: int = 7) -> Dataset:
    rng = random.Random(seed)
    crs = {}
    for i in range(n):
        source = rng.choice(SOURCES)
        if rng.random() < 0.25:  # inject a variant spelling
            cut = rng.randrange(len(source))
            source = source[:cut] + source[cut + 1 :]
        cr_id = f"cr-{i:06d}"
        rpy = rng.randint(1950, 2005)
        crs[cr_id] = CitedReference(
            id=cr_id, rpy=rpy, source=source,
            authors=((rng.choice(SURNAMES), rng.choice("ABCDEFj").upper()),),
            n_cr=1, per_year={min(2016, rpy + rng.randint(0, 10)): 1},
        )
    return Dataset(crs=crs, citing_year_range=(1950, 2016), rpy_range=(1950, 2005))


def main() -> None:
    sizes = [int(arg) for arg in sys.argv[1:]] or [1000, 5000, 20000]
    cfg = SimilarityConfig(threshold=0.75)
    for n in sizes:
        dataset = synth_corpus(n)
        started = time.perf_counter()
        pairs = match_pairs(dataset, cfg)
        matched = time.perf_counter() - started
        proposals = cluster(dataset, pairs)
        total = time.perf_counter() - started
        print(
            f"n={n:>7}  pairs={len(pairs):>7}  clusters={len(proposals):>6}  "
            f"match={matched:6.2f}s  total={total:6.2f}s"
        )


if __name__ == "__main__":
    main()
