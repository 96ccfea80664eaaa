"""
Counting throughput on a synthetic vertical corpus.

    PYTHONPATH=src python dev/throughput.py --tokens 10000000 --threads 8

Reference point: 10 million tokens in under 60 s on commodity hardware.
Slower runs are logged as a warning, never as a failure.
"""
import argparse
import logging
import tempfile
import time
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from gramdisp.config import RunConfig
from gramdisp.cooc import count_corpus
from gramdisp.targets import GoldItem, build_lexicon

logger = logging.getLogger("gramdisp.throughput")

REFERENCE_TOKENS = 10_000_000
REFERENCE_SECONDS = 60.0

TARGETS = [
    GoldItem(("in",), 4),
    GoldItem(("mit",), 3),
    GoldItem(("trotz",), 2),
    GoldItem(("am", "Rande"), 1),
    GoldItem(("mit", "Hilfe"), 1),
]
# Frequent head of the Zipf vocabulary, so every target occurs.
SEED_VOCAB = [
    ("der", "ART"), ("in", "APPR"), ("und", "KON"), ("mit", "APPR"), ("Hilfe", "NN"),
    ("am", "APPRART"), ("Rande", "NN"), ("trotz", "APPR"), (".", "$."),
]
POS_TAGS = ("NN", "VVFIN", "ADJA", "ADV", "NE", "VVINF")


def write_synthetic_corpus(
    path: Union[str, Path], n_tokens: int, seed: int = 0, vocab_size: int = 20_000, chunk_size: int = 1_000_000
) -> int:
    """Writes `n_tokens` Zipf-distributed tokens in sentences of 5-29 tokens; returns the token count."""
    rng = np.random.default_rng(seed)
    lines: List[str] = [f"{w}\t{w.lower()}\t{p}" for w, p in SEED_VOCAB]
    lines.extend(f"w{i}\tw{i}\t{POS_TAGS[i % len(POS_TAGS)]}" for i in range(vocab_size))
    written = 0
    with open(path, "w", encoding="utf-8") as f:
        while written < n_tokens:
            n = min(chunk_size, n_tokens - written)
            ids = ((rng.zipf(1.3, n) - 1) % len(lines)).tolist()
            ends = set(np.cumsum(rng.integers(5, 30, size=n // 5 + 1)).tolist())
            f.write("".join(lines[i] + ("\n\n" if k + 1 in ends else "\n") for k, i in enumerate(ids)))
            f.write("\n")
            written += n
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Measure counting throughput on a synthetic corpus")
    parser.add_argument("--tokens", type=int, default=REFERENCE_TOKENS, help="Corpus size (default: %(default)s)")
    parser.add_argument("--threads", type=int, default=None, help="Worker processes (default: all cores)")
    parser.add_argument("--batch-size", type=int, default=5000, help="Sentences per shard (default: %(default)s)")
    parser.add_argument("--min-count", type=int, default=1, help="Frequency floor, >1 adds a pass (default: %(default)s)")
    parser.add_argument("--seed", type=int, default=0, help="Generator seed (default: %(default)s)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    with tempfile.TemporaryDirectory() as tmp:
        corpus = Path(tmp) / "synthetic.vrt"
        n_tokens = write_synthetic_corpus(corpus, args.tokens, seed=args.seed)
        logger.info("Generated %d tokens (%.1f MB)", n_tokens, corpus.stat().st_size / 1e6)

        settings = {"output_dir": Path(tmp), "batch_size": args.batch_size, "min_count": args.min_count}
        if args.threads is not None:
            settings["threads"] = args.threads
        config = RunConfig(**settings)
        lexicon = build_lexicon(TARGETS, config)

        start = time.perf_counter()
        table = count_corpus(corpus, lexicon, config)
        elapsed = time.perf_counter() - start

    rate = n_tokens / elapsed if elapsed > 0 else float("inf")
    logger.info(
        "Counted %d tokens in %.2f s (%.0f tokens/s, %d worker(s)); occurrences %s",
        n_tokens, elapsed, rate, config.threads, dict(table.occurrences),
    )
    if rate < REFERENCE_TOKENS / REFERENCE_SECONDS:
        logger.warning(
            "Below the reference rate of %.0f tokens/s", REFERENCE_TOKENS / REFERENCE_SECONDS
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
