"""One-shot batch scorer CLI.

Reads a pair corpus (`query<TAB>title` per line, `#`-lines ignored) and
writes one teacher score file per model into --out-dir.
"""

from __future__ import annotations

import argparse
import sys

from pairscorer.scorer import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_MAX_LENGTH,
    ScorerConfig,
    ScorerError,
    score_corpus,
)


def read_pairs(path: str) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ScorerError(f"{path}:{line_no}: expected `query<TAB>title`, "
                                  f"got {len(fields)} fields")
            pairs.append((fields[0], fields[1]))
    return pairs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairscorer",
        description="score a text-pair corpus with pretrained classifiers and "
                    "export logits as teacher score files",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--model", action="append", required=True, metavar="PATH",
                        help="pretrained pair-classifier checkpoint; repeat for ensembles")
    parser.add_argument("--corpus", required=True, help="pair file to score")
    parser.add_argument("--out-dir", required=True, help="directory for score files")
    parser.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH,
                        help="token budget per encoded pair; longer pairs are truncated")
    parser.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE,
                        help="pairs per forward pass")
    parser.add_argument("--device", default="cpu", help="torch device")
    parser.add_argument("--positive-class", type=int, default=1, choices=(0, 1),
                        help="index of the relevant-class logit")
    parser.add_argument("--teacher-id", action="append", default=None, metavar="ID",
                        help="override the file's teacher id; repeat per model")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ScorerConfig(
            models=tuple(args.model),
            out_dir=args.out_dir,
            max_length=args.max_length,
            batch_size=args.batch_size,
            device=args.device,
            positive_class=args.positive_class,
            teacher_ids=tuple(args.teacher_id) if args.teacher_id else (),
        )
        pairs = read_pairs(args.corpus)
        for stats in score_corpus(config, pairs):
            print(f"teacher={stats.teacher_id}\tpairs={stats.pairs}\t"
                  f"truncated={stats.truncated}\tpath={stats.path}")
    except (ScorerError, OSError) as exc:
        print(f"pairscorer: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
