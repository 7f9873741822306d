"""Command-line entry point for the whole pipeline.

Exit codes: 0 success, 1 usage error, 2 input/format error, 3 numeric
failure. Every run logs its fully resolved configuration to stderr so any
result can be reproduced from the log line alone.
"""

from __future__ import annotations

import argparse
import json
import sys

from ffdistill import bench as bench_mod
from ffdistill import corpus as corpus_mod
from ffdistill import distill as distill_mod
from ffdistill import metrics as metrics_mod
from ffdistill import student as student_mod
from ffdistill import synth as synth_mod
from ffdistill import vocab as vocab_mod
from ffdistill.embedding import embed_sentence, embedding_distance
from ffdistill.errors import InputError, NumericError
from ffdistill.tokenizer import tokenize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3

PAIR_FORMAT_HELP = "pair file: `query<TAB>title` per line, `#`-lines ignored"
SCORE_FORMAT_HELP = ("teacher score file: header `#teacher-scores v1 teacher=<id> "
                     "kind={logits|prob}`, rows `query<TAB>title<TAB>z_pos<TAB>z_neg` "
                     "(or `...<TAB>prob`), sorted by (query,title)")
TRANSFER_FORMAT_HELP = ("transfer file: header `#transfer v1 T=<temp> teachers=<k>`, "
                        "rows `query<TAB>title<TAB>soft_label<TAB>provenance`")
LABELED_FORMAT_HELP = ("labeled file: header `#labeled v1`, rows "
                       "`query<TAB>title<TAB>label` with label in [0,1]")
BEHAVIOR_FORMAT_HELP = ("behavior file: header `#behavior v1`, rows `query<TAB>title<TAB>"
                        "orders<TAB>displays<TAB>clicks<TAB>skips`, sorted by (query,title)")
VOCAB_FORMAT_HELP = ("vocab file: header `#cwub-vocab v1 size=<N>`, rows "
                     "`token<TAB>id<TAB>count` ordered by id")
CHECKPOINT_FORMAT_HELP = "checkpoint: binary `B2DNN1` format (see README for exact layout)"


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; the contract reserves 2 for input
    format problems, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter,
                     argparse.RawDescriptionHelpFormatter):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _hidden_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in text.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"hidden sizes must be positive, got {text!r}")
    return sizes


def build_parser() -> _Parser:
    parser = _Parser(
        prog="ffdistill",
        description="Distill an expensive text-pair classifier into a fast "
                    "feed-forward student: vocabulary build, transfer-set "
                    "assembly, training, evaluation, and latency benchmarks.",
        formatter_class=_HelpFormatter,
    )
    sub = parser.add_subparsers(
        dest="command", required=True, parser_class=_Parser,
        metavar="{build-vocab,make-transfer,train,eval,bench,embed-dist}")

    def common(p):
        p.add_argument("--config", default=None,
                       help="JSON file of flag defaults (explicit flags win)")
        p.add_argument("--seed", type=int, default=0, help="seed for any randomized step")

    p = sub.add_parser("build-vocab", help="count tokens and build the filtered vocabulary",
                       formatter_class=_HelpFormatter,
                       epilog=f"formats:\n  {PAIR_FORMAT_HELP}\n  {VOCAB_FORMAT_HELP}")
    common(p)
    p.add_argument("--corpus", required=True, help="input pair file")
    p.add_argument("--min-count", type=_positive_int, default=vocab_mod.DEFAULT_MIN_COUNT,
                   help="drop tokens seen fewer times than this")
    p.add_argument("--max-size", type=_positive_int, default=None,
                   help="keep at most this many tokens (default: unlimited)")
    p.add_argument("--out", required=True, help="output vocab file")
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("make-transfer", help="soften, stack, and filter teacher scores",
                       formatter_class=_HelpFormatter,
                       epilog="formats:\n  " + "\n  ".join(
                           (SCORE_FORMAT_HELP, BEHAVIOR_FORMAT_HELP,
                            PAIR_FORMAT_HELP, TRANSFER_FORMAT_HELP)))
    common(p)
    p.add_argument("--scores", action="append", required=True, metavar="PATH",
                   help="teacher score file; repeat once per teacher")
    p.add_argument("--temperature", type=_positive_float, default=1.0,
                   help="softmax temperature applied to logit-kind teachers")
    p.add_argument("--behavior", default=None, help="optional behavior log file")
    p.add_argument("--policy", choices=distill_mod.POLICIES, default=distill_mod.POLICY_NONE,
                   help="behavior filtering regime")
    p.add_argument("--positives", default=None,
                   help="optional pair file appended as label-1.0 examples")
    p.add_argument("--out", required=True, help="output transfer file")
    p.add_argument("--report", default=None, help="optional join-report file")
    p.set_defaults(func=cmd_make_transfer)

    p = sub.add_parser("train", help="train a student on a transfer set",
                       formatter_class=_HelpFormatter,
                       epilog="formats:\n  " + "\n  ".join(
                           (TRANSFER_FORMAT_HELP, VOCAB_FORMAT_HELP, CHECKPOINT_FORMAT_HELP)))
    common(p)
    p.add_argument("--transfer", required=True, help="transfer file to train on")
    p.add_argument("--vocab", required=True, help="vocab file")
    p.add_argument("--topology", choices=student_mod.TOPOLOGIES,
                   default=student_mod.TOPOLOGY_FC, help="student network shape")
    p.add_argument("--hidden-sizes", type=_hidden_sizes,
                   default=student_mod.DEFAULT_HIDDEN_SIZES,
                   help="comma-separated hidden layer widths")
    p.add_argument("--dim", type=_positive_int, default=64, help="embedding dimension")
    p.add_argument("--lr", type=float, default=student_mod.DEFAULT_LEARNING_RATE,
                   help="Adagrad learning rate")
    p.add_argument("--epochs", type=_positive_int, default=5, help="training epochs")
    p.add_argument("--batch-size", type=_positive_int, default=student_mod.DEFAULT_BATCH_SIZE,
                   help="mini-batch size")
    p.add_argument("--out", required=True, help="output checkpoint")
    p.add_argument("--loss-log", default=None, help="optional per-epoch loss file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a labeled set and report metrics",
                       formatter_class=_HelpFormatter,
                       epilog="formats:\n  " + "\n  ".join(
                           (LABELED_FORMAT_HELP, VOCAB_FORMAT_HELP, CHECKPOINT_FORMAT_HELP)))
    common(p)
    p.add_argument("--checkpoint", required=True, help="student checkpoint")
    p.add_argument("--vocab", required=True, help="vocab file")
    p.add_argument("--labeled", required=True, help="labeled pair file")
    p.add_argument("--threshold", type=float, default=metrics_mod.DEFAULT_THRESHOLD,
                   help="classification threshold on the student score")
    p.add_argument("--out", default=None, help="report file (default: print to stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="measure end-to-end inference latency",
                       formatter_class=_HelpFormatter,
                       epilog="formats:\n  " + "\n  ".join(
                           (PAIR_FORMAT_HELP, VOCAB_FORMAT_HELP, CHECKPOINT_FORMAT_HELP)))
    common(p)
    p.add_argument("--checkpoint", required=True, help="student checkpoint")
    p.add_argument("--vocab", required=True, help="vocab file")
    p.add_argument("--corpus", required=True, help="pair file to score")
    p.add_argument("--batches", type=_positive_int, default=bench_mod.DEFAULT_BATCHES,
                   help="timed batches")
    p.add_argument("--batch-size", type=_positive_int, default=bench_mod.DEFAULT_BATCH_SIZE,
                   help="examples per batch")
    p.add_argument("--warmup", type=_nonnegative_int, default=bench_mod.DEFAULT_WARMUP,
                   help="untimed warmup batches")
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="BLAS thread cap while scoring")
    p.add_argument("--tsv", action="store_true",
                   help="also print the report as one machine-readable TSV row")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("embed-dist", help="print distances between two texts' embeddings",
                       formatter_class=_HelpFormatter,
                       epilog="formats:\n  " + "\n  ".join(
                           (VOCAB_FORMAT_HELP, CHECKPOINT_FORMAT_HELP)))
    common(p)
    p.add_argument("--checkpoint", required=True, help="student checkpoint")
    p.add_argument("--vocab", required=True, help="vocab file")
    p.add_argument("text_a", help="first text")
    p.add_argument("text_b", help="second text")
    p.set_defaults(func=cmd_embed_dist)

    # Fixture generator for desk-scale testing; deliberately absent from the
    # subcommand listing above.
    p = sub.add_parser("synth-teacher", formatter_class=_HelpFormatter,
                       description="generate a synthetic corpus scored by a fixed "
                                   "random linear teacher, in the real file formats")
    common(p)
    p.add_argument("--out-dir", required=True, help="directory for generated files")
    p.add_argument("--words", type=_positive_int, default=synth_mod.DEFAULT_WORDS,
                   help="synthetic word vocabulary size")
    p.add_argument("--pairs", type=_positive_int, default=synth_mod.DEFAULT_PAIRS,
                   help="training pairs to generate")
    p.add_argument("--holdout", type=_nonnegative_int, default=synth_mod.DEFAULT_HOLDOUT,
                   help="held-out labeled pairs")
    p.add_argument("--teachers", type=_positive_int, default=1,
                   help="number of teacher score files")
    p.set_defaults(func=cmd_synth_teacher)

    return parser


def _apply_config_file(parser: _Parser, args: argparse.Namespace) -> None:
    """Config values stand in for defaults; flags given on the command line
    (i.e. values that differ from the declared default) win."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            overrides = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config file {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {args.config} is not valid JSON: {exc}") from exc
    if not isinstance(overrides, dict):
        raise InputError(f"config file {args.config} must hold a JSON object")
    defaults = _subcommand_defaults(parser, args.command)
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if dest not in defaults:
            raise InputError(f"config file {args.config}: unknown option {key!r}")
        if getattr(args, dest) == defaults[dest]:
            if dest == "hidden_sizes" and isinstance(value, list):
                value = tuple(value)
            setattr(args, dest, value)


def _subcommand_defaults(parser: _Parser, command: str) -> dict:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            sub = action.choices[command]
            return {a.dest: a.default for a in sub._actions
                    if a.dest not in ("help", "func")}
    return {}


def _log_resolved_config(args: argparse.Namespace) -> None:
    resolved = {k: v for k, v in vars(args).items() if k != "func"}
    print("resolved-config\t" + json.dumps(resolved, sort_keys=True, default=str),
          file=sys.stderr)


def _load_model_and_vocab(args):
    vocab = vocab_mod.load_vocab(args.vocab)
    model = student_mod.load_checkpoint(args.checkpoint)
    if model.table.vocab_size != vocab.size:
        raise InputError(
            f"checkpoint table has {model.table.vocab_size} rows but vocab "
            f"{args.vocab} has {vocab.size} entries; they must come from the same build")
    return model, vocab


def cmd_build_vocab(args) -> None:
    reader = corpus_mod.PairReader(args.corpus)
    vocab = vocab_mod.build_vocab(reader, min_count=args.min_count, max_size=args.max_size)
    vocab_mod.save_vocab(vocab, args.out)
    print(f"vocab size\t{vocab.size}")
    print(f"records read\t{reader.read}")
    print(f"records skipped\t{reader.skipped}")


def cmd_make_transfer(args) -> None:
    streams = [distill_mod.read_teacher_scores(path) for path in args.scores]
    positives = None
    positives_reader = None
    if args.positives:
        positives_reader = corpus_mod.PairReader(args.positives)
        positives = positives_reader
    behavior = distill_mod.read_behavior_file(args.behavior) if args.behavior else None
    examples, report = distill_mod.build_transfer_set(
        streams, temperature=args.temperature, behavior=behavior,
        policy=args.policy, click_positives=positives)
    if positives_reader is not None:
        report.skipped_lines += positives_reader.skipped
    distill_mod.write_transfer_file(examples, args.out, temperature=args.temperature,
                                    teachers=len(args.scores))
    print(report.as_text(), end="")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.as_text())


def cmd_train(args) -> None:
    vocab = vocab_mod.load_vocab(args.vocab)
    examples = distill_mod.read_transfer_file(args.transfer)
    rows = [(ex.query, ex.title, ex.soft_label) for ex in examples]
    config = student_mod.StudentConfig(
        topology=args.topology, hidden_sizes=args.hidden_sizes, embedding_dim=args.dim,
        learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch_size,
        seed=args.seed)
    model = student_mod.init_model(vocab.size, config)
    encoded = student_mod.encode_examples(rows, vocab)
    _, losses = student_mod.train(model, encoded)
    student_mod.save_checkpoint(model, args.out)
    lines = "".join(f"{epoch}\t{value!r}\n" for epoch, value in enumerate(losses))
    print(lines, end="")
    if args.loss_log:
        with open(args.loss_log, "w", encoding="utf-8") as fh:
            fh.write(lines)


def cmd_eval(args) -> None:
    model, vocab = _load_model_and_vocab(args)
    rows = corpus_mod.read_labeled(args.labeled)
    if not rows:
        raise InputError(f"labeled file {args.labeled} has no rows")
    scores = student_mod.predict_texts(model, vocab, [(q, t) for q, t, _ in rows])
    labels = [label for _, _, label in rows]
    report = metrics_mod.compute_report(scores, labels, threshold=args.threshold)
    print(report.as_text(), end="")
    if args.out:
        metrics_mod.write_report(report, args.out)


def cmd_bench(args) -> None:
    model, vocab = _load_model_and_vocab(args)
    pairs = corpus_mod.read_pairs(args.corpus)
    report = bench_mod.run_bench(model, vocab, pairs, batches=args.batches,
                                 batch_size=args.batch_size, warmup=args.warmup,
                                 threads=args.threads)
    print(report.as_text(), end="")
    if args.tsv:
        print(report.tsv_header(), end="")
        print(report.as_tsv_row(), end="")


def cmd_embed_dist(args) -> None:
    model, vocab = _load_model_and_vocab(args)
    emb_a = embed_sentence(tokenize(args.text_a), vocab, model.table)
    emb_b = embed_sentence(tokenize(args.text_b), vocab, model.table)
    for metric in ("cosine", "euclidean", "manhattan"):
        print(f"{metric}\t{embedding_distance(emb_a, emb_b, metric)!r}")


def cmd_synth_teacher(args) -> None:
    spec = synth_mod.SynthSpec(words=args.words, pairs=args.pairs, holdout=args.holdout,
                               teachers=args.teachers, seed=args.seed)
    paths = synth_mod.generate_fixture(args.out_dir, spec)
    print(f"corpus\t{paths['corpus']}")
    for path in paths["scores"]:
        print(f"scores\t{path}")
    print(f"holdout\t{paths['holdout']}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        _apply_config_file(parser, args)
        _log_resolved_config(args)
        args.func(args)
    except (student_mod.CheckpointError,) as exc:
        print(f"ffdistill: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, ValueError) as exc:
        print(f"ffdistill: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, OSError) as exc:
        print(f"ffdistill: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
