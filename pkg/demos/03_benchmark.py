"""Walkthrough: measuring end-to-end inference latency.

Run with: python3 demos/03_benchmark.py
"""

import tempfile
from pathlib import Path

from ffdistill.bench import run_bench
from ffdistill.corpus import PairReader
from ffdistill.distill import build_transfer_set, read_teacher_scores
from ffdistill.student import StudentConfig, encode_examples, init_model, train
from ffdistill.synth import SynthSpec, generate_fixture
from ffdistill.vocab import build_vocab

with tempfile.TemporaryDirectory() as tmp:
    spec = SynthSpec(words=2000, pairs=6000, holdout=0, seed=5)
    paths = generate_fixture(Path(tmp) / "fixture", spec)
    pairs = list(PairReader(paths["corpus"]))
    vocab = build_vocab(pairs, min_count=2)

    # Production-shaped student: 64-dim embeddings, [1024,256,128,64] hidden.
    config = StudentConfig(hidden_sizes=(1024, 256, 128, 64), embedding_dim=64,
                           learning_rate=0.1, epochs=1, batch_size=256, seed=0)
    model = init_model(vocab.size, config)
    examples, _ = build_transfer_set([read_teacher_scores(paths["scores"][0])],
                                     temperature=1.0)
    train(model, encode_examples([(e.query, e.title, e.soft_label) for e in examples], vocab))

    # The protocol: warmup excluded, scores checksummed so nothing can be
    # optimized away, BLAS capped at one thread for comparable numbers.
    report = run_bench(model, vocab, pairs, batches=50, batch_size=128,
                       warmup=5, threads=1)
    print(report.as_text(), end="")

    print("\nphase share of wall time:")
    for phase in ("tokenize", "embed", "forward"):
        seconds = getattr(report, f"{phase}_seconds")
        print(f"  {phase:<9} {seconds:6.3f}s  ({100 * seconds / report.total_seconds:4.1f}%)")

    again = run_bench(model, vocab, pairs, batches=50, batch_size=128,
                      warmup=5, threads=1)
    print(f"\nchecksums identical across runs: {report.checksum == again.checksum}")
