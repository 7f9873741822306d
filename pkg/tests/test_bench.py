import numpy as np
import pytest

from ffdistill.bench import run_bench
from ffdistill.errors import InputError
from ffdistill.student import StudentConfig, init_model
from ffdistill.vocab import build_vocab


@pytest.fixture
def tiny_setup():
    pairs = [("mac电脑", "apple mac电脑 pro"), ("red sweater", "red wool sweater"),
             ("电", "电 脑"), ("mac", "mac book")]
    vocab = build_vocab(pairs * 2, min_count=2)
    config = StudentConfig(hidden_sizes=(8, 4), embedding_dim=6, seed=1)
    model = init_model(vocab.size, config)
    return model, vocab, pairs


class TestRunBench:
    def test_single_example_accounting(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        report = run_bench(model, vocab, pairs, batches=1, batch_size=1, warmup=0)
        assert report.total_examples == 1
        assert report.batches == 1 and report.batch_size == 1

    def test_accounting_identities(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        report = run_bench(model, vocab, pairs, batches=4, batch_size=3, warmup=1)
        assert report.total_examples == report.batches * report.batch_size
        phase_sum = report.tokenize_seconds + report.embed_seconds + report.forward_seconds
        assert phase_sum <= report.total_seconds + 1e-6
        assert report.examples_per_second == pytest.approx(
            report.total_examples / report.total_seconds)

    def test_checksum_stable_across_runs(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        a = run_bench(model, vocab, pairs, batches=3, batch_size=4, warmup=1)
        b = run_bench(model, vocab, pairs, batches=3, batch_size=4, warmup=1)
        assert a.checksum == b.checksum
        assert len(a.checksum) == 64

    def test_checksum_differs_for_different_model(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        other = init_model(vocab.size, StudentConfig(hidden_sizes=(8, 4), embedding_dim=6, seed=2))
        a = run_bench(model, vocab, pairs, batches=2, batch_size=2, warmup=0)
        b = run_bench(other, vocab, pairs, batches=2, batch_size=2, warmup=0)
        assert a.checksum != b.checksum

    def test_small_corpus_reports_cycling(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        report = run_bench(model, vocab, pairs, batches=3, batch_size=4, warmup=0)
        assert report.corpus_cycled is True
        big = run_bench(model, vocab, pairs * 10, batches=2, batch_size=2, warmup=0)
        assert big.corpus_cycled is False

    def test_doubling_batches_roughly_doubles_time(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        small = run_bench(model, vocab, pairs, batches=20, batch_size=8, warmup=2)
        large = run_bench(model, vocab, pairs, batches=40, batch_size=8, warmup=2)
        ratio = large.total_seconds / small.total_seconds
        assert 1.0 < ratio < 4.0  # 2x nominal, within a generous noise band

    def test_empty_corpus_rejected(self, tiny_setup):
        model, vocab, _ = tiny_setup
        with pytest.raises(InputError, match="empty"):
            run_bench(model, vocab, [], batches=1, batch_size=1)

    def test_invalid_protocol_rejected(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        with pytest.raises(ValueError):
            run_bench(model, vocab, pairs, batches=0)
        with pytest.raises(ValueError):
            run_bench(model, vocab, pairs, threads=0)

    def test_report_text_and_tsv(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        report = run_bench(model, vocab, pairs, batches=1, batch_size=2, warmup=0)
        text = report.as_text()
        assert "batches\t1\n" in text
        assert "checksum\t" in text
        header, row = report.tsv_header(), report.as_tsv_row()
        assert len(header.split("\t")) == len(row.split("\t"))

    def test_threads_reported(self, tiny_setup):
        model, vocab, pairs = tiny_setup
        report = run_bench(model, vocab, pairs, batches=1, batch_size=1, warmup=0, threads=2)
        assert report.threads == 2
