from collections import Counter

import pytest

from ffdistill.corpus import PairReader, read_labeled, write_labeled, write_pairs
from ffdistill.errors import FormatError
from ffdistill.tokenizer import token_set, tokenize
from ffdistill.vocab import (
    Vocab,
    build_vocab,
    count_tokens,
    load_vocab,
    merge_counts,
    save_vocab,
    vocab_from_counts,
)


def brute_force_counts(records):
    """Oracle: plain dictionary counter, no Counter machinery."""
    counts = {}
    for q, t in records:
        for text in (q, t):
            for tok in token_set(tokenize(text)):
                counts[tok] = counts.get(tok, 0) + 1
    return counts


class TestBuildVocab:
    def test_two_copies_retain_all_seven_tokens(self):
        # Hand count: each CWUB token of "mac电脑" appears once per copy and
        # the pair's title side is empty.
        records = [("mac电脑", ""), ("mac电脑", "")]
        vocab = build_vocab(records, min_count=2)
        assert vocab.size == 7
        assert all(vocab.count(t) == 2 for t in vocab.tokens)
        assert set(vocab.tokens) == set(token_set(tokenize("mac电脑")))

    def test_min_count_one_single_record(self):
        vocab = build_vocab([("a", "")], min_count=1)
        assert set(vocab.tokens) == {"a", "^a", "a$"}
        assert vocab.size == 3

    def test_empty_corpus_is_valid(self):
        vocab = build_vocab([], min_count=1)
        assert vocab.size == 0
        assert vocab.lookup("a") is None

    def test_counts_match_brute_force(self):
        records = [
            ("mac电脑", "apple mac电脑 pro"),
            ("red sweater", "red red sweater 毛衣"),
            ("电", "电 电 脑"),
        ]
        expected = brute_force_counts(records)
        got = count_tokens(records)
        assert dict(got) == expected

    def test_both_sides_contribute(self):
        vocab = build_vocab([("a", "a")], min_count=2)
        assert vocab.count("a") == 2

    def test_ordering_count_desc_then_bytes(self):
        counts = Counter({"b": 3, "a": 3, "z": 5, "电": 3})
        vocab = vocab_from_counts(counts, min_count=1)
        # "电" encodes to bytes above ascii letters.
        assert vocab.tokens == ("z", "a", "b", "电")
        assert [vocab.lookup(t) for t in vocab.tokens] == [0, 1, 2, 3]

    def test_max_size_keeps_highest_ranked(self):
        counts = Counter({"a": 5, "b": 4, "c": 3, "d": 2})
        vocab = vocab_from_counts(counts, min_count=1, max_size=2)
        assert vocab.tokens == ("a", "b")

    def test_min_count_monotonicity(self):
        records = [("mac电脑", "red sweater"), ("mac电脑", ""), ("red", "red")]
        kept = [set(build_vocab(records, min_count=m).tokens) for m in (1, 2, 3, 4)]
        for smaller, larger in zip(kept[1:], kept):
            assert smaller <= larger

    def test_order_independence(self):
        records = [("mac电脑", "red"), ("red sweater", "电"), ("a b", "c")]
        v1 = build_vocab(records, min_count=1)
        v2 = build_vocab(list(reversed(records)), min_count=1)
        assert v1 == v2

    def test_sharded_counting_merges_to_sequential(self):
        records = [("mac电脑", "red"), ("red sweater", "电"), ("a b", "c"), ("mac", "mac")]
        whole = count_tokens(records)
        merged = merge_counts(count_tokens(records[:2]), count_tokens(records[2:]))
        assert whole == merged

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            build_vocab([], min_count=0)
        with pytest.raises(ValueError):
            vocab_from_counts(Counter(), min_count=1, max_size=0)


class TestLookup:
    def test_lookup_retained_token(self):
        vocab = build_vocab([("mac电脑", ""), ("mac电脑", "")], min_count=2)
        assert vocab.lookup("电脑") in range(7)

    def test_lookup_absent(self):
        vocab = build_vocab([("mac电脑", "")], min_count=1)
        assert vocab.lookup("xyz") is None

    def test_lookup_empty_string(self):
        vocab = build_vocab([("mac电脑", "")], min_count=1)
        assert vocab.lookup("") is None


class TestSaveLoad:
    def test_round_trip_identity(self, tmp_path):
        vocab = build_vocab([("mac电脑", ""), ("mac电脑", "")], min_count=2)
        path = tmp_path / "vocab.tsv"
        save_vocab(vocab, path)
        assert load_vocab(path) == vocab

    def test_header_and_line_layout(self, tmp_path):
        vocab = vocab_from_counts(Counter({"a": 2, "b": 1}), min_count=1)
        path = tmp_path / "vocab.tsv"
        save_vocab(vocab, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "#cwub-vocab v1 size=2"
        assert lines[1] == "a\t0\t2"
        assert lines[2] == "b\t1\t1"

    def test_duplicate_token_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("#cwub-vocab v1 size=2\na\t0\t2\na\t1\t2\n", encoding="utf-8")
        with pytest.raises(FormatError, match="duplicate"):
            load_vocab(path)

    def test_non_dense_ids_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("#cwub-vocab v1 size=2\na\t0\t2\nb\t5\t1\n", encoding="utf-8")
        with pytest.raises(FormatError, match="dense"):
            load_vocab(path)

    def test_malformed_line_names_line(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("#cwub-vocab v1 size=1\na\t0\n", encoding="utf-8")
        with pytest.raises(FormatError, match="vocab.tsv:2"):
            load_vocab(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("nonsense\n", encoding="utf-8")
        with pytest.raises(FormatError, match=":1"):
            load_vocab(path)

    def test_size_mismatch_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("#cwub-vocab v1 size=3\na\t0\t2\n", encoding="utf-8")
        with pytest.raises(FormatError, match="size"):
            load_vocab(path)

    def test_order_violation_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("#cwub-vocab v1 size=2\na\t0\t1\nb\t1\t9\n", encoding="utf-8")
        with pytest.raises(FormatError, match="order"):
            load_vocab(path)


class TestPairFiles:
    def test_reader_skips_and_tallies_malformed(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("#pairs v1\nq1\tt1\nbroken line\nq2\tt2\na\tb\tc\n", encoding="utf-8")
        reader = PairReader(str(path))
        pairs = list(reader)
        assert pairs == [("q1", "t1"), ("q2", "t2")]
        assert reader.skipped == 2
        assert reader.read == 2

    def test_write_read_round_trip(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        write_pairs([("mac电脑", "apple"), ("a", "b")], path)
        assert list(PairReader(str(path))) == [("mac电脑", "apple"), ("a", "b")]

    def test_labeled_round_trip(self, tmp_path):
        path = tmp_path / "labeled.tsv"
        rows = [("q", "t", 0.25), ("q2", "t2", 1.0)]
        write_labeled(rows, path)
        assert read_labeled(path) == rows

    def test_labeled_rejects_bad_label(self, tmp_path):
        path = tmp_path / "labeled.tsv"
        path.write_text("#labeled v1\nq\tt\t1.5\n", encoding="utf-8")
        with pytest.raises(FormatError, match="outside"):
            read_labeled(path)
