import math

import pytest

from ffdistill.corpus import read_labeled, read_pairs
from ffdistill.distill import build_transfer_set, read_teacher_scores
from ffdistill.synth import LinearTeacher, SynthSpec, generate_fixture, make_teachers


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture")
    spec = SynthSpec(words=50, pairs=200, holdout=40, teachers=2, seed=3)
    paths = generate_fixture(out, spec)
    return spec, paths


class TestGeneration:
    def test_counts(self, fixture_dir):
        spec, paths = fixture_dir
        assert len(read_pairs(paths["corpus"])) == spec.pairs
        assert len(read_labeled(paths["holdout"])) == spec.holdout
        assert len(paths["scores"]) == spec.teachers

    def test_pairs_unique(self, fixture_dir):
        _, paths = fixture_dir
        pairs = read_pairs(paths["corpus"])
        assert len(set(pairs)) == len(pairs)

    def test_scores_parse_and_join(self, fixture_dir):
        spec, paths = fixture_dir
        streams = [read_teacher_scores(p) for p in paths["scores"]]
        examples, report = build_transfer_set(streams, temperature=1.0)
        assert report.matched == spec.pairs
        assert report.unmatched == 0

    def test_logits_match_teacher_probability(self, fixture_dir):
        spec, paths = fixture_dir
        _, teachers = make_teachers(spec)
        for record in read_teacher_scores(paths["scores"][0]):
            z_pos, z_neg = record.logits
            prob = 1.0 / (1.0 + math.exp(-(z_pos - z_neg)))
            assert prob == pytest.approx(teachers[0].probability(record.query, record.title),
                                         rel=1e-12)

    def test_holdout_labels_are_base_teacher_scores(self, fixture_dir):
        spec, paths = fixture_dir
        _, teachers = make_teachers(spec)
        for query, title, label in read_labeled(paths["holdout"]):
            assert label == pytest.approx(teachers[0].probability(query, title), rel=1e-12)

    def test_determinism(self, tmp_path):
        spec = SynthSpec(words=30, pairs=50, holdout=10, seed=11)
        a = generate_fixture(tmp_path / "a", spec)
        b = generate_fixture(tmp_path / "b", spec)
        for key in ("corpus", "holdout"):
            assert open(a[key], "rb").read() == open(b[key], "rb").read()
        assert open(a["scores"][0], "rb").read() == open(b["scores"][0], "rb").read()

    def test_more_teachers_keep_same_corpus(self, tmp_path):
        one = generate_fixture(tmp_path / "one", SynthSpec(words=30, pairs=50, holdout=5,
                                                           teachers=1, seed=4))
        two = generate_fixture(tmp_path / "two", SynthSpec(words=30, pairs=50, holdout=5,
                                                           teachers=3, seed=4))
        assert open(one["corpus"], "rb").read() == open(two["corpus"], "rb").read()

    def test_score_spread_covers_both_classes(self, fixture_dir):
        _, paths = fixture_dir
        labels = [label for _, _, label in read_labeled(paths["holdout"])]
        assert min(labels) < 0.5 < max(labels)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SynthSpec(words=3)
        with pytest.raises(ValueError):
            SynthSpec(teachers=0)


class TestLinearTeacher:
    def test_margin_is_additive_over_occurrences(self):
        teacher = LinearTeacher(["a", "b"], [1.5, -0.5])
        assert teacher.margin("a a", "b") == pytest.approx(2.5)
        assert teacher.logits("a", "") == (0.75, -0.75)

    def test_unknown_words_score_zero(self):
        teacher = LinearTeacher(["a"], [1.0])
        assert teacher.margin("zzz", "qqq") == 0.0
        assert teacher.probability("zzz", "") == pytest.approx(0.5)
