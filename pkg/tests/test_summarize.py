import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reviewscope.corpus import Corpus, Review, Schema, ExtractionRecord
from reviewscope.featurize import tokenize, vectors_from_extractions
from reviewscope.summarize import (
    Histogram,
    SummaryError,
    attribute_histogram,
    build_corpus_stats,
    histogram_distance,
    summarize_cluster,
    tfidf_top_terms,
    top_divergent_attributes,
)


def brute_force_tfidf(corpus: Corpus, member_rows, n, gram):
    """Independent oracle: dict-based tf-idf straight from the definitions."""
    def grams_of(text):
        tokens = tokenize(text, drop_stopwords=True)
        if gram == 1:
            return tokens
        return [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]

    per_review = [grams_of(r.text) for r in corpus.reviews]
    r = len(corpus.reviews)
    df = Counter()
    for grams in per_review:
        for term in set(grams):
            df[term] += 1
    cluster_grams = []
    for i in member_rows:
        cluster_grams.extend(per_review[i])
    total = len(cluster_grams)
    if total == 0:
        return []
    counts = Counter(cluster_grams)
    scored = [
        (term, (c / total) * (math.log((1 + r) / (1 + df[term])) + 1.0)) for term, c in counts.items()
    ]
    scored.sort(key=lambda ts: (-ts[1], ts[0]))
    return scored[:n]


class TestTfidf:
    def make_corpus(self):
        reviews = [
            Review("r1", "e", "quiet garden view with quiet mornings"),
            Review("r2", "e", "garden breakfast was lovely breakfast"),
            Review("r3", "e", "city noise and garden dust"),
        ]
        return Corpus.build(reviews, None)

    def test_ubiquitous_term_idf_one(self):
        corpus = self.make_corpus()
        stats = build_corpus_stats(corpus)
        # "garden" appears in all three reviews: idf = ln(4/4)+1 = 1
        scores = dict(tfidf_top_terms([0, 1, 2], stats, n=50))
        total = sum(len(u) for u in stats.unigrams)
        count = sum(u.count("garden") for u in stats.unigrams)
        assert scores["garden"] == pytest.approx(count / total)

    def test_matches_brute_force_oracle(self):
        corpus = self.make_corpus()
        stats = build_corpus_stats(corpus)
        for rows in ([0], [1], [2], [0, 1], [0, 1, 2]):
            for gram in (1, 2):
                got = tfidf_top_terms(rows, stats, n=100, gram=gram)
                expected = brute_force_tfidf(corpus, rows, 100, gram)
                assert [t for t, _ in got] == [t for t, _ in expected]
                for (_, a), (_, b) in zip(got, expected):
                    assert a == pytest.approx(b, abs=1e-9)

    def test_unique_term_ranks_first_in_own_cluster(self):
        corpus = self.make_corpus()
        stats = build_corpus_stats(corpus)
        top = tfidf_top_terms([0], stats, n=3)
        assert top[0][0] == "quiet"  # appears twice and only in r1

    def test_bigrams_are_adjacent_surviving_pairs(self):
        corpus = Corpus.build([Review("r1", "e", "the great location")], None)
        stats = build_corpus_stats(corpus)
        assert stats.bigrams[0] == ("great location",)

    def test_n_nonpositive(self):
        corpus = self.make_corpus()
        stats = build_corpus_stats(corpus)
        assert tfidf_top_terms([0], stats, n=0) == []
        assert tfidf_top_terms([0], stats, n=-3) == []


class TestHistogram:
    def test_binning_rule(self):
        h = attribute_histogram(np.array([-1.0, -1.0, 1.0]))
        assert h.counts == (2, 0, 0, 0, 0, 0, 0, 1)
        assert h.total == 3

    def test_empty(self):
        h = attribute_histogram(np.array([]))
        assert h.counts == (0,) * 8
        assert h.total == 0

    def test_zero_goes_to_bin_four(self):
        h = attribute_histogram(np.array([0.0]))
        assert h.counts.index(1) == 4

    def test_edges(self):
        h = attribute_histogram(np.array([0.0]))
        assert len(h.bin_edges) == 9
        assert h.bin_edges[0] == -1.0
        assert h.bin_edges[-1] == 1.0


class TestHistogramDistance:
    def test_identical_zero(self):
        h = attribute_histogram(np.array([0.1, 0.5, -0.2]))
        assert histogram_distance(h, h) == 0.0

    def test_disjoint_mass_two(self):
        h1 = attribute_histogram(np.array([-1.0, -0.95]))
        h2 = attribute_histogram(np.array([0.9, 0.99, 1.0]))
        assert histogram_distance(h1, h2) == pytest.approx(2.0)

    def test_arithmetic(self):
        h1 = Histogram((0.0, 0.5, 1.0), (2, 2))
        h2 = Histogram((0.0, 0.5, 1.0), (1, 3))
        assert histogram_distance(h1, h2) == pytest.approx(0.5)

    def test_one_empty_is_two(self):
        h1 = attribute_histogram(np.array([]))
        h2 = attribute_histogram(np.array([0.3]))
        assert histogram_distance(h1, h2) == 2.0
        assert histogram_distance(h2, h1) == 2.0

    def test_both_empty_zero(self):
        h = attribute_histogram(np.array([]))
        assert histogram_distance(h, h) == 0.0

    def test_binning_mismatch(self):
        h1 = Histogram((0.0, 1.0), (1,))
        h2 = Histogram((0.0, 0.5, 1.0), (1, 0))
        with pytest.raises(SummaryError, match="binning"):
            histogram_distance(h1, h2)

    @given(
        st.lists(st.integers(min_value=0, max_value=20), min_size=8, max_size=8),
        st.lists(st.integers(min_value=0, max_value=20), min_size=8, max_size=8),
        st.lists(st.integers(min_value=0, max_value=20), min_size=8, max_size=8),
    )
    @settings(max_examples=200, deadline=None)
    def test_metric_properties(self, c1, c2, c3):
        edges = tuple(np.linspace(-1, 1, 9))
        h1, h2, h3 = (Histogram(edges, tuple(c)) for c in (c1, c2, c3))
        d12, d21 = histogram_distance(h1, h2), histogram_distance(h2, h1)
        assert d12 == d21
        assert histogram_distance(h1, h1) == 0.0
        assert 0.0 <= d12 <= 2.0
        d13, d23 = histogram_distance(h1, h3), histogram_distance(h2, h3)
        assert d12 <= d13 + d23 + 1e-12


def make_featured_corpus():
    reviews = [
        Review("r1", "e1", "Clean room. Quiet nights!"),  # 2 sentences
        Review("r2", "e1", "The location was awful and loud"),
        Review("r3", "e2", "Lovely staff, spotless location"),
        Review("r4", "e2", "Dusty carpet everywhere"),
    ]
    corpus = Corpus.build(reviews, None)
    schema = Schema(("cleanliness", "location"))
    records = [
        ExtractionRecord("r1", "cleanliness", 0.8),
        ExtractionRecord("r2", "location", -0.6),
        ExtractionRecord("r3", "cleanliness", 0.9),
        ExtractionRecord("r3", "location", 0.05),
        ExtractionRecord("r4", "cleanliness", -0.7),
    ]
    features = vectors_from_extractions(records, schema, corpus)
    sentiments = np.array([0.8, -0.6, 0.475, -0.7])
    return corpus, features, sentiments


class TestSummarizeCluster:
    def test_average_lengths(self):
        corpus, features, sentiments = make_featured_corpus()
        stats = build_corpus_stats(corpus)
        summary = summarize_cluster([0, 1], features, sentiments, stats)
        c1 = len(corpus.reviews[0].text)
        c2 = len(corpus.reviews[1].text)
        assert summary.avg_chars == pytest.approx((c1 + c2) / 2)
        assert summary.avg_sentences == pytest.approx((2 + 1) / 2)

    def test_attr_means_present_only(self):
        corpus, features, sentiments = make_featured_corpus()
        stats = build_corpus_stats(corpus)
        summary = summarize_cluster([2, 3], features, sentiments, stats)
        assert summary.attr_means["cleanliness"] == pytest.approx((0.9 - 0.7) / 2)
        assert summary.attr_means["location"] == pytest.approx(0.05)

    def test_absent_attribute_omitted(self):
        corpus, features, sentiments = make_featured_corpus()
        stats = build_corpus_stats(corpus)
        summary = summarize_cluster([0], features, sentiments, stats)
        assert "location" not in summary.attr_means
        assert summary.attr_histograms["location"].total == 0

    def test_histogram_counts_present_reviews(self):
        corpus, features, sentiments = make_featured_corpus()
        stats = build_corpus_stats(corpus)
        summary = summarize_cluster([0, 1, 2, 3], features, sentiments, stats)
        assert summary.attr_histograms["cleanliness"].total == 3
        assert summary.attr_histograms["location"].total == 2

    def test_top_lists_bounded(self):
        corpus, features, sentiments = make_featured_corpus()
        stats = build_corpus_stats(corpus)
        summary = summarize_cluster([0, 1, 2, 3], features, sentiments, stats, n_top=3)
        assert len(summary.top_words) <= 3
        assert len(summary.top_bigrams) <= 3


class TestDivergence:
    def test_equal_summaries_all_zero(self):
        corpus, features, sentiments = make_featured_corpus()
        stats = build_corpus_stats(corpus)
        s = summarize_cluster([0, 1], features, sentiments, stats)
        ranked = top_divergent_attributes(s, s)
        assert [name for name, _ in ranked] == ["cleanliness", "location"]
        assert all(d == 0.0 for _, d in ranked)

    def test_single_differing_attribute(self):
        corpus, features, sentiments = make_featured_corpus()
        stats = build_corpus_stats(corpus)
        s1 = summarize_cluster([0], features, sentiments, stats)  # cleanliness 0.8
        s2 = summarize_cluster([3], features, sentiments, stats)  # cleanliness -0.7
        ranked = top_divergent_attributes(s1, s2, m=1)
        assert ranked[0][0] == "cleanliness"
        assert ranked[0][1] > 0
