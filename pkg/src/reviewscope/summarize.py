"""Per-cluster statistical summaries and cluster-vs-cluster comparison.

Everything here is a pure function of the corpus, the feature matrix, and a
set of member review positions, so summaries can be precomputed for the whole
tree and cached in the index. Document frequencies are corpus constants
(computed over individual reviews), which keeps idf reusable across clusters.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus
from .featurize import FeatureSet, char_count, sentence_count, tokenize, word_count

DEFAULT_N_TOP = 5
DEFAULT_BINS = 8


class SummaryError(ValueError):
    """Raised for mismatched or invalid summary inputs."""


@dataclass(frozen=True)
class Histogram:
    """Fixed-width score histogram over [-1, 1].

    Bins are left-inclusive; the last bin also includes its right edge, so a
    score of exactly +1 lands in the top bin and 0 lands in bin 4 of 8.
    """

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def n_bins(self) -> int:
        return len(self.counts)


def attribute_histogram(scores: np.ndarray, bins: int = DEFAULT_BINS,
                        lo: float = -1.0, hi: float = 1.0) -> Histogram:
    """Histogram of present scores; absent reviews contribute nothing."""
    if bins < 1:
        raise SummaryError("bins must be positive")
    edges = np.linspace(lo, hi, bins + 1)
    counts = [0] * bins
    width = (hi - lo) / bins
    for s in np.asarray(scores, dtype=float):
        idx = int(math.floor((s - lo) / width))
        idx = min(max(idx, 0), bins - 1)
        counts[idx] += 1
    return Histogram(tuple(float(e) for e in edges), tuple(counts))


def histogram_distance(h1: Histogram, h2: Histogram) -> float:
    """L1 distance between total-normalized histograms, in [0, 2].

    Two empty histograms are identical (0); one empty histogram is maximally
    different (2) so comparisons stay total.
    """
    if h1.bin_edges != h2.bin_edges:
        raise SummaryError("histograms use different binning")
    t1, t2 = h1.total, h2.total
    if t1 == 0 and t2 == 0:
        return 0.0
    if t1 == 0 or t2 == 0:
        return 2.0
    return float(sum(abs(a / t1 - b / t2) for a, b in zip(h1.counts, h2.counts)))


@dataclass(frozen=True)
class ClusterSummary:
    size: int
    avg_chars: float
    avg_words: float
    avg_sentences: float
    avg_sentiment: float
    top_words: tuple[tuple[str, float], ...]
    top_bigrams: tuple[tuple[str, float], ...]
    attr_histograms: dict[str, Histogram] = field(default_factory=dict)
    attr_means: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CorpusStats:
    """Corpus-wide precomputation shared by every cluster summary."""

    n_reviews: int
    chars: np.ndarray
    words: np.ndarray
    sentences: np.ndarray
    unigrams: tuple[tuple[str, ...], ...]  # stopword-free tokens per review
    bigrams: tuple[tuple[str, ...], ...]
    df_unigrams: dict[str, int]
    df_bigrams: dict[str, int]


def build_corpus_stats(corpus: Corpus) -> CorpusStats:
    chars = np.array([char_count(r.text) for r in corpus.reviews], dtype=float)
    words = np.array([word_count(r.text) for r in corpus.reviews], dtype=float)
    sentences = np.array([sentence_count(r.text) for r in corpus.reviews], dtype=float)
    unigrams = []
    bigrams = []
    df_uni: Counter[str] = Counter()
    df_bi: Counter[str] = Counter()
    for rev in corpus.reviews:
        tokens = tuple(tokenize(rev.text, drop_stopwords=True))
        grams2 = tuple(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
        unigrams.append(tokens)
        bigrams.append(grams2)
        df_uni.update(set(tokens))
        df_bi.update(set(grams2))
    return CorpusStats(
        n_reviews=len(corpus),
        chars=chars,
        words=words,
        sentences=sentences,
        unigrams=tuple(unigrams),
        bigrams=tuple(bigrams),
        df_unigrams=dict(df_uni),
        df_bigrams=dict(df_bi),
    )


def tfidf_top_terms(
    member_rows: list[int] | np.ndarray,
    stats: CorpusStats,
    n: int = DEFAULT_N_TOP,
    gram: int = 1,
) -> list[tuple[str, float]]:
    """Top-n grams of a cluster scored by tf * idf.

    tf is the gram's share of the cluster's concatenated grams; idf is
    ln((1+R)/(1+df)) + 1 with R the corpus review count and df the number of
    reviews containing the gram. Ties break lexicographically.
    """
    if n <= 0:
        return []
    if gram == 1:
        grams, df = stats.unigrams, stats.df_unigrams
    elif gram == 2:
        grams, df = stats.bigrams, stats.df_bigrams
    else:
        raise SummaryError(f"unsupported gram size {gram}")
    counts: Counter[str] = Counter()
    for i in member_rows:
        counts.update(grams[i])
    total = sum(counts.values())
    if total == 0:
        return []
    r = stats.n_reviews
    scored = [
        (term, (c / total) * (math.log((1 + r) / (1 + df[term])) + 1.0))
        for term, c in counts.items()
    ]
    scored.sort(key=lambda ts: (-ts[1], ts[0]))
    return scored[:n]


def summarize_cluster(
    member_rows: list[int] | np.ndarray,
    features: FeatureSet,
    sentiments: np.ndarray,
    stats: CorpusStats,
    n_top: int = DEFAULT_N_TOP,
    bins: int = DEFAULT_BINS,
) -> ClusterSummary:
    """All display statistics for one cluster (or the whole corpus)."""
    rows = np.asarray(list(member_rows), dtype=int)
    if rows.size == 0:
        raise SummaryError("cannot summarize an empty cluster")
    histograms: dict[str, Histogram] = {}
    means: dict[str, float] = {}
    for j, name in enumerate(features.feature_names):
        present = features.present[rows, j]
        scores = features.values[rows, j][present]
        histograms[name] = attribute_histogram(scores, bins=bins)
        if scores.size:
            means[name] = float(scores.mean())
    return ClusterSummary(
        size=int(rows.size),
        avg_chars=float(stats.chars[rows].mean()),
        avg_words=float(stats.words[rows].mean()),
        avg_sentences=float(stats.sentences[rows].mean()),
        avg_sentiment=float(np.asarray(sentiments)[rows].mean()),
        top_words=tuple(tfidf_top_terms(rows, stats, n_top, gram=1)),
        top_bigrams=tuple(tfidf_top_terms(rows, stats, n_top, gram=2)),
        attr_histograms=histograms,
        attr_means=means,
    )


def top_divergent_attributes(
    s1: ClusterSummary, s2: ClusterSummary, m: int | None = None
) -> list[tuple[str, float]]:
    """Attributes ranked by histogram distance between two summaries.

    Ties keep schema order (the insertion order of the histogram maps).
    """
    names = list(s1.attr_histograms.keys())
    if names != list(s2.attr_histograms.keys()):
        raise SummaryError("summaries do not share a schema")
    ranked = sorted(
        ((name, histogram_distance(s1.attr_histograms[name], s2.attr_histograms[name])) for name in names),
        key=lambda nd: (-nd[1], names.index(nd[0])),
    )
    if m is not None:
        ranked = ranked[:m]
    return ranked
