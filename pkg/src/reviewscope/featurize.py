"""Per-review feature vectors and the text statistics they are built from.

Two featurization routes produce the same shape of output: adapting
precomputed attribute-sentiment extractions, or fitting the built-in topic
model (see :mod:`reviewscope.lda`). Extraction-mode vectors carry a presence
mask because "no opinion detected" is different from a neutral score of 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .corpus import Corpus, CorpusError, ExtractionRecord, Schema

EXTRACTION_MODE = "extraction"
TOPIC_MODE = "topic"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_SENTENCE_BREAK_RE = re.compile(r"[.!?]+(?=\s|$)")


def _load_packaged_lines(name: str) -> list[str]:
    text = resources.files("reviewscope.data").joinpath(name).read_text(encoding="utf-8")
    return text.splitlines()


STOPWORDS: frozenset[str] = frozenset(
    line.strip()
    for line in _load_packaged_lines("stopwords.txt")
    if line.strip() and not line.startswith("#")
)


def tokenize(text: str, drop_stopwords: bool = False) -> list[str]:
    """Lowercase tokens split on non-alphanumeric boundaries.

    Tokens shorter than 2 characters are dropped, so "aren't" yields just
    "aren". Stopwords are removed only when asked for; word counting and
    the query language work on the full token stream.
    """
    tokens = [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2]
    if drop_stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    return tokens


def char_count(text: str) -> int:
    return len(text)


def word_count(text: str) -> int:
    return len(tokenize(text))


def sentence_count(text: str) -> int:
    """Number of sentence segments delimited by runs of ``.!?``.

    A terminator run followed by whitespace or end-of-text closes a segment;
    a trailing run does not open a new one. Non-empty text counts as at
    least one sentence.
    """
    if not text.strip():
        return 0
    segments = _SENTENCE_BREAK_RE.split(text)
    return max(1, sum(1 for seg in segments if seg.strip()))


@dataclass
class FeatureVector:
    """One review's numeric representation.

    In extraction mode ``values[i]`` is the averaged score for schema
    attribute i and ``present[i]`` says whether any extraction mentioned it
    (values are 0 where absent). In topic mode ``values`` is a probability
    vector over topics and every component counts as present.
    """

    review_id: str
    values: np.ndarray
    present: np.ndarray
    mode: str
    uniform_fallback: bool = False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return (
            self.review_id == other.review_id
            and self.mode == other.mode
            and self.uniform_fallback == other.uniform_fallback
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.present, other.present)
        )


@dataclass(frozen=True)
class FeatureSet:
    """All vectors of a corpus stacked in ingestion order."""

    ids: tuple[str, ...]
    values: np.ndarray  # (n, N) float64
    present: np.ndarray  # (n, N) bool
    mode: str
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.values.shape != self.present.shape:
            raise ValueError("values and present must have the same shape")
        if len(self.ids) != self.values.shape[0]:
            raise ValueError("one row per review id required")

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def row(self, i: int) -> FeatureVector:
        return FeatureVector(self.ids[i], self.values[i], self.present[i], self.mode)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureSet):
            return NotImplemented
        return (
            self.ids == other.ids
            and self.mode == other.mode
            and self.feature_names == other.feature_names
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.present, other.present)
        )


def vectors_from_extractions(
    records: list[ExtractionRecord], schema: Schema, corpus: Corpus
) -> FeatureSet:
    """One N-dim vector per corpus review, N = number of schema attributes.

    Reviews without any extraction get an all-zero vector with an all-false
    mask. Duplicate (review, attribute) records are averaged here as well,
    so callers may pass raw or pre-averaged record lists.
    """
    n, dim = len(corpus), len(schema)
    sums = np.zeros((n, dim))
    counts = np.zeros((n, dim))
    attr_pos = {a: j for j, a in enumerate(schema.attributes)}
    for rec in records:
        i = corpus.position(rec.review_id)
        j = attr_pos[rec.attribute]
        sums[i, j] += rec.score
        counts[i, j] += 1
    present = counts > 0
    values = np.divide(sums, counts, out=np.zeros_like(sums), where=present)
    return FeatureSet(
        ids=tuple(r.id for r in corpus.reviews),
        values=values,
        present=present,
        mode=EXTRACTION_MODE,
        feature_names=schema.attributes,
    )


@dataclass(frozen=True)
class SentimentLexicon:
    """Term to valence map, scores in [-1, 1]."""

    valence: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for term, score in self.valence.items():
            if term != term.lower():
                raise CorpusError(f"lexicon term {term!r} must be lowercase")
            if not -1.0 <= score <= 1.0:
                raise CorpusError(f"lexicon valence for {term!r} outside [-1, 1]: {score}")

    def __len__(self) -> int:
        return len(self.valence)


def load_lexicon(path: str | Path | None = None) -> SentimentLexicon:
    """Read a term<TAB>valence file; defaults to the packaged English list."""
    if path is None:
        lines = _load_packaged_lines("lexicon.tsv")
    else:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    valence: dict[str, float] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"line {line_no}: expected 'term<TAB>valence'")
        term = parts[0].strip().lower()
        try:
            score = float(parts[1])
        except ValueError:
            raise CorpusError(f"line {line_no}: valence is not a number: {parts[1]!r}") from None
        if term in valence:
            raise CorpusError(f"line {line_no}: duplicate lexicon term {term!r}")
        valence[term] = score
    return SentimentLexicon(valence)


def lexicon_sentiment(text: str, lexicon: SentimentLexicon) -> float:
    """Mean valence of lexicon hits in the token stream; 0 with no hits."""
    hits = [lexicon.valence[t] for t in tokenize(text) if t in lexicon.valence]
    if not hits:
        return 0.0
    return float(np.mean(hits))


def extraction_sentiment(values: np.ndarray, present: np.ndarray) -> float:
    """Review sentiment in extraction mode: mean of present scores, else 0."""
    if not present.any():
        return 0.0
    return float(values[present].mean())


def review_sentiments(
    features: FeatureSet, corpus: Corpus, lexicon: SentimentLexicon | None = None
) -> np.ndarray:
    """Per-review sentiment aligned with corpus order.

    Extraction mode averages each review's present attribute scores; topic
    mode needs an independent signal and takes it from the valence lexicon.
    """
    if features.mode == EXTRACTION_MODE:
        return np.array(
            [extraction_sentiment(features.values[i], features.present[i]) for i in range(len(corpus))]
        )
    if lexicon is None:
        lexicon = load_lexicon()
    return np.array([lexicon_sentiment(rev.text, lexicon) for rev in corpus.reviews])
