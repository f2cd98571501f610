"""Collapsed-Gibbs LDA for the schema-free featurization route.

The sampler is deliberately plain Python: corpora where LDA mode makes sense
here are small enough that a tight scalar loop beats setting up vectorized
machinery, and a single sequential RNG keeps runs bit-reproducible.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Review
from .featurize import TOPIC_MODE, FeatureSet, FeatureVector, tokenize

DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 500
INFER_PASSES = 100
INFER_AVERAGE_LAST = 50


class TopicModelError(ValueError):
    """Raised when a topic model cannot be fitted on the given corpus."""


def default_alpha(n_topics: int) -> float:
    return 50.0 / n_topics


def topic_feature_names(n_topics: int) -> tuple[str, ...]:
    width = max(2, len(str(n_topics - 1)))
    return tuple(f"topic_{k:0{width}d}" for k in range(n_topics))


@dataclass
class LdaModel:
    n_topics: int
    alpha: float
    beta: float
    topic_word: np.ndarray  # (K, V), rows sum to 1
    vocabulary: tuple[str, ...]
    seed: int
    word_counts: np.ndarray  # (K, V) final sampler counts

    def __post_init__(self) -> None:
        self._vocab_pos = {t: j for j, t in enumerate(self.vocabulary)}

    def token_ids(self, text: str) -> list[int]:
        return [self._vocab_pos[t] for t in tokenize(text, drop_stopwords=True) if t in self._vocab_pos]


def build_vocabulary(corpus: Corpus, min_df: int = 2) -> tuple[str, ...]:
    """Stopword-free vocabulary of terms appearing in at least min_df reviews."""
    df: dict[str, int] = {}
    for rev in corpus.reviews:
        for term in set(tokenize(rev.text, drop_stopwords=True)):
            df[term] = df.get(term, 0) + 1
    vocab = sorted(t for t, n in df.items() if n >= min_df)
    return tuple(vocab)


def _mix_seed(seed: int, tag: str) -> int:
    digest = hashlib.sha256(f"{seed}:{tag}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def _sweep(
    docs: list[list[int]],
    z: list[list[int]],
    n_kw: list[list[int]],
    n_k: list[int],
    n_dk: list[list[int]],
    alpha: float,
    beta: float,
    vbeta: float,
    rng: random.Random,
) -> None:
    K = len(n_k)
    for d, doc in enumerate(docs):
        nd = n_dk[d]
        zs = z[d]
        for i, w in enumerate(doc):
            k = zs[i]
            n_kw[k][w] -= 1
            n_k[k] -= 1
            nd[k] -= 1
            total = 0.0
            probs = [0.0] * K
            for kk in range(K):
                p = (n_kw[kk][w] + beta) * (nd[kk] + alpha) / (n_k[kk] + vbeta)
                total += p
                probs[kk] = p
            r = rng.random() * total
            acc = 0.0
            knew = K - 1
            for kk in range(K):
                acc += probs[kk]
                if r < acc:
                    knew = kk
                    break
            zs[i] = knew
            n_kw[knew][w] += 1
            n_k[knew] += 1
            nd[knew] += 1


def fit_lda(
    corpus: Corpus,
    n_topics: int,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    min_df: int = 2,
) -> LdaModel:
    """Fit a topic model by collapsed Gibbs sampling.

    Deterministic for a fixed seed: two runs with identical inputs produce
    bit-equal count matrices. K=1 is allowed and degenerates to a single
    topic holding the whole vocabulary.
    """
    if n_topics < 1:
        raise TopicModelError("n_topics must be at least 1")
    if len(corpus) == 0:
        raise TopicModelError("cannot fit a topic model on an empty corpus")
    if alpha is None:
        alpha = default_alpha(n_topics)

    vocab = build_vocabulary(corpus, min_df=min_df)
    if not vocab:
        raise TopicModelError(
            f"vocabulary is empty after pruning (min document frequency {min_df}); "
            "lower the pruning threshold or provide more text"
        )
    vocab_pos = {t: j for j, t in enumerate(vocab)}
    docs = [
        [vocab_pos[t] for t in tokenize(rev.text, drop_stopwords=True) if t in vocab_pos]
        for rev in corpus.reviews
    ]

    K, V = n_topics, len(vocab)
    rng = random.Random(seed)
    n_kw = [[0] * V for _ in range(K)]
    n_k = [0] * K
    n_dk = [[0] * K for _ in range(len(docs))]
    z: list[list[int]] = []
    for d, doc in enumerate(docs):
        zs = []
        for w in doc:
            k = rng.randrange(K)
            zs.append(k)
            n_kw[k][w] += 1
            n_k[k] += 1
            n_dk[d][k] += 1
        z.append(zs)

    vbeta = V * beta
    for _ in range(iterations):
        _sweep(docs, z, n_kw, n_k, n_dk, alpha, beta, vbeta, rng)

    counts = np.array(n_kw, dtype=np.int64)
    topic_word = (counts + beta) / (counts.sum(axis=1, keepdims=True) + vbeta)
    return LdaModel(
        n_topics=K,
        alpha=alpha,
        beta=beta,
        topic_word=topic_word,
        vocabulary=vocab,
        seed=seed,
        word_counts=counts,
    )


def infer_doc_topics(model: LdaModel, review: Review) -> FeatureVector:
    """Held-out topic proportions for one review.

    Runs Gibbs passes against the frozen topic-word distribution and averages
    the document-topic estimate over the final passes. A review with no
    in-vocabulary tokens falls back to the uniform vector and is flagged.
    The RNG is seeded from (model seed, review id), so inference over many
    reviews can be fanned out in any order without changing results.
    """
    K = model.n_topics
    ids = model.token_ids(review.text)
    if not ids:
        return FeatureVector(
            review_id=review.id,
            values=np.full(K, 1.0 / K),
            present=np.ones(K, dtype=bool),
            mode=TOPIC_MODE,
            uniform_fallback=True,
        )

    rng = random.Random(_mix_seed(model.seed, review.id))
    cols = [model.topic_word[:, w].tolist() for w in ids]
    nd = [0] * K
    z = []
    for _ in ids:
        k = rng.randrange(K)
        z.append(k)
        nd[k] += 1

    alpha = model.alpha
    n_tokens = len(ids)
    denom = n_tokens + K * alpha
    theta_acc = np.zeros(K)
    averaged = 0
    for sweep in range(INFER_PASSES):
        for i in range(n_tokens):
            col = cols[i]
            k = z[i]
            nd[k] -= 1
            total = 0.0
            probs = [0.0] * K
            for kk in range(K):
                p = col[kk] * (nd[kk] + alpha)
                total += p
                probs[kk] = p
            r = rng.random() * total
            acc = 0.0
            knew = K - 1
            for kk in range(K):
                acc += probs[kk]
                if r < acc:
                    knew = kk
                    break
            z[i] = knew
            nd[knew] += 1
        if sweep >= INFER_PASSES - INFER_AVERAGE_LAST:
            theta_acc += (np.array(nd) + alpha) / denom
            averaged += 1

    values = theta_acc / averaged
    return FeatureVector(
        review_id=review.id,
        values=values,
        present=np.ones(K, dtype=bool),
        mode=TOPIC_MODE,
    )


def infer_features(model: LdaModel, corpus: Corpus) -> FeatureSet:
    """Topic-mode feature set for the whole corpus, in ingestion order."""
    vectors = [infer_doc_topics(model, rev) for rev in corpus.reviews]
    return FeatureSet(
        ids=tuple(r.id for r in corpus.reviews),
        values=np.stack([v.values for v in vectors]),
        present=np.stack([v.present for v in vectors]),
        mode=TOPIC_MODE,
        feature_names=topic_feature_names(model.n_topics),
    )
