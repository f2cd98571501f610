"""Offline pipeline: configuration, preprocess, and schema iteration.

A run reads the flat key=value config, featurizes the corpus, builds the
cluster hierarchy and summaries, and writes a fresh versioned index snapshot
(index_dir/v1, v2, ...). Re-running with a revised schema lands in the next
version directory, so earlier indexes are never touched.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cluster as clustering
from . import featurize
from . import lda as topics
from . import summarize
from .corpus import Corpus, CorpusError, Schema, load_entities, load_extractions, load_reviews, load_schema
from .store import IndexArtifacts, next_version_dir, path_to_str, save_index

log = logging.getLogger(__name__)

FEATURIZER_EXTRACTIONS = "extractions"
FEATURIZER_LDA = "lda"


class ConfigError(ValueError):
    """Raised for invalid or incomplete pipeline configuration."""


class PipelineError(RuntimeError):
    """A stage failure; carries the stage name and the original error."""

    def __init__(self, stage: str, original: BaseException):
        super().__init__(f"{stage}: {original}")
        self.stage = stage
        self.original = original


@dataclass
class PipelineConfig:
    reviews: Path | None = None
    entities: Path | None = None
    schema: Path | None = None
    extractions: Path | None = None
    lexicon: Path | None = None
    index_dir: Path = Path("index")
    featurizer: str = FEATURIZER_EXTRACTIONS
    n_topics: int = 8
    alpha: float | None = None
    beta: float = topics.DEFAULT_BETA
    iterations: int = topics.DEFAULT_ITERATIONS
    seed: int = 0
    k1: int = 5
    k2: int = 3
    depth: int = 5
    min_cluster_size: int | None = None
    kmeans_max_iter: int = 100
    kmeans_tol: float = 1e-4
    n_top: int = summarize.DEFAULT_N_TOP
    bins: int = summarize.DEFAULT_BINS
    entity_precompute_limit: int = 50

    @property
    def effective_min_cluster_size(self) -> int:
        if self.min_cluster_size is not None:
            return self.min_cluster_size
        return max(2 * self.k2, 20)

    def validate(self) -> None:
        if self.reviews is None:
            raise ConfigError("config key 'reviews' is required")
        if self.featurizer not in (FEATURIZER_EXTRACTIONS, FEATURIZER_LDA):
            raise ConfigError(
                f"featurizer must be '{FEATURIZER_EXTRACTIONS}' or '{FEATURIZER_LDA}', "
                f"not {self.featurizer!r}"
            )
        if self.featurizer == FEATURIZER_EXTRACTIONS:
            if self.schema is None:
                raise ConfigError("featurizer=extractions requires a 'schema' path")
            if self.extractions is None:
                raise ConfigError("featurizer=extractions requires an 'extractions' path")
        else:
            if self.n_topics < 2:
                raise ConfigError("featurizer=lda requires n_topics >= 2")
        for name in ("k1", "k2", "depth"):
            if getattr(self, name) < 1:
                raise ConfigError(f"config key {name!r} must be >= 1")
        if self.min_cluster_size is not None and self.min_cluster_size < 1:
            raise ConfigError("min_cluster_size must be >= 1")

    def analytic_params(self) -> dict:
        """The parameter echo stored in the index manifest (no paths)."""
        return {
            "featurizer": self.featurizer,
            "n_topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "seed": self.seed,
            "k1": self.k1,
            "k2": self.k2,
            "depth": self.depth,
            "min_cluster_size": self.effective_min_cluster_size,
            "kmeans_max_iter": self.kmeans_max_iter,
            "kmeans_tol": self.kmeans_tol,
            "n_top": self.n_top,
            "bins": self.bins,
            "entity_precompute_limit": self.entity_precompute_limit,
        }


_PATH_KEYS = ("reviews", "entities", "schema", "extractions", "lexicon", "index_dir")
_INT_KEYS = (
    "n_topics", "iterations", "seed", "k1", "k2", "depth", "min_cluster_size",
    "kmeans_max_iter", "n_top", "bins", "entity_precompute_limit",
)
_FLOAT_KEYS = ("alpha", "beta", "kmeans_tol")


def load_config(path: str | Path, overrides: dict | None = None) -> PipelineConfig:
    """Parse a key=value config file; '#' starts a comment.

    Relative paths are resolved against the config file's directory.
    CLI-provided overrides are applied on top, with the same key names.
    """
    path = Path(path)
    base = path.parent
    raw: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        raw[key.strip()] = value.strip()
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = str(value)

    config = PipelineConfig()
    valid = {f.name for f in dataclasses.fields(PipelineConfig)}
    for key, value in raw.items():
        if key not in valid:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _PATH_KEYS:
            p = Path(value)
            parsed: object = p if p.is_absolute() else base / p
        elif key in _INT_KEYS:
            try:
                parsed = int(value)
            except ValueError:
                raise ConfigError(f"config key {key!r} must be an integer: {value!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                parsed = float(value)
            except ValueError:
                raise ConfigError(f"config key {key!r} must be a number: {value!r}") from None
        else:
            parsed = value
        setattr(config, key, parsed)
    return config


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def _entity_groups(corpus: Corpus, features: featurize.FeatureSet, tree: clustering.ClusterNode) -> dict[str, int]:
    """Treemap grouping key: nearest root-level centroid of the entity's mean vector."""
    if not tree.children:
        return {eid: 0 for eid in corpus.entities}
    centroids = np.stack([child.centroid for child in tree.children])
    pos = {rid: i for i, rid in enumerate(features.ids)}
    groups: dict[str, int] = {}
    for eid in corpus.entities:
        rows = [pos[rid] for rid in corpus.members(eid)]
        if not rows:
            groups[eid] = 0
            continue
        mean_vec = features.values[rows].mean(axis=0)
        dist = ((centroids - mean_vec) ** 2).sum(axis=1)
        groups[eid] = int(np.argmin(dist))
    return groups


def _topic_terms(model: topics.LdaModel, stats: summarize.CorpusStats) -> tuple[str, ...]:
    """Per-topic label word: the topic's top term weighted by corpus idf."""
    idf = np.array(
        [
            math.log((1 + stats.n_reviews) / (1 + stats.df_unigrams.get(term, 0))) + 1.0
            for term in model.vocabulary
        ]
    )
    terms = []
    for k in range(model.n_topics):
        terms.append(model.vocabulary[int(np.argmax(model.topic_word[k] * idf))])
    return tuple(terms)


def build_artifacts(config: PipelineConfig, schema_version: str = "v1") -> IndexArtifacts:
    """Run every pipeline stage in memory; save_index persists the result."""
    config.validate()

    with _stage("load"):
        reviews = load_reviews(config.reviews)
        entities = load_entities(config.entities) if config.entities else None
        corpus = Corpus.build(reviews, entities)
        if len(corpus) == 0:
            raise CorpusError("corpus is empty")

    model = None
    lexicon = None
    if config.featurizer == FEATURIZER_EXTRACTIONS:
        with _stage("load"):
            schema = load_schema(config.schema, version=schema_version)
            if not schema.attributes:
                raise CorpusError("schema is empty; extraction mode needs at least one attribute")
            records = load_extractions(config.extractions, schema, corpus)
        with _stage("featurize"):
            features = featurize.vectors_from_extractions(records, schema, corpus)
            covered = {rec.attribute for rec in records}
            for attr in schema.attributes:
                if attr not in covered:
                    log.warning(
                        "attribute %r has no extraction records; vectors mark it absent everywhere",
                        attr,
                    )
            sentiments = featurize.review_sentiments(features, corpus)
    else:
        with _stage("featurize"):
            model = topics.fit_lda(
                corpus,
                n_topics=config.n_topics,
                alpha=config.alpha,
                beta=config.beta,
                iterations=config.iterations,
                seed=config.seed,
            )
            features = topics.infer_features(model, corpus)
            schema = Schema(features.feature_names, version=schema_version)
            lexicon = featurize.load_lexicon(config.lexicon)
            sentiments = featurize.review_sentiments(features, corpus, lexicon)

    with _stage("cluster"):
        tree = clustering.build_hierarchy(
            features.values,
            features.ids,
            sentiments,
            k1=config.k1,
            k2=config.k2,
            depth=config.depth,
            min_cluster_size=config.effective_min_cluster_size,
            seed=config.seed,
            kmeans_max_iter=config.kmeans_max_iter,
            kmeans_tol=config.kmeans_tol,
        )

    with _stage("summarize"):
        stats = summarize.build_corpus_stats(corpus)
        pos = {rid: i for i, rid in enumerate(features.ids)}
        summaries = {}
        for node in tree.walk():
            rows = [pos[rid] for rid in node.member_ids]
            summaries[path_to_str(node.path)] = summarize.summarize_cluster(
                rows, features, sentiments, stats, n_top=config.n_top, bins=config.bins
            )

    with _stage("cluster"):
        terms = None if config.featurizer == FEATURIZER_EXTRACTIONS else _topic_terms(model, stats)
        if terms is None:
            clustering.assign_extraction_labels(
                tree, features.values, features.present, features.ids, schema.attributes
            )
        else:
            clustering.assign_topic_labels(tree, features.values, features.ids, terms)

        entity_groups = _entity_groups(corpus, features, tree)
        entity_trees: dict[str, clustering.ClusterNode] = {}
        ranked = [e for e in corpus.entities_by_review_count() if e.review_count > 0]
        for ent in ranked[: config.entity_precompute_limit]:
            entity_trees[ent.id] = build_entity_tree(
                ent.id, corpus, features, sentiments, config, schema, terms
            )

    return IndexArtifacts(
        corpus=corpus,
        schema=schema,
        features=features,
        sentiments=sentiments,
        tree=tree,
        summaries=summaries,
        entity_groups=entity_groups,
        entity_trees=entity_trees,
        config=config.analytic_params(),
        lda=model,
        lexicon=lexicon,
    )


def build_entity_tree(
    entity_id: str,
    corpus: Corpus,
    features: featurize.FeatureSet,
    sentiments: np.ndarray,
    config: PipelineConfig,
    schema: Schema,
    terms: tuple[str, ...] | None,
) -> clustering.ClusterNode:
    """Cluster hierarchy over a single entity's reviews.

    The seed mixes the entity id so per-entity trees are reproducible whether
    they were precomputed or built lazily at serve time.
    """
    pos = {rid: i for i, rid in enumerate(features.ids)}
    rows = np.array([pos[rid] for rid in corpus.members(entity_id)])
    sub_ids = tuple(features.ids[i] for i in rows)
    tree = clustering.build_hierarchy(
        features.values[rows],
        sub_ids,
        sentiments[rows],
        k1=config.k1,
        k2=config.k2,
        depth=config.depth,
        min_cluster_size=config.effective_min_cluster_size,
        seed=entity_seed(entity_id, config.seed),
        kmeans_max_iter=config.kmeans_max_iter,
        kmeans_tol=config.kmeans_tol,
    )
    if terms is None:
        clustering.assign_extraction_labels(
            tree, features.values, features.present, features.ids, schema.attributes
        )
    else:
        clustering.assign_topic_labels(tree, features.values, features.ids, terms)
    return tree


def entity_seed(entity_id: str, seed: int) -> int:
    digest = hashlib.sha256(f"entity:{seed}:{entity_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def preprocess(config: PipelineConfig) -> Path:
    """Full pipeline run into the next index version directory."""
    target = next_version_dir(config.index_dir)
    artifacts = build_artifacts(config, schema_version=target.name)
    with _stage("save"):
        save_index(target, artifacts)
    return target


def iterate(config: PipelineConfig, new_schema: str | Path,
            new_extractions: str | Path | None = None) -> Path:
    """Re-run preprocessing with a revised schema into a new index version.

    Earlier versions stay untouched. Extraction records must already match
    the new schema; attributes without any records come out absent-everywhere
    with a warning.
    """
    updated = dataclasses.replace(config, schema=Path(new_schema))
    if new_extractions is not None:
        updated.extractions = Path(new_extractions)
    return preprocess(updated)
