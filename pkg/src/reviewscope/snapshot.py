"""Read-side wrapper over an opened index.

One immutable snapshot is shared by any number of concurrent readers. The
only mutable state here is a cache of per-entity trees and summaries built
on demand (guarded by a lock); results are deterministic, so caching is
invisible to callers.
"""

from __future__ import annotations

import dataclasses
import threading
from pathlib import Path

from . import pipeline, summarize
from .cluster import ClusterNode
from .featurize import EXTRACTION_MODE, char_count
from .store import IndexArtifacts, open_index, path_to_str, resolve_index_dir

ALL_ENTITIES = "all"


class Snapshot:
    """An opened index plus the accessors the API needs."""

    def __init__(self, artifacts: IndexArtifacts, index_dir: Path):
        self.artifacts = artifacts
        self.index_dir = index_dir
        self.corpus = artifacts.corpus
        self.schema = artifacts.schema
        self.features = artifacts.features
        self.sentiments = artifacts.sentiments
        self.tree = artifacts.tree
        self.summaries = artifacts.summaries
        self._pos = {rid: i for i, rid in enumerate(artifacts.features.ids)}
        self._lock = threading.Lock()
        self._entity_trees: dict[str, ClusterNode] = dict(artifacts.entity_trees)
        self._entity_summaries: dict[tuple[str, str], summarize.ClusterSummary] = {}
        self._stats: summarize.CorpusStats | None = None
        self._entity_means: dict[str, dict[str, float]] | None = None
        config_fields = {f.name for f in dataclasses.fields(pipeline.PipelineConfig)}
        self._config = pipeline.PipelineConfig(
            **{k: v for k, v in artifacts.config.items() if k in config_fields}
        )

    @classmethod
    def open(cls, path: str | Path) -> "Snapshot":
        index_dir = resolve_index_dir(path)
        return cls(open_index(index_dir), index_dir)

    # ---- attribute / review accessors -------------------------------------

    @property
    def attributes(self) -> tuple[str, ...]:
        return self.features.feature_names

    @property
    def entities_disabled(self) -> bool:
        return not self.corpus.entities_from_file

    def position(self, review_id: str) -> int:
        return self._pos[review_id]

    def text(self, review_id: str) -> str:
        return self.corpus.get(review_id).text

    def attribute_value(self, review_id: str, attribute: str) -> float | None:
        """ReviewStore hook: None when the attribute is absent for the review."""
        if attribute == "sentiment":
            return float(self.sentiments[self._pos[review_id]])
        if attribute == "length":
            return float(char_count(self.text(review_id)))
        i = self._pos[review_id]
        try:
            j = self.attributes.index(attribute)
        except ValueError:
            return None
        if not self.features.present[i, j]:
            return None
        return float(self.features.values[i, j])

    def review_chips(self, review_id: str) -> list[tuple[str, float]]:
        """(attribute, score) pairs detected in one review, schema order."""
        i = self._pos[review_id]
        return [
            (name, float(self.features.values[i, j]))
            for j, name in enumerate(self.attributes)
            if self.features.present[i, j]
        ]

    def review_sentiment(self, review_id: str) -> float:
        return float(self.sentiments[self._pos[review_id]])

    # ---- trees and summaries ----------------------------------------------

    def corpus_stats(self) -> summarize.CorpusStats:
        with self._lock:
            if self._stats is None:
                self._stats = summarize.build_corpus_stats(self.corpus)
            return self._stats

    def tree_for(self, entity: str | None) -> ClusterNode | None:
        """The hierarchy for one entity, or the whole-corpus tree.

        Trees beyond the precomputed set are built lazily with the same
        derived seed preprocess would have used, then cached.
        """
        if entity in (None, "", ALL_ENTITIES):
            return self.tree
        if entity not in self.corpus.entities:
            return None
        with self._lock:
            if entity in self._entity_trees:
                return self._entity_trees[entity]
        if not self.corpus.members(entity):
            return None
        stats = self.corpus_stats()
        terms = None
        if self.features.mode != EXTRACTION_MODE and self.artifacts.lda is not None:
            terms = pipeline._topic_terms(self.artifacts.lda, stats)
        tree = pipeline.build_entity_tree(
            entity, self.corpus, self.features, self.sentiments, self._config, self.schema, terms
        )
        with self._lock:
            self._entity_trees.setdefault(entity, tree)
            return self._entity_trees[entity]

    def node_at(self, entity: str | None, path: tuple[int, ...]) -> ClusterNode | None:
        tree = self.tree_for(entity)
        if tree is None:
            return None
        return tree.find(path)

    def summary_at(self, entity: str | None, path: tuple[int, ...]) -> summarize.ClusterSummary | None:
        if entity in (None, "", ALL_ENTITIES):
            return self.summaries.get(path_to_str(path))
        key = (entity, path_to_str(path))
        with self._lock:
            cached = self._entity_summaries.get(key)
        if cached is not None:
            return cached
        node = self.node_at(entity, path)
        if node is None:
            return None
        rows = [self._pos[rid] for rid in node.member_ids]
        result = summarize.summarize_cluster(
            rows,
            self.features,
            self.sentiments,
            self.corpus_stats(),
            n_top=self._config.n_top,
            bins=self._config.bins,
        )
        with self._lock:
            self._entity_summaries.setdefault(key, result)
            return self._entity_summaries[key]

    def dataset_summary(self) -> summarize.ClusterSummary:
        return self.summaries[""]

    # ---- entities -----------------------------------------------------------

    def entity_attr_means(self) -> dict[str, dict[str, float]]:
        """Present-only mean attribute score per entity, for the entity view."""
        with self._lock:
            if self._entity_means is not None:
                return self._entity_means
        means: dict[str, dict[str, float]] = {}
        values, present = self.features.values, self.features.present
        for eid in self.corpus.entities:
            rows = [self._pos[rid] for rid in self.corpus.members(eid)]
            per_attr: dict[str, float] = {}
            if rows:
                sub_v, sub_p = values[rows], present[rows]
                for j, name in enumerate(self.attributes):
                    mask = sub_p[:, j]
                    if mask.any():
                        per_attr[name] = float(sub_v[mask, j].mean())
            means[eid] = per_attr
        with self._lock:
            self._entity_means = means
            return means

    def scope_ids(self, entity: str | None, path: tuple[int, ...]) -> tuple[str, ...] | None:
        node = self.node_at(entity, path)
        if node is None:
            return None
        return node.member_ids
