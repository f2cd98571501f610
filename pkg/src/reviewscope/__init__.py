"""Interactive review exploration engine.

Pipeline: load a review corpus, featurize it (precomputed attribute-sentiment
extractions or a built-in topic model), build a nested k-means hierarchy with
per-cluster summaries, and serve the precomputed index over an HTTP API with
a small composable query language.
"""

__version__ = "0.1.0"

from .corpus import Corpus, CorpusError, Entity, ExtractionRecord, Review, Schema
from .featurize import FeatureSet, FeatureVector, SentimentLexicon
from .cluster import ClusterNode, KMeansResult, build_hierarchy, kmeans, pca_project
from .summarize import ClusterSummary, Histogram, histogram_distance
from .querylang import Command, QueryParseError, Session, parse
from .pipeline import PipelineConfig, PipelineError, load_config, preprocess
from .store import IndexArtifacts, StoreError, open_index, save_index

__all__ = [
    "Corpus",
    "CorpusError",
    "Entity",
    "ExtractionRecord",
    "Review",
    "Schema",
    "FeatureSet",
    "FeatureVector",
    "SentimentLexicon",
    "ClusterNode",
    "KMeansResult",
    "build_hierarchy",
    "kmeans",
    "pca_project",
    "ClusterSummary",
    "Histogram",
    "histogram_distance",
    "Command",
    "QueryParseError",
    "Session",
    "parse",
    "PipelineConfig",
    "PipelineError",
    "load_config",
    "preprocess",
    "IndexArtifacts",
    "StoreError",
    "open_index",
    "save_index",
    "__version__",
]
