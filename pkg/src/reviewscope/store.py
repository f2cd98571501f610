"""On-disk index format: one directory per preprocessed snapshot.

The directory holds a versioned manifest.json, the normalized corpus files,
and one file per artifact kind. Numeric artifacts are .npy arrays (portable
little-endian with a shape header); everything else is JSON with sorted keys,
so identical inputs produce byte-identical directories. An opened index is an
immutable snapshot shared freely between readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, Entity, Review, Schema, load_entities, load_reviews, load_schema
from .featurize import FeatureSet, SentimentLexicon
from .cluster import ClusterNode
from .lda import LdaModel
from .summarize import ClusterSummary, Histogram

FORMAT_VERSION = 1


class StoreError(ValueError):
    """Raised when an index directory is missing, stale, or inconsistent."""


def path_to_str(path: tuple[int, ...]) -> str:
    return ".".join(str(p) for p in path)


def str_to_path(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.split("."))
    except ValueError:
        raise StoreError(f"invalid cluster path {text!r}") from None


@dataclass
class IndexArtifacts:
    """Everything preprocess produces; the unit save/open round-trips."""

    corpus: Corpus
    schema: Schema
    features: FeatureSet
    sentiments: np.ndarray
    tree: ClusterNode
    summaries: dict[str, ClusterSummary]  # keyed by dot-path; "" is the root
    entity_groups: dict[str, int] = field(default_factory=dict)
    entity_trees: dict[str, ClusterNode] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    lda: LdaModel | None = None
    lexicon: SentimentLexicon | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexArtifacts):
            return NotImplemented
        return (
            self.corpus == other.corpus
            and self.schema == other.schema
            and self.features == other.features
            and np.array_equal(self.sentiments, other.sentiments)
            and self.tree == other.tree
            and self.summaries == other.summaries
            and self.entity_groups == other.entity_groups
            and self.entity_trees == other.entity_trees
            and self.config == other.config
            and _lda_equal(self.lda, other.lda)
            and self.lexicon == other.lexicon
        )


def _lda_equal(a: LdaModel | None, b: LdaModel | None) -> bool:
    if a is None or b is None:
        return a is b
    return (
        a.n_topics == b.n_topics
        and a.alpha == b.alpha
        and a.beta == b.beta
        and a.seed == b.seed
        and a.vocabulary == b.vocabulary
        and np.array_equal(a.topic_word, b.topic_word)
        and np.array_equal(a.word_counts, b.word_counts)
    )


def _dump_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n", encoding="utf-8"
    )


def _review_record(rev: Review) -> dict:
    rec = {"id": rev.id, "entity_id": rev.entity_id, "text": rev.text}
    if rev.rating is not None:
        rec["rating"] = rev.rating
    if rev.date is not None:
        rec["date"] = rev.date
    return rec


def _entity_record(ent: Entity) -> dict:
    rec: dict = {"id": ent.id, "name": ent.name}
    if ent.lat is not None:
        rec["lat"] = ent.lat
        rec["lon"] = ent.lon
    if ent.address is not None:
        rec["address"] = ent.address
    if ent.image_url is not None:
        rec["image_url"] = ent.image_url
    return rec


def _write_jsonl(path: Path, records: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")


def _tree_to_json(root: ClusterNode, positions: dict[str, int]) -> tuple[dict, np.ndarray, np.ndarray]:
    """Nested node dicts plus the flat member-position and centroid arrays."""
    member_chunks: list[np.ndarray] = []
    centroid_rows: list[np.ndarray] = []
    offset = 0

    def encode(node: ClusterNode) -> dict:
        nonlocal offset
        members = np.array([positions[rid] for rid in node.member_ids], dtype=np.int64)
        member_chunks.append(members)
        row = len(centroid_rows)
        centroid_rows.append(np.asarray(node.centroid, dtype=float))
        entry = {
            "path": path_to_str(node.path),
            "size": node.size,
            "label": node.label,
            "x": node.coord2d[0],
            "y": node.coord2d[1],
            "sentiment": node.avg_sentiment,
            "members": [offset, int(members.size)],
            "row": row,
            "children": [],
        }
        offset += int(members.size)
        entry["children"] = [encode(child) for child in node.children]
        return entry

    encoded = encode(root)
    members_flat = np.concatenate(member_chunks) if member_chunks else np.zeros(0, dtype=np.int64)
    centroids = np.stack(centroid_rows)
    return encoded, members_flat, centroids


def _tree_from_json(entry: dict, members_flat: np.ndarray, centroids: np.ndarray,
                    ids: tuple[str, ...]) -> ClusterNode:
    start, length = entry["members"]
    member_ids = tuple(ids[i] for i in members_flat[start : start + length])
    node = ClusterNode(
        path=str_to_path(entry["path"]),
        member_ids=member_ids,
        centroid=centroids[entry["row"]].copy(),
        coord2d=(entry["x"], entry["y"]),
        avg_sentiment=entry["sentiment"],
        label=entry["label"],
    )
    node.children = [_tree_from_json(c, members_flat, centroids, ids) for c in entry["children"]]
    return node


def _save_array(path: Path, arr: np.ndarray) -> None:
    # via a handle so np.save cannot append .npy to names like members.bin
    with path.open("wb") as fh:
        np.save(fh, arr, allow_pickle=False)


def _load_array(path: Path) -> np.ndarray:
    with path.open("rb") as fh:
        return np.load(fh, allow_pickle=False)


def _save_tree(dir: Path, tree: ClusterNode, positions: dict[str, int]) -> None:
    encoded, members, centroids = _tree_to_json(tree, positions)
    _dump_json(dir / "tree.json", encoded)
    _save_array(dir / "members.bin", members)
    _save_array(dir / "centroids.npy", centroids)


def _load_tree(dir: Path, ids: tuple[str, ...]) -> ClusterNode:
    encoded = json.loads((dir / "tree.json").read_text(encoding="utf-8"))
    members = _load_array(dir / "members.bin")
    centroids = _load_array(dir / "centroids.npy")
    return _tree_from_json(encoded, members, centroids, ids)


def _summary_to_dict(s: ClusterSummary) -> dict:
    return {
        "size": s.size,
        "avg_chars": s.avg_chars,
        "avg_words": s.avg_words,
        "avg_sentences": s.avg_sentences,
        "avg_sentiment": s.avg_sentiment,
        "top_words": [[t, v] for t, v in s.top_words],
        "top_bigrams": [[t, v] for t, v in s.top_bigrams],
        "histograms": {
            name: {"edges": list(h.bin_edges), "counts": list(h.counts)}
            for name, h in s.attr_histograms.items()
        },
        "means": dict(s.attr_means),
        "attr_order": list(s.attr_histograms.keys()),
    }


def _summary_from_dict(d: dict) -> ClusterSummary:
    return ClusterSummary(
        size=d["size"],
        avg_chars=d["avg_chars"],
        avg_words=d["avg_words"],
        avg_sentences=d["avg_sentences"],
        avg_sentiment=d["avg_sentiment"],
        top_words=tuple((t, v) for t, v in d["top_words"]),
        top_bigrams=tuple((t, v) for t, v in d["top_bigrams"]),
        attr_histograms={
            name: Histogram(tuple(d["histograms"][name]["edges"]), tuple(d["histograms"][name]["counts"]))
            for name in d["attr_order"]
        },
        attr_means={name: d["means"][name] for name in d["attr_order"] if name in d["means"]},
    )


def save_index(dir: str | Path, artifacts: IndexArtifacts) -> Path:
    """Write a complete snapshot; returns the manifest path."""
    dir = Path(dir)
    dir.mkdir(parents=True, exist_ok=True)
    corpus = artifacts.corpus
    positions = {rid: i for i, rid in enumerate(artifacts.features.ids)}

    _write_jsonl(dir / "reviews.jsonl", [_review_record(r) for r in corpus.reviews])
    if corpus.entities_from_file:
        _write_jsonl(dir / "entities.jsonl", [_entity_record(e) for e in corpus.entities.values()])
    (dir / "schema.txt").write_text(
        "".join(a + "\n" for a in artifacts.schema.attributes), encoding="utf-8"
    )

    _save_array(dir / "features_values.npy", np.ascontiguousarray(artifacts.features.values, dtype=np.float64))
    _save_array(dir / "features_present.npy", np.ascontiguousarray(artifacts.features.present, dtype=bool))
    _save_array(dir / "sentiments.npy", np.ascontiguousarray(artifacts.sentiments, dtype=np.float64))

    _save_tree(dir, artifacts.tree, positions)
    _dump_json(dir / "summaries.json", {k: _summary_to_dict(s) for k, s in artifacts.summaries.items()})

    entity_dirs: list[list[str]] = []
    for i, (entity_id, tree) in enumerate(artifacts.entity_trees.items()):
        sub = dir / "entity_trees" / f"e{i:04d}"
        sub.mkdir(parents=True, exist_ok=True)
        _save_tree(sub, tree, positions)
        entity_dirs.append([entity_id, sub.name])

    if artifacts.lda is not None:
        _save_array(dir / "lda_topic_word.npy", np.ascontiguousarray(artifacts.lda.topic_word, dtype=np.float64))
        _save_array(dir / "lda_word_counts.npy", np.ascontiguousarray(artifacts.lda.word_counts, dtype=np.int64))
        _dump_json(dir / "lda_vocab.json", list(artifacts.lda.vocabulary))
    if artifacts.lexicon is not None:
        (dir / "lexicon.tsv").write_text(
            "".join(f"{t}\t{v!r}\n" for t, v in sorted(artifacts.lexicon.valence.items())),
            encoding="utf-8",
        )

    manifest = {
        "format_version": FORMAT_VERSION,
        "mode": artifacts.features.mode,
        "n_reviews": len(corpus),
        "n_features": artifacts.features.n_features,
        "feature_names": list(artifacts.features.feature_names),
        "schema_version": artifacts.schema.version,
        "entities_from_file": corpus.entities_from_file,
        "entity_groups": artifacts.entity_groups,
        "entity_trees": entity_dirs,
        "config": artifacts.config,
        "lda": None
        if artifacts.lda is None
        else {
            "n_topics": artifacts.lda.n_topics,
            "alpha": artifacts.lda.alpha,
            "beta": artifacts.lda.beta,
            "seed": artifacts.lda.seed,
        },
        "has_lexicon": artifacts.lexicon is not None,
    }
    manifest_path = dir / "manifest.json"
    _dump_json(manifest_path, manifest)
    return manifest_path


def open_index(dir: str | Path) -> IndexArtifacts:
    """Load a snapshot; bit-exact inverse of save_index."""
    dir = Path(dir)
    manifest_path = dir / "manifest.json"
    if not manifest_path.exists():
        raise StoreError(f"no manifest in {dir}; run preprocess first")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise StoreError(
            f"index manifest version {version} does not match reader version "
            f"{FORMAT_VERSION}; re-run preprocess to rebuild the index"
        )

    reviews = load_reviews(dir / "reviews.jsonl")
    entities = load_entities(dir / "entities.jsonl") if manifest["entities_from_file"] else None
    corpus = Corpus.build(reviews, entities)
    schema = load_schema(dir / "schema.txt", version=manifest["schema_version"])

    values = _load_array(dir / "features_values.npy")
    present = _load_array(dir / "features_present.npy")
    features = FeatureSet(
        ids=tuple(r.id for r in corpus.reviews),
        values=values,
        present=present,
        mode=manifest["mode"],
        feature_names=tuple(manifest["feature_names"]),
    )
    sentiments = _load_array(dir / "sentiments.npy")

    tree = _load_tree(dir, features.ids)
    raw_summaries = json.loads((dir / "summaries.json").read_text(encoding="utf-8"))
    summaries = {k: _summary_from_dict(v) for k, v in raw_summaries.items()}

    entity_trees = {
        entity_id: _load_tree(dir / "entity_trees" / sub, features.ids)
        for entity_id, sub in manifest["entity_trees"]
    }

    lda = None
    if manifest["lda"] is not None:
        meta = manifest["lda"]
        lda = LdaModel(
            n_topics=meta["n_topics"],
            alpha=meta["alpha"],
            beta=meta["beta"],
            topic_word=_load_array(dir / "lda_topic_word.npy"),
            vocabulary=tuple(json.loads((dir / "lda_vocab.json").read_text(encoding="utf-8"))),
            seed=meta["seed"],
            word_counts=_load_array(dir / "lda_word_counts.npy"),
        )
    lexicon = None
    if manifest.get("has_lexicon"):
        from .featurize import load_lexicon

        lexicon = load_lexicon(dir / "lexicon.tsv")

    return IndexArtifacts(
        corpus=corpus,
        schema=schema,
        features=features,
        sentiments=sentiments,
        tree=tree,
        summaries=summaries,
        entity_groups=dict(manifest["entity_groups"]),
        entity_trees=entity_trees,
        config=manifest["config"],
        lda=lda,
        lexicon=lexicon,
    )


def resolve_index_dir(path: str | Path) -> Path:
    """Accept either a snapshot directory or a parent of v1, v2, ... versions.

    Given a parent, the highest version wins.
    """
    path = Path(path)
    if (path / "manifest.json").exists():
        return path
    if path.is_dir():
        versions = sorted(
            (int(p.name[1:]), p)
            for p in path.iterdir()
            if p.is_dir() and p.name.startswith("v") and p.name[1:].isdigit() and (p / "manifest.json").exists()
        )
        if versions:
            return versions[-1][1]
    raise StoreError(f"no manifest in {path}; run preprocess first")


def next_version_dir(parent: str | Path) -> Path:
    """First unused index/vN subdirectory."""
    parent = Path(parent)
    existing = [
        int(p.name[1:])
        for p in (parent.iterdir() if parent.is_dir() else [])
        if p.is_dir() and p.name.startswith("v") and p.name[1:].isdigit()
    ]
    return parent / f"v{max(existing, default=0) + 1}"
