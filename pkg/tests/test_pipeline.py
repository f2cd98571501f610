import numpy as np
import pytest

from reviewscope import synthdata
from reviewscope.pipeline import (
    ConfigError,
    PipelineConfig,
    PipelineError,
    build_artifacts,
    load_config,
    preprocess,
)


class TestConfig:
    def test_parse_and_relative_paths(self, tmp_path):
        cfg = tmp_path / "p.cfg"
        cfg.write_text(
            "# comment\nreviews = data/reviews.jsonl\nk1 = 7\nkmeans_tol = 1e-5\n"
            "featurizer = lda\nn_topics = 4\n"
        )
        config = load_config(cfg)
        assert config.reviews == tmp_path / "data" / "reviews.jsonl"
        assert config.k1 == 7
        assert config.kmeans_tol == 1e-5
        assert config.featurizer == "lda"

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("reviews = r.jsonl\nbogus = 1\n")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(cfg)

    def test_overrides_win(self, tmp_path):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("reviews = r.jsonl\nseed = 1\n")
        config = load_config(cfg, {"seed": 99})
        assert config.seed == 99

    def test_extractions_mode_requires_paths(self):
        config = PipelineConfig(reviews="r.jsonl", featurizer="extractions")
        with pytest.raises(ConfigError, match="schema"):
            config.validate()

    def test_lda_requires_two_topics(self):
        config = PipelineConfig(reviews="r.jsonl", featurizer="lda", n_topics=1)
        with pytest.raises(ConfigError, match="n_topics"):
            config.validate()

    def test_min_cluster_size_default(self):
        assert PipelineConfig(k2=3).effective_min_cluster_size == 20
        assert PipelineConfig(k2=15).effective_min_cluster_size == 30


class TestBuildArtifacts:
    def test_stage_name_in_error(self, tmp_path):
        synthdata.generate(tmp_path, n_reviews=30, n_entities=3, seed=2)
        (tmp_path / "extractions.jsonl").write_text(
            '{"review_id": "r00000", "attribute": "nonsense", "score": 0.1}\n'
        )
        config = load_config(tmp_path / "reviewscope.cfg")
        with pytest.raises(PipelineError) as err:
            build_artifacts(config)
        assert err.value.stage == "load"

    def test_lda_mode_generates_topic_schema(self, tmp_path):
        synthdata.generate(tmp_path, n_reviews=120, n_entities=4, seed=6)
        config = load_config(
            tmp_path / "reviewscope.cfg",
            {"featurizer": "lda", "n_topics": 3, "iterations": 30, "depth": 2},
        )
        artifacts = build_artifacts(config)
        assert artifacts.features.mode == "topic"
        assert artifacts.schema.attributes == ("topic_00", "topic_01", "topic_02")
        assert artifacts.lda is not None
        assert artifacts.lexicon is not None
        assert np.allclose(artifacts.features.values.sum(axis=1), 1.0, atol=1e-9)
        # labels come from topic terms, not schema names
        for node in artifacts.tree.walk():
            assert not node.label.startswith("topic_")

    def test_entity_trees_precomputed_up_to_limit(self, tmp_path):
        synthdata.generate(tmp_path, n_reviews=150, n_entities=8, seed=4)
        config = load_config(tmp_path / "reviewscope.cfg", {"entity_precompute_limit": 3, "depth": 2})
        artifacts = build_artifacts(config)
        assert len(artifacts.entity_trees) == 3
        ranked = [e.id for e in artifacts.corpus.entities_by_review_count()][:3]
        assert sorted(artifacts.entity_trees) == sorted(ranked)

    def test_deterministic_artifacts(self, tmp_path):
        synthdata.generate(tmp_path / "d", n_reviews=120, n_entities=5, seed=5)
        config = load_config(tmp_path / "d" / "reviewscope.cfg", {"depth": 3})
        a = build_artifacts(config)
        b = build_artifacts(config)
        assert a == b

    def test_preprocess_writes_byte_identical_runs(self, tmp_path):
        synthdata.generate(tmp_path / "d", n_reviews=100, n_entities=5, seed=3)
        config1 = load_config(tmp_path / "d" / "reviewscope.cfg", {"index_dir": tmp_path / "i1", "depth": 2})
        config2 = load_config(tmp_path / "d" / "reviewscope.cfg", {"index_dir": tmp_path / "i2", "depth": 2})
        t1, t2 = preprocess(config1), preprocess(config2)
        files1 = sorted(p.relative_to(t1) for p in t1.rglob("*") if p.is_file())
        files2 = sorted(p.relative_to(t2) for p in t2.rglob("*") if p.is_file())
        assert files1 == files2
        for rel in files1:
            assert (t1 / rel).read_bytes() == (t2 / rel).read_bytes(), rel
