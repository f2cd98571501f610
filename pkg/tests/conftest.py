import json
from pathlib import Path

import pytest

from reviewscope import synthdata
from reviewscope.corpus import Corpus, Entity, Review, Schema
from reviewscope.pipeline import load_config, preprocess
from reviewscope.snapshot import Snapshot


def write_jsonl(path: Path, records: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


@pytest.fixture
def tiny_schema() -> Schema:
    return Schema(("cleanliness", "location", "staff"))


@pytest.fixture
def tiny_corpus() -> Corpus:
    reviews = [
        Review("r1", "e1", "The carpet was filthy. Never again!"),
        Review("r2", "e1", "Great location near the station."),
        Review("r3", "e2", "Friendly staff and a clean room."),
        Review("r4", "e2", "Location was noisy but staff helped."),
        Review("r5", "e2", "Spotless carpet, lovely stay."),
    ]
    entities = [Entity("e1", "Harbor Inn", lat=37.7, lon=-122.4), Entity("e2", "Cedar Lodge")]
    return Corpus.build(reviews, entities)


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory) -> Path:
    """Small synthetic dataset shared by service/CLI tests."""
    out = tmp_path_factory.mktemp("synth")
    synthdata.generate(out, n_reviews=600, n_entities=10, seed=21)
    return out


@pytest.fixture(scope="session")
def synth_snapshot(synth_dir) -> Snapshot:
    config = load_config(synth_dir / "reviewscope.cfg")
    target = preprocess(config)
    return Snapshot.open(target)
