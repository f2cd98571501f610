import json

import pytest

from reviewscope.pipeline import load_config, preprocess
from reviewscope.store import (
    StoreError,
    next_version_dir,
    open_index,
    path_to_str,
    resolve_index_dir,
    save_index,
    str_to_path,
)


def test_round_trip_structural_equality(synth_snapshot, tmp_path):
    save_index(tmp_path / "copy", synth_snapshot.artifacts)
    reopened = open_index(tmp_path / "copy")
    assert reopened == synth_snapshot.artifacts


def test_open_empty_dir(tmp_path):
    with pytest.raises(StoreError, match="no manifest"):
        open_index(tmp_path)


def test_version_mismatch(synth_snapshot, tmp_path):
    save_index(tmp_path / "idx", synth_snapshot.artifacts)
    manifest_path = tmp_path / "idx" / "manifest.json"
    manifest = json.loads(manifest_path.read_text())
    manifest["format_version"] = 0
    manifest_path.write_text(json.dumps(manifest))
    with pytest.raises(StoreError, match="re-run preprocess"):
        open_index(tmp_path / "idx")


def test_path_codec():
    assert path_to_str(()) == ""
    assert path_to_str((0, 2, 1)) == "0.2.1"
    assert str_to_path("0.2.1") == (0, 2, 1)
    assert str_to_path("") == ()
    with pytest.raises(StoreError):
        str_to_path("a.b")


def test_resolve_latest_version(synth_dir, synth_snapshot):
    # the session fixture preprocessed v1 under synth_dir/index
    resolved = resolve_index_dir(synth_dir / "index")
    assert resolved.name.startswith("v")
    assert (resolved / "manifest.json").exists()


def test_next_version_dir(tmp_path):
    assert next_version_dir(tmp_path).name == "v1"
    (tmp_path / "v1").mkdir()
    (tmp_path / "v7").mkdir()
    assert next_version_dir(tmp_path).name == "v8"


def test_members_file_is_named_members_bin(synth_snapshot):
    assert (synth_snapshot.index_dir / "members.bin").exists()
    assert (synth_snapshot.index_dir / "tree.json").exists()
    assert (synth_snapshot.index_dir / "summaries.json").exists()
