"""Manifest round trips and hashing."""

import hashlib
import json

import pytest

from sabergen.errors import DataError
from sabergen.manifest import RunManifest, file_sha256, read_manifest, write_manifest


def sample():
    return RunManifest(
        subcommand="simulate",
        config={"num_games": 4, "seed": 9, "out": "corpus.sbt"},
        seeds={"simulate": 9},
        tool_version="0.1.0",
    )


class TestHash:
    def test_matches_hashlib(self, tmp_path):
        path = tmp_path / "blob.bin"
        payload = bytes(range(256)) * 1000
        path.write_bytes(payload)
        assert file_sha256(path) == hashlib.sha256(payload).hexdigest()

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty"
        path.write_bytes(b"")
        assert file_sha256(path) == hashlib.sha256(b"").hexdigest()

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            file_sha256(tmp_path / "absent")


class TestRoundTrip:
    def test_full_round_trip(self, tmp_path):
        m = sample().start()
        data = tmp_path / "corpus.sbt"
        data.write_bytes(b"tokens")
        m.add_output(data)
        m.finish()
        path = write_manifest(m, tmp_path / "manifest.json")
        back = read_manifest(path)
        assert back == m

    def test_inputs_and_outputs_hashed(self, tmp_path):
        a = tmp_path / "in.bin"
        b = tmp_path / "out.bin"
        a.write_bytes(b"A")
        b.write_bytes(b"B")
        m = sample()
        m.add_input(a)
        m.add_output(b)
        assert m.inputs == {str(a): hashlib.sha256(b"A").hexdigest()}
        assert m.outputs == {str(b): hashlib.sha256(b"B").hexdigest()}

    def test_timestamps_ordered(self, tmp_path):
        m = sample().start()
        m.finish()
        assert m.started_at <= m.finished_at
        assert m.started_at.endswith("+00:00")

    def test_json_is_stable(self, tmp_path):
        m = sample()
        p1 = write_manifest(m, tmp_path / "a.json")
        p2 = write_manifest(m, tmp_path / "b.json")
        assert p1.read_bytes() == p2.read_bytes()
        doc = json.loads(p1.read_text())
        assert doc["format"] == 1
        assert doc["subcommand"] == "simulate"

    def test_config_values_survive(self, tmp_path):
        m = sample()
        m.config["lr"] = 0.0003
        m.config["nested"] = {"warmup_steps": 100}
        back = read_manifest(write_manifest(m, tmp_path / "m.json"))
        assert back.config["lr"] == 0.0003
        assert back.config["nested"] == {"warmup_steps": 100}


class TestReadErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            read_manifest(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(DataError, match="cannot read"):
            read_manifest(path)

    def test_wrong_format_marker(self, tmp_path):
        path = tmp_path / "old.json"
        path.write_text(json.dumps({"format": 99, "subcommand": "x", "config": {}}))
        with pytest.raises(DataError, match="not a recognized manifest"):
            read_manifest(path)

    def test_non_object_document(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(DataError, match="not a recognized manifest"):
            read_manifest(path)

    def test_missing_required_key(self, tmp_path):
        path = tmp_path / "partial.json"
        path.write_text(json.dumps({"format": 1, "subcommand": "train"}))
        with pytest.raises(DataError, match="missing"):
            read_manifest(path)

    def test_optional_keys_default(self, tmp_path):
        path = tmp_path / "minimal.json"
        path.write_text(json.dumps({"format": 1, "subcommand": "train", "config": {}}))
        m = read_manifest(path)
        assert m.seeds == {} and m.inputs == {} and m.outputs == {}
        assert m.tool_version == "" and m.started_at == ""
