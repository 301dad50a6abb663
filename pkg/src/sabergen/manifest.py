"""Run manifests: the audit trail one pipeline stage leaves behind.

Every stage writes exactly one manifest next to its outputs recording
the subcommand, every resolved config value, the seeds in play, content
hashes of inputs and outputs, the tool version, and start/end times.
Re-running a stage from its manifest reproduces the outputs to within
that stage's determinism contract.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError

__all__ = ["RunManifest", "file_sha256", "write_manifest", "read_manifest"]

_FORMAT = 1


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    seeds: dict[str, int] = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)  # path -> sha256
    outputs: dict[str, str] = field(default_factory=dict)
    tool_version: str = ""
    started_at: str = ""
    finished_at: str = ""

    def start(self) -> "RunManifest":
        self.started_at = _dt.datetime.now(_dt.timezone.utc).isoformat()
        return self

    def finish(self) -> "RunManifest":
        self.finished_at = _dt.datetime.now(_dt.timezone.utc).isoformat()
        return self

    def add_input(self, path) -> None:
        self.inputs[str(path)] = file_sha256(path)

    def add_output(self, path) -> None:
        self.outputs[str(path)] = file_sha256(path)


def write_manifest(manifest: RunManifest, path) -> Path:
    path = Path(path)
    doc = {
        "format": _FORMAT,
        "subcommand": manifest.subcommand,
        "config": manifest.config,
        "seeds": manifest.seeds,
        "inputs": manifest.inputs,
        "outputs": manifest.outputs,
        "tool_version": manifest.tool_version,
        "started_at": manifest.started_at,
        "finished_at": manifest.finished_at,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_manifest(path) -> RunManifest:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise DataError(f"cannot read manifest {path}: {err}") from None
    if not isinstance(doc, dict) or doc.get("format") != _FORMAT:
        raise DataError(f"{path} is not a recognized manifest")
    try:
        return RunManifest(
            subcommand=doc["subcommand"],
            config=doc["config"],
            seeds=doc.get("seeds", {}),
            inputs=doc.get("inputs", {}),
            outputs=doc.get("outputs", {}),
            tool_version=doc.get("tool_version", ""),
            started_at=doc.get("started_at", ""),
            finished_at=doc.get("finished_at", ""),
        )
    except KeyError as err:
        raise DataError(f"manifest {path} is missing {err}") from None
