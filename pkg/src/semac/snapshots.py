"""Versioned binary snapshots for offline-built indexes."""

from __future__ import annotations

import pickle
from pathlib import Path

_MAGIC = "semac-snapshot"
_VERSION = 1


class SnapshotError(Exception):
    pass


def save_snapshot(path, kind: str, payload) -> None:
    doc = {"magic": _MAGIC, "version": _VERSION, "kind": kind, "payload": payload}
    Path(path).write_bytes(pickle.dumps(doc, protocol=pickle.HIGHEST_PROTOCOL))


def load_snapshot(path, kind: str):
    try:
        doc = pickle.loads(Path(path).read_bytes())
    except Exception as e:
        raise SnapshotError(f"{path}: not a readable snapshot: {e}") from e
    if not isinstance(doc, dict) or doc.get("magic") != _MAGIC:
        raise SnapshotError(f"{path}: not a snapshot file")
    if doc.get("version") != _VERSION:
        raise SnapshotError(f"{path}: unsupported snapshot version {doc.get('version')}")
    if doc.get("kind") != kind:
        raise SnapshotError(f"{path}: snapshot kind {doc.get('kind')!r}, expected {kind!r}")
    return doc["payload"]
