"""Versioned on-disk cache.

One directory per artifact kind; file name is the hex SHA-256 of the key
tuple; every file starts with a header line naming the format version.
Files with another version are ignored (and later overwritten).
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any

CACHE_ENV = "ARTIFACT_CACHE_DIR"
CACHE_VERSION = 1
MAGIC = "artifact-cache"

_enabled = True


def cache_root() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "artifact"


def set_enabled(flag: bool) -> None:
    global _enabled
    _enabled = flag


def _path(kind: str, key: tuple) -> Path:
    digest = hashlib.sha256(repr(key).encode()).hexdigest()
    return cache_root() / kind / f"{digest}.json"


def _header(kind: str) -> str:
    return f"{MAGIC} {kind} v{CACHE_VERSION}"


def load(kind: str, key: tuple) -> Any | None:
    if not _enabled:
        return None
    path = _path(kind, key)
    try:
        with open(path) as fh:
            if fh.readline().rstrip("\n") != _header(kind):
                return None
            record = json.load(fh)
    except (OSError, ValueError):
        return None
    if record.get("key") != repr(key):
        return None
    return record["value"]


def store(kind: str, key: tuple, value: Any) -> None:
    if not _enabled:
        return
    path = _path(kind, key)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(_header(kind) + "\n")
            json.dump({"key": repr(key), "value": value}, fh)
        os.replace(tmp, path)
    except OSError:
        pass  # caching is best effort


def cached(kind: str, key: tuple, compute):
    """Return the cached value for key, computing and storing it on a miss."""
    hit = load(kind, key)
    if hit is not None:
        return hit, True
    value = compute()
    store(kind, key, value)
    return value, False
