"""On-disk result cache keyed by a content hash of canonicalized inputs."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


class ResultCache:
    """JSON files ``<key>.json`` under ``root``; a ``None`` root disables caching.

    Each entry stores its own key, so a renamed or truncated file is treated as
    a miss.  An unwritable directory downgrades to no caching with a warning.
    """

    def __init__(self, root: str | os.PathLike | None):
        self.root: Path | None = None
        self.warning: str | None = None
        if root is None:
            return
        p = Path(root)
        try:
            p.mkdir(parents=True, exist_ok=True)
            probe = tempfile.NamedTemporaryFile(dir=p, delete=True)
            probe.close()
        except OSError as exc:
            self.warning = f"cache directory {p} unusable ({exc}); continuing without cache"
            log.warning(self.warning)
            return
        self.root = p

    @property
    def enabled(self) -> bool:
        return self.root is not None

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def lookup(self, key: str):
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            entry = json.loads(path.read_text())
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as exc:
            log.warning("ignoring unreadable cache entry %s: %s", path, exc)
            return None
        if not isinstance(entry, dict) or entry.get("key") != key or "value" not in entry:
            log.warning("ignoring stale or malformed cache entry %s", path)
            return None
        return entry["value"]

    def store(self, key: str, value) -> bool:
        if not self.enabled:
            return False
        path = self._path(key)
        try:
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                fh.write(canonical_json({"key": key, "value": value}))
            os.replace(tmp, path)
        except OSError as exc:
            log.warning("could not write cache entry %s: %s", path, exc)
            return False
        return True
