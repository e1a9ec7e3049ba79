"""Content-addressed on-disk cache for computed potential tables.

Entries are single JSON files named by a SHA-256 digest of the canonical
(sorted-key, no-whitespace) serialization of the parameter dictionary, so a
cache directory can be shared between runs and machines.  Writes go through a
temporary file plus ``os.replace`` under an advisory lock, which keeps entries
whole even when several processes fill the same directory concurrently.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os

from .errors import CacheError

FORMAT = "cpqr-cache-v1"


def canonical_key(key: dict) -> str:
    """Serialize ``key`` deterministically (sorted keys, minimal separators)."""
    try:
        return json.dumps(key, sort_keys=True, separators=(",", ":"), allow_nan=False)
    except (TypeError, ValueError) as exc:
        raise CacheError(f"cache key is not canonically serializable: {exc}") from exc


class PotentialCache:
    """A directory of immutable JSON entries keyed by parameter dictionaries."""

    def __init__(self, directory: str):
        self.directory = str(directory)

    def path_for(self, key: dict) -> str:
        digest = hashlib.sha256(canonical_key(key).encode("ascii")).hexdigest()[:24]
        return os.path.join(self.directory, f"table-{digest}.json")

    def get(self, key: dict):
        """Return the stored payload for ``key`` or None on a miss.

        A digest file written by an older format version counts as a miss (it
        will be overwritten); a file that cannot be parsed at all is treated
        as corruption and raised loudly rather than silently recomputed.
        """
        path = self.path_for(key)
        try:
            with open(path, encoding="ascii") as handle:
                blob = json.load(handle)
        except FileNotFoundError:
            return None
        except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CacheError(
                f"unreadable cache entry {path}: {exc}; delete the file or "
                "disable the cache to recompute"
            ) from exc
        if not isinstance(blob, dict) or blob.get("format") != FORMAT:
            return None
        if blob.get("key") != json.loads(canonical_key(key)):
            return None  # truncated-digest collision: recompute
        return blob.get("payload")

    def put(self, key: dict, payload: dict) -> str:
        """Store ``payload`` under ``key`` atomically; returns the file path."""
        path = self.path_for(key)
        blob = {
            "format": FORMAT,
            "key": json.loads(canonical_key(key)),
            "payload": payload,
        }
        try:
            text = json.dumps(
                blob, sort_keys=True, separators=(",", ":"), allow_nan=False
            )
        except (TypeError, ValueError) as exc:
            raise CacheError(f"cache payload is not serializable: {exc}") from exc
        try:
            os.makedirs(self.directory, exist_ok=True)
            lock_path = os.path.join(self.directory, ".lock")
            with open(lock_path, "w") as lock:
                fcntl.flock(lock, fcntl.LOCK_EX)
                try:
                    tmp = path + ".tmp"
                    with open(tmp, "w", encoding="ascii") as handle:
                        handle.write(text)
                        handle.write("\n")
                    os.replace(tmp, path)  # same directory, so atomic
                finally:
                    fcntl.flock(lock, fcntl.LOCK_UN)
        except OSError as exc:
            raise CacheError(f"cannot write cache entry {path}: {exc}") from exc
        return path
