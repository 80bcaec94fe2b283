"""Content-addressed JSON cache.

One JSON document per key under ``root/<namespace>/``, named by the SHA-256
of the key parts. Writes go through a temp file and ``os.replace`` so
concurrent writers of the same key race benignly (last write wins).
"""
from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
from pathlib import Path
from typing import Any


def digest(*parts: Any) -> str:
    """Stable hex digest of JSON-serializable key parts."""
    blob = json.dumps(parts, sort_keys=True, ensure_ascii=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class JsonCache:
    def __init__(self, root: str | os.PathLike, namespace: str = "default"):
        self.root = Path(root)
        self.namespace = namespace
        self.dir = self.root / namespace
        self.dir.mkdir(parents=True, exist_ok=True)

    def path(self, key: str) -> Path:
        return self.dir / f"{key}.json"

    def get(self, key: str) -> Any | None:
        try:
            with open(self.path(key), encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None
        except json.JSONDecodeError:
            # torn or hand-edited file; treat as a miss and let it be rewritten
            return None

    def put(self, key: str, value: Any) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(value, fh, sort_keys=True, ensure_ascii=False, indent=1)
            os.replace(tmp, self.path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def __contains__(self, key: str) -> bool:
        return self.path(key).exists()

    def keys(self) -> list[str]:
        return sorted(p.stem for p in self.dir.glob("*.json") if not p.name.startswith(".tmp-"))

    def __len__(self) -> int:
        return len(self.keys())

    def size_bytes(self) -> int:
        return sum(p.stat().st_size for p in self.dir.glob("*.json"))

    def clear(self) -> int:
        n = len(self)
        shutil.rmtree(self.dir, ignore_errors=True)
        self.dir.mkdir(parents=True, exist_ok=True)
        return n


class NullCache:
    """Cache that stores nothing; used when caching is switched off."""

    def get(self, key: str) -> None:
        return None

    def put(self, key: str, value: Any) -> None:
        pass

    def __contains__(self, key: str) -> bool:
        return False
