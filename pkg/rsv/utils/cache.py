import hashlib
import json
import os
from pathlib import Path
from typing import Any, Optional

import numpy as np
from diskcache import Cache

from rsv.utils.env import debug


class CountsCache:
    """Cache of empirical successor-count tensors so long sampling runs are reused."""

    _instance = None
    _cache = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(CountsCache, cls).__new__(cls)
            cache_dir = os.environ.get(
                "RSV_CACHE_DIR", str(Path.home() / ".rsv" / "cache")
            )
            cls._cache = Cache(cache_dir)
        return cls._instance

    @staticmethod
    def make_key(**parts: Any) -> str:
        """Generate a stable key from the inputs that determine the counts."""
        payload = json.dumps(parts, sort_keys=True, default=str)
        return hashlib.md5(payload.encode()).hexdigest()

    @staticmethod
    def digest_array(array: np.ndarray) -> str:
        return hashlib.md5(np.ascontiguousarray(array).tobytes()).hexdigest()

    @staticmethod
    def digest_file(path: Path, chunk_size: int = 1 << 20) -> str:
        digest = hashlib.md5()
        with open(path, "rb") as file:
            for chunk in iter(lambda: file.read(chunk_size), b""):
                digest.update(chunk)
        return digest.hexdigest()

    def get(self, key: str, enabled: bool = True) -> Optional[np.ndarray]:
        if not (enabled and self.is_enabled()):
            return None
        counts = self._cache.get(key)
        if counts is not None:
            debug(f"cache hit {key}")
        return counts

    def set(self, key: str, counts: np.ndarray, enabled: bool = True) -> None:
        if not (enabled and self.is_enabled()):
            return
        self._cache.set(key, np.asarray(counts))

    def clear(self) -> None:
        self._cache.clear()

    def __len__(self) -> int:
        return len(self._cache)

    @property
    def directory(self) -> str:
        return self._cache.directory

    def volume(self) -> int:
        return self._cache.volume()

    @staticmethod
    def is_enabled() -> bool:
        return os.environ.get("RSV_ENABLE_CACHE", "true").lower() == "true"
