"""
File-backed caching service for unit-group tables and other derived data
Persists JSON documents under HMF_CACHE_DIR with hit/miss statistics
"""
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import get_settings

logger = logging.getLogger(__name__)


@dataclass
class CacheStats:
    """Cache statistics data class"""
    total_entries: int
    hit_count: int
    miss_count: int
    write_count: int
    total_size_mb: float
    hit_rate: float


@dataclass
class CacheEntry:
    """Cache entry data class"""
    cache_key: str
    namespace: str
    data: Dict[str, Any]
    created_at: datetime
    size_bytes: int


class CacheService:
    """Service class for JSON file caching operations"""

    def __init__(self, cache_dir: Optional[str] = None):
        directory = cache_dir if cache_dir is not None else get_settings().CACHE_DIR
        self.enabled = bool(directory)
        self.cache_dir = Path(directory).expanduser() if self.enabled else None
        self._hits = 0
        self._misses = 0
        self._writes = 0

    def _path(self, cache_key: str) -> Path:
        return self.cache_dir / f"{cache_key}.json"

    def get(self, cache_key: str) -> Optional[Dict[str, Any]]:
        """Get cached data by key"""
        if not self.enabled:
            return None
        path = self._path(cache_key)
        try:
            with path.open("r", encoding="utf-8") as handle:
                entry = json.load(handle)
            self._hits += 1
            logger.debug(f"Cache hit for key: {cache_key}")
            return entry["data"]
        except FileNotFoundError:
            self._misses += 1
            logger.debug(f"Cache miss for key: {cache_key}")
            return None
        except (OSError, ValueError, KeyError) as e:
            self._misses += 1
            logger.warning(f"Ignoring unreadable cache entry {cache_key}: {e}")
            return None

    def set(self, cache_key: str, data: Dict[str, Any], namespace: str = "default") -> bool:
        """Write data under the key; the write is atomic per file"""
        if not self.enabled:
            return False
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            entry = {
                "cache_key": cache_key,
                "namespace": namespace,
                "created_at": datetime.now().isoformat(),
                "data": data,
            }
            tmp = self._path(cache_key).with_suffix(".tmp")
            with tmp.open("w", encoding="utf-8") as handle:
                json.dump(entry, handle)
            os.replace(tmp, self._path(cache_key))
            self._writes += 1
            logger.debug(f"Cache set for key: {cache_key} ({namespace})")
            return True
        except OSError as e:
            logger.error(f"Cache set error for key {cache_key}: {e}")
            return False

    def delete(self, cache_key: str) -> bool:
        """Delete cached data by key"""
        if not self.enabled:
            return False
        try:
            self._path(cache_key).unlink()
            return True
        except FileNotFoundError:
            return False
        except OSError as e:
            logger.error(f"Cache delete error for key {cache_key}: {e}")
            return False

    def exists(self, cache_key: str) -> bool:
        return self.enabled and self._path(cache_key).exists()

    def entries(self) -> List[CacheEntry]:
        """List readable cache entries"""
        if not self.enabled or not self.cache_dir.exists():
            return []
        result = []
        for path in sorted(self.cache_dir.glob("*.json")):
            try:
                with path.open("r", encoding="utf-8") as handle:
                    raw = json.load(handle)
                result.append(CacheEntry(
                    cache_key=raw["cache_key"],
                    namespace=raw.get("namespace", "default"),
                    data=raw["data"],
                    created_at=datetime.fromisoformat(raw["created_at"]),
                    size_bytes=path.stat().st_size,
                ))
            except (OSError, ValueError, KeyError) as e:
                logger.warning(f"Skipping unreadable cache file {path.name}: {e}")
        return result

    def clear_all(self) -> int:
        """Remove every cache file; returns the number removed"""
        if not self.enabled or not self.cache_dir.exists():
            return 0
        removed = 0
        for path in self.cache_dir.glob("*.json"):
            try:
                path.unlink()
                removed += 1
            except OSError as e:
                logger.error(f"Cache clear error for {path.name}: {e}")
        logger.warning(f"Cleared {removed} cache entries")
        return removed

    def get_stats(self) -> CacheStats:
        """Get cache statistics"""
        entries = self.entries()
        lookups = self._hits + self._misses
        return CacheStats(
            total_entries=len(entries),
            hit_count=self._hits,
            miss_count=self._misses,
            write_count=self._writes,
            total_size_mb=sum(e.size_bytes for e in entries) / (1024 * 1024),
            hit_rate=self._hits / lookups if lookups else 0.0,
        )

    @staticmethod
    def generate_cache_key(namespace: str, *parts: Any) -> str:
        """Generate a cache key from a namespace and JSON-serializable parts"""
        payload = json.dumps([namespace, *parts], sort_keys=True, default=str)
        digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()[:32]
        return f"{namespace}-{digest}"


# Global cache service instance
_cache_service: Optional[CacheService] = None


def get_cache_service() -> CacheService:
    """Get the process-wide cache service"""
    global _cache_service
    if _cache_service is None:
        _cache_service = CacheService()
    return _cache_service


def reset_cache_service(cache_dir: Optional[str] = None) -> CacheService:
    """Replace the process-wide cache service (tests, CLI overrides)"""
    global _cache_service
    _cache_service = CacheService(cache_dir)
    return _cache_service
