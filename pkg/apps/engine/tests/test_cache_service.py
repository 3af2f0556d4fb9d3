"""
Tests for the JSON file cache
"""

from unittest.mock import patch

import pytest

from services.cache_service import CacheService


class TestCacheService:
    """Cache rooted in a temporary directory"""

    @pytest.fixture
    def cache(self, tmp_path):
        return CacheService(str(tmp_path / "cache"))

    def test_set_and_get(self, cache):
        assert cache.get("missing") is None
        assert cache.set("unit-group-x", {"order": 16}, namespace="unit-group")
        assert cache.get("unit-group-x") == {"order": 16}
        stats = cache.get_stats()
        assert stats.hit_count == 1
        assert stats.miss_count == 1
        assert stats.write_count == 1
        assert stats.total_entries == 1
        assert stats.hit_rate == 0.5

    def test_entries_record_namespace(self, cache):
        cache.set("a", {"x": 1}, namespace="unit-group")
        entries = cache.entries()
        assert [e.namespace for e in entries] == ["unit-group"]
        assert entries[0].size_bytes > 0

    def test_delete_and_clear(self, cache):
        cache.set("a", {})
        cache.set("b", {})
        assert cache.exists("a")
        assert cache.delete("a")
        assert not cache.delete("a")
        assert cache.clear_all() == 1
        assert cache.entries() == []

    def test_unreadable_entry_is_a_miss(self, cache):
        cache.set("a", {"x": 1})
        (cache.cache_dir / "a.json").write_text("{not json")
        assert cache.get("a") is None
        assert cache.get_stats().miss_count == 1

    def test_disabled_cache(self):
        cache = CacheService("")
        assert not cache.enabled
        assert not cache.set("a", {"x": 1})
        assert cache.get("a") is None
        assert cache.clear_all() == 0

    def test_write_failure_is_reported(self, cache):
        with patch("services.cache_service.os.replace", side_effect=OSError("disk full")):
            assert not cache.set("a", {"x": 1})
        assert not cache.exists("a")

    def test_cache_keys(self):
        first = CacheService.generate_cache_key("unit-group", 2, ["4", "0"])
        assert first == CacheService.generate_cache_key("unit-group", 2, ["4", "0"])
        assert first != CacheService.generate_cache_key("unit-group", 2, ["8", "0"])
        assert first.startswith("unit-group-")
