"""
In-memory cache for finite element space descriptors.

Meshes are immutable, so a space built for (mesh, degree) never changes. The
cache keys entries by the mesh uid and evicts least-recently-used entries once
it is full, so long adaptive runs do not keep every level alive.
"""

import logging
import threading
from collections import OrderedDict
from functools import wraps

logger = logging.getLogger(__name__)


class SpaceCache:
    """
    A bounded LRU cache shared by the space builders.

    Args:
        max_size (int): Maximum number of entries kept alive
    """

    def __init__(self, max_size=16):
        self.max_size = max_size
        self._cache = OrderedDict()
        self._lock = threading.RLock()
        self._stats = {"hits": 0, "misses": 0, "sets": 0, "evictions": 0}

    def get(self, key):
        """Return the cached value or None."""
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                self._stats["hits"] += 1
                return self._cache[key]
            self._stats["misses"] += 1
            return None

    def set(self, key, value):
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
            elif len(self._cache) >= self.max_size:
                self._evict_one()
            self._cache[key] = value
            self._stats["sets"] += 1

    def clear(self):
        """Clear the entire cache."""
        with self._lock:
            self._cache.clear()

    def _evict_one(self):
        self._cache.popitem(last=False)
        self._stats["evictions"] += 1

    @property
    def stats(self):
        """Get cache statistics."""
        with self._lock:
            stats = self._stats.copy()
            stats["size"] = len(self._cache)
            stats["max_size"] = self.max_size
            return stats


# Global cache instance
_cache = None


def get_cache(max_size=None):
    """Get the global cache instance, creating it if necessary (size from defaults.json)."""
    global _cache
    if _cache is None:
        if max_size is None:
            from ..config.settings import load_defaults
            from ..exceptions import ConfigurationError

            try:
                max_size = int(load_defaults().get("cache_size", 16))
            except ConfigurationError:
                max_size = 16
        _cache = SpaceCache(max_size=max_size)
    return _cache


def _key_part(arg):
    # meshes are identified by uid, everything else by value
    return str(getattr(arg, "uid", arg))


def cached(prefix):
    """
    Decorator caching a space builder by its arguments.

    Example:
        @cached("xh")
        def build_xh(mesh, k):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            key_parts = [prefix]
            key_parts.extend(_key_part(arg) for arg in args)
            key_parts.extend(f"{k}={_key_part(v)}" for k, v in sorted(kwargs.items()))
            cache_key = ":".join(key_parts)

            cache = get_cache()
            result = cache.get(cache_key)
            if result is not None:
                return result

            result = func(*args, **kwargs)
            if result is not None:
                cache.set(cache_key, result)
            return result
        return wrapper
    return decorator
