"""Worker pool, timeouts and TTL caching of suite reports."""
import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FuturesTimeoutError
from typing import Callable, Iterable, TypeVar

_WORKERS = max(1, int(os.environ.get("MIXTRACE_WORKERS", "4")))
_VERIFY_TIMEOUT_SEC = int(os.environ.get("MIXTRACE_VERIFY_TIMEOUT_SEC", "600"))
_REPORT_TIMEOUT_SEC = int(os.environ.get("MIXTRACE_REPORT_TIMEOUT_SEC", "120"))
_CACHE_TTL_SEC = int(os.environ.get("MIXTRACE_CACHE_TTL_SEC", "300"))
_CACHE_MAX_SIZE = int(os.environ.get("MIXTRACE_CACHE_MAX", "64"))

# request-level work (suite runs) and per-block numerics use separate pools so a
# suite holding a request thread can still fan out its blocks
_executor = ThreadPoolExecutor(max_workers=_WORKERS, thread_name_prefix="mixtrace")
_BLOCK_PREFIX = "mixtrace-block"
_block_executor = ThreadPoolExecutor(max_workers=_WORKERS, thread_name_prefix=_BLOCK_PREFIX)

_report_cache: dict[str, tuple[dict, float]] = {}
_cache_order: list[str] = []

T = TypeVar("T")
R = TypeVar("R")


def get_workers() -> int:
    return _WORKERS


def parallel_map(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map over the block pool; serial for a single item, a single worker,
    or when already running on a block worker (nested maps would starve the pool)."""
    items = list(items)
    nested = threading.current_thread().name.startswith(_BLOCK_PREFIX)
    if _WORKERS == 1 or len(items) <= 1 or nested:
        return [func(item) for item in items]
    return list(_block_executor.map(func, items))


def run_sync_with_timeout(seconds: int, func, *args, **kwargs):
    """Run sync function in a thread with timeout. Raises TimeoutError on timeout."""
    future = _executor.submit(func, *args, **kwargs)
    try:
        return future.result(timeout=seconds)
    except FuturesTimeoutError:
        future.cancel()
        raise TimeoutError(f"Operation timed out after {seconds}s")


def _config_cache_key(config_dict: dict) -> str:
    canonical = json.dumps(config_dict, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def get_cached_report(config_dict: dict) -> dict | None:
    """Return a cached SuiteReport dict if present and not expired."""
    if _CACHE_TTL_SEC <= 0:
        return None
    key = _config_cache_key(config_dict)
    if key not in _report_cache:
        return None
    data, created = _report_cache[key]
    if time.time() - created > _CACHE_TTL_SEC:
        _report_cache.pop(key, None)
        if key in _cache_order:
            _cache_order.remove(key)
        return None
    return data


def set_cached_report(config_dict: dict, report_dict: dict) -> None:
    """Store a SuiteReport dict (with size/eviction)."""
    if _CACHE_TTL_SEC <= 0:
        return
    key = _config_cache_key(config_dict)
    while len(_report_cache) >= _CACHE_MAX_SIZE and _cache_order:
        old = _cache_order.pop(0)
        _report_cache.pop(old, None)
    _report_cache[key] = (report_dict, time.time())
    if key not in _cache_order:
        _cache_order.append(key)


def clear_report_cache() -> None:
    _report_cache.clear()
    _cache_order.clear()


def get_verify_timeout_sec() -> int:
    return _VERIFY_TIMEOUT_SEC


def get_report_timeout_sec() -> int:
    return _REPORT_TIMEOUT_SEC
