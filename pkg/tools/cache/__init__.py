from __future__ import annotations

import enum
import threading
from functools import wraps
from typing import Any, Callable, Hashable, MutableMapping, Protocol, TypeVar

from lru import LRU

R = TypeVar("R")


class CacheProtocol(Protocol[R]):
    cache: MutableMapping[Hashable, R]

    def __call__(self, *args: Any, **kwds: Any) -> R: ...

    def get_key(self, *args: Any, **kwargs: Any) -> Hashable: ...

    def invalidate(self, *args: Any, **kwargs: Any) -> bool: ...

    def clear(self) -> None: ...

    def prime(self, key: Hashable, value: R) -> None: ...

    def get_stats(self) -> tuple[int, int]: ...


class Strategy(enum.Enum):
    lru = 1
    raw = 2


def cache(
    maxsize: int = 128,
    strategy: Strategy = Strategy.lru,
    key: Callable[..., Hashable] | None = None,
) -> Callable[[Callable[..., R]], CacheProtocol[R]]:
    """
    Memoize a pure function behind a lock.

    `key` maps the call arguments to the cache key; by default the
    positional and keyword arguments themselves are used, so they must be
    hashable. Concurrent callers computing the same key may both run the
    function; the first stored result wins, so results stay deterministic.
    """

    def decorator(func: Callable[..., R]) -> CacheProtocol[R]:
        lock = threading.Lock()
        if strategy is Strategy.lru:
            _internal_cache: MutableMapping[Hashable, R] = LRU(maxsize)
            _stats = _internal_cache.get_stats  # type: ignore
        else:
            _internal_cache = {}

            def _stats():
                return 0, 0

        def _make_key(args: tuple[Any, ...], kwargs: dict[str, Any]) -> Hashable:
            if key is not None:
                return key(*args, **kwargs)

            return (args, tuple(sorted(kwargs.items())))

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> R:
            k = _make_key(args, kwargs)
            with lock:
                if k in _internal_cache:
                    return _internal_cache[k]

            value = func(*args, **kwargs)
            with lock:
                if k in _internal_cache:
                    return _internal_cache[k]

                _internal_cache[k] = value

            return value

        def _invalidate(*args: Any, **kwargs: Any) -> bool:
            with lock:
                try:
                    del _internal_cache[_make_key(args, kwargs)]
                except KeyError:
                    return False
                else:
                    return True

        def _clear() -> None:
            with lock:
                _internal_cache.clear()

        def _prime(k: Hashable, value: R) -> None:
            with lock:
                _internal_cache[k] = value

        wrapper.cache = _internal_cache  # type: ignore
        wrapper.get_key = lambda *args, **kwargs: _make_key(args, kwargs)  # type: ignore
        wrapper.invalidate = _invalidate  # type: ignore
        wrapper.clear = _clear  # type: ignore
        wrapper.prime = _prime  # type: ignore
        wrapper.get_stats = _stats  # type: ignore
        return wrapper  # type: ignore

    return decorator


__all__ = ("cache", "Strategy", "CacheProtocol")
