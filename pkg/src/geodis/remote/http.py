"""Shared HTTP plumbing for the remote geocoders: caching, rate limiting, retries."""
from __future__ import annotations

import logging
import random
import threading
import time
from typing import Any, Callable

import requests

from geodis.cache import NullCache, digest
from geodis.retry import RateLimiter, RetriesExhausted, TransientError, UniformJitter, call_with_retry

log = logging.getLogger(__name__)

USER_AGENT = "geodis/0.1 (disaster-location geocoder)"


class RemoteError(Exception):
    pass


class ServiceExhausted(RemoteError):
    """Transient failures on every attempt."""


class MalformedResponse(RemoteError):
    """The service answered with something we cannot interpret."""


class OfflineMiss(RemoteError):
    """Offline mode and the response is not cached."""


class JsonHttpClient:
    """GET-JSON client with a response cache, a shared limiter and retries.

    Thread-safe: one ``requests.Session`` per thread, one limiter for all.
    """

    def __init__(
        self,
        base_url: str,
        *,
        min_interval: float = 1.0,
        retry_policy=UniformJitter(),
        cache=None,
        offline: bool = False,
        timeout: float = 30.0,
        limiter: RateLimiter | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
        user_agent: str = USER_AGENT,
    ):
        self.base_url = base_url
        self.limiter = limiter or RateLimiter(min_interval)
        self.retry_policy = retry_policy
        self.cache = cache if cache is not None else NullCache()
        self.offline = offline
        self.timeout = timeout
        self.user_agent = user_agent
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._local = threading.local()
        self._count_lock = threading.Lock()
        self.requests_made = 0

    def _session(self) -> requests.Session:
        s = getattr(self._local, "session", None)
        if s is None:
            s = self._local.session = requests.Session()
        return s

    def _once(self, params: dict, headers: dict) -> Any:
        with self.limiter:
            with self._count_lock:
                self.requests_made += 1
            try:
                resp = self._session().get(self.base_url, params=params, headers=headers,
                                           timeout=self.timeout)
            except (requests.Timeout, requests.ConnectionError) as exc:
                raise TransientError(type(exc).__name__) from None
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise MalformedResponse(f"HTTP {resp.status_code} from {self.base_url}")
        try:
            return resp.json()
        except ValueError:
            raise MalformedResponse(f"non-JSON body from {self.base_url}") from None

    def get_json(self, params: dict, headers: dict | None = None) -> Any:
        headers = {"User-Agent": self.user_agent, **(headers or {})}
        key = digest(self.base_url, sorted(params.items()))
        hit = self.cache.get(key)
        if hit is not None:
            return hit["body"]
        if self.offline:
            raise OfflineMiss(f"offline and not cached: {params}")
        try:
            body = call_with_retry(lambda: self._once(params, headers), self.retry_policy,
                                   sleep=self._sleep, rng=self._rng, what=self.base_url)
        except RetriesExhausted as exc:
            raise ServiceExhausted(str(exc)) from None
        self.cache.put(key, {"body": body})
        return body
