"""Retry policies and a per-endpoint rate limiter."""
from __future__ import annotations

import logging
import random
import threading
import time
from dataclasses import dataclass
from typing import Callable, TypeVar

log = logging.getLogger(__name__)
T = TypeVar("T")


class TransientError(Exception):
    """Timeout, connection drop, HTTP 429 or 5xx: worth another try."""


class RetriesExhausted(Exception):
    def __init__(self, message: str, attempts: int, last: BaseException | None = None):
        super().__init__(message)
        self.attempts = attempts
        self.last = last


@dataclass(frozen=True)
class ExponentialBackoff:
    """Delay ``min(cap, base * 2**attempt)`` plus uniform jitter in [0, base)."""

    retries: int = 5
    base: float = 1.0
    cap: float = 32.0

    def delay(self, attempt: int, rng: random.Random) -> float:
        return min(self.cap, self.base * 2 ** attempt) + rng.uniform(0.0, self.base)

    def expected_delay(self, attempt: int) -> float:
        return min(self.cap, self.base * 2 ** attempt) + self.base / 2


@dataclass(frozen=True)
class UniformJitter:
    """Short randomized backoff: each wait drawn uniformly from [low, high]."""

    retries: int = 4
    low: float = 0.5
    high: float = 2.0

    def delay(self, attempt: int, rng: random.Random) -> float:
        return rng.uniform(self.low, self.high)

    def expected_delay(self, attempt: int) -> float:
        return (self.low + self.high) / 2


def call_with_retry(
    fn: Callable[[], T],
    policy,
    *,
    retry_on: tuple[type[BaseException], ...] = (TransientError,),
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
    what: str = "request",
) -> T:
    """Run ``fn`` at most ``policy.retries + 1`` times.

    Raises:
        RetriesExhausted: every attempt raised one of ``retry_on``.
    """
    rng = rng or random.Random()
    last: BaseException | None = None
    for attempt in range(policy.retries + 1):
        try:
            return fn()
        except retry_on as exc:
            last = exc
            if attempt == policy.retries:
                break
            wait = policy.delay(attempt, rng)
            log.debug("%s failed (%s); retry %d in %.2fs", what, exc, attempt + 1, wait)
            sleep(wait)
    raise RetriesExhausted(f"{what} failed after {policy.retries + 1} attempts: {last}",
                           policy.retries + 1, last)


class RateLimiter:
    """Spaces requests to one endpoint at least ``min_interval`` seconds apart.

    Used as a context manager around each request. The lock is held for the
    whole request and the interval counts from the previous request's end, so
    the spacing also holds as observed by the server, whatever the number of
    workers sharing the limiter.
    """

    def __init__(self, min_interval: float, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        self.min_interval = float(min_interval)
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self.last_dispatch: float | None = None
        self._last_done: float | None = None

    def __enter__(self) -> float:
        self._lock.acquire()
        try:
            now = self._clock()
            if self._last_done is not None:
                remaining = self._last_done + self.min_interval - now
                while remaining > 0:
                    self._sleep(remaining)
                    now = self._clock()
                    remaining = self._last_done + self.min_interval - now
            self.last_dispatch = now
            return now
        except BaseException:
            self._lock.release()
            raise

    def __exit__(self, *exc) -> None:
        self._last_done = self._clock()
        self._lock.release()
