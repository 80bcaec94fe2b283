"""LLM-backed parsing with caching and retries."""
from __future__ import annotations

import json
import logging
import random
import threading
import time
from typing import Callable, Iterator, Protocol

import requests

from geodis.cache import digest
from geodis.parser.prompt import DEFAULT_TEMPLATE, PromptTemplate, build_prompt
from geodis.parser.tree import EmptyParse, LocationTree, ParseError, SchemaViolation, validate_tree
from geodis.retry import ExponentialBackoff, TransientError
from geodis.textnorm import EmptyResult, normalize

log = logging.getLogger(__name__)


class ProviderExhausted(ParseError):
    """The provider kept failing transiently through every retry."""


class MalformedOutput(ParseError):
    """No valid tree could be extracted from the provider's answers."""


class ProviderError(ParseError):
    """Non-retryable provider failure (bad credentials, bad request)."""


class Provider(Protocol):
    name: str

    def complete(self, prompt: str) -> str: ...


class ChatCompletionsProvider:
    """Chat-completions style JSON-over-HTTP transport.

    The API key is sent in the Authorization header only; it never enters
    the cache key, the logs or ``repr``.
    """

    def __init__(self, url: str, model: str, api_key: str | None = None,
                 timeout: float = 60.0, max_in_flight: int = 4):
        self.url = url
        self.model = model
        self._api_key = api_key
        self.timeout = timeout
        self.name = f"chat:{model}"
        self._local = threading.local()
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def __repr__(self) -> str:
        return f"ChatCompletionsProvider(url={self.url!r}, model={self.model!r})"

    def _session(self) -> requests.Session:
        s = getattr(self._local, "session", None)
        if s is None:
            s = self._local.session = requests.Session()
        return s

    def complete(self, prompt: str) -> str:
        body = {
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
            "response_format": {"type": "json_object"},
        }
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        with self._slots:
            try:
                resp = self._session().post(self.url, json=body, headers=headers,
                                            timeout=self.timeout)
            except (requests.Timeout, requests.ConnectionError) as exc:
                raise TransientError(f"provider unreachable: {type(exc).__name__}") from None
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientError(f"provider HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise ProviderError(f"provider HTTP {resp.status_code}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            raise MalformedOutput("unexpected provider response shape") from None


def brace_spans(text: str) -> Iterator[str]:
    """Yield balanced ``{...}`` substrings in order of their opening brace.

    String literals are respected so braces inside quoted names don't count.
    """
    n = len(text)
    for start in range(n):
        if text[start] != "{":
            continue
        depth = 0
        in_str = False
        esc = False
        for i in range(start, n):
            ch = text[i]
            if in_str:
                if esc:
                    esc = False
                elif ch == "\\":
                    esc = True
                elif ch == '"':
                    in_str = False
            elif ch == '"':
                in_str = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    yield text[start:i + 1]
                    break


def extract_tree(text: str) -> LocationTree:
    """First brace span in ``text`` that decodes and validates as a tree."""
    first_error: Exception | None = None
    for span in brace_spans(text):
        try:
            return validate_tree(json.loads(span))
        except (json.JSONDecodeError, SchemaViolation) as exc:
            first_error = first_error or exc
    raise MalformedOutput(f"no valid location JSON in output ({first_error})")


def cache_key(location: str, country: str, template: PromptTemplate, provider_name: str) -> str:
    try:
        loc = normalize(location, strip=False)
    except EmptyResult:
        loc = location.strip()
    return digest("parse", loc, country.strip().casefold(), template.version, provider_name)


def parse_with_provider(
    location: str,
    country: str,
    provider: Provider,
    cache,
    retry_policy: ExponentialBackoff = ExponentialBackoff(),
    template: PromptTemplate = DEFAULT_TEMPLATE,
    *,
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
) -> LocationTree:
    """Parse ``location`` with an LLM, serving repeats from ``cache``.

    Transient provider failures and unusable answers are both retried, up to
    ``retry_policy.retries`` times.

    Raises:
        ProviderExhausted: transient failures on every attempt.
        MalformedOutput: the last attempt answered but without a valid tree.
        EmptyParse: a valid tree with no locations.
    """
    key = cache_key(location, country, template, provider.name)
    hit = cache.get(key)
    if hit is not None:
        return validate_tree(hit)

    prompt = build_prompt(template, location, country)
    rng = rng or random.Random()
    last: Exception | None = None
    tree = None
    for attempt in range(retry_policy.retries + 1):
        try:
            tree = extract_tree(provider.complete(prompt))
            break
        except (TransientError, MalformedOutput) as exc:
            last = exc
            if attempt < retry_policy.retries:
                wait = retry_policy.delay(attempt, rng)
                log.debug("parse attempt %d failed (%s), sleeping %.2fs", attempt + 1, exc, wait)
                sleep(wait)
    if tree is None:
        if isinstance(last, MalformedOutput):
            raise last
        raise ProviderExhausted(f"provider failed {retry_policy.retries + 1} times: {last}")
    if not tree.locations():
        raise EmptyParse(f"no locations in parse of {location!r}")
    cache.put(key, tree.to_json())
    return tree

