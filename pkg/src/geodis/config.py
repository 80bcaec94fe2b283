"""Pipeline configuration, read from a single TOML file."""
from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from geodis.remote.nominatim import NOMINATIM_URL
from geodis.remote.wikidata import WIKIDATA_SPARQL_URL


class FatalConfig(Exception):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    gadm_path: Path | None = None
    cache_dir: Path = Path(".geodis-cache")
    # parsing
    provider_url: str | None = None
    provider_model: str = "gpt-4o"
    api_key_env: str = "GEODIS_API_KEY"
    prompt_path: Path | None = None
    max_in_flight: int = 4
    parse_retries: int = 5
    parse_backoff_base: float = 1.0
    parse_backoff_cap: float = 32.0
    # remote backends
    nominatim_url: str = NOMINATIM_URL
    wikidata_url: str = WIKIDATA_SPARQL_URL
    nominatim_interval: float = 1.0
    wikidata_interval: float = 0.5
    remote_retries: int = 4
    jitter_low: float = 0.5
    jitter_high: float = 2.0
    nominatim_limit: int = 5
    wikidata_limit: int = 10
    request_timeout: float = 30.0
    user_agent: str | None = None
    # scoring
    fuzzy_threshold: float = 85.0
    tau: float = 0.5
    # run
    workers: int = 4
    offline: bool = False
    countries: tuple[str, ...] = ()
    country_aliases: Path | None = None
    descriptors: tuple[str, ...] | None = None
    seed: int | None = None

    @property
    def api_key(self) -> str | None:
        """Read at use time so the key never sits in the config object or its repr."""
        return os.environ.get(self.api_key_env) if self.api_key_env else None

    def validate(self, need_gadm: bool = True) -> PipelineConfig:
        """Check ranges and paths.

        Raises:
            FatalConfig: with a message naming the offending setting.
        """
        if not 0.0 <= self.fuzzy_threshold <= 100.0:
            raise FatalConfig(f"fuzzy_threshold must be in [0, 100], got {self.fuzzy_threshold}")
        if not 0.0 < self.tau <= 1.0:
            raise FatalConfig(f"tau must be in (0, 1], got {self.tau}")
        for name in ("nominatim_interval", "wikidata_interval", "parse_backoff_base",
                     "request_timeout"):
            if getattr(self, name) < 0:
                raise FatalConfig(f"{name} must be non-negative")
        for name in ("parse_retries", "remote_retries"):
            if getattr(self, name) < 0:
                raise FatalConfig(f"{name} must be non-negative")
        if self.workers < 1 or self.max_in_flight < 1:
            raise FatalConfig("workers and max_in_flight must be at least 1")
        if not 0 <= self.jitter_low <= self.jitter_high:
            raise FatalConfig("jitter bounds must satisfy 0 <= jitter_low <= jitter_high")
        if need_gadm:
            if self.gadm_path is None:
                raise FatalConfig("gadm_path is not set")
            if not self.gadm_path.exists():
                raise FatalConfig(f"gadm_path {self.gadm_path} does not exist")
        for name in ("prompt_path", "country_aliases"):
            p = getattr(self, name)
            if p is not None and not p.exists():
                raise FatalConfig(f"{name} {p} does not exist")
        return self


_PATHS = {"gadm_path", "cache_dir", "prompt_path", "country_aliases"}
_TUPLES = {"countries", "descriptors"}
_SECTIONS = ("paths", "parser", "remote", "scoring", "run")


def _coerce(values: dict, base: Path) -> dict:
    known = {f.name for f in fields(PipelineConfig)}
    out = {}
    for key, value in values.items():
        if key not in known:
            raise FatalConfig(f"unknown config key {key!r}")
        if key in _PATHS and value is not None:
            p = Path(value).expanduser()
            value = p if p.is_absolute() else base / p
        elif key in _TUPLES and value is not None:
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise FatalConfig(f"{key} must be a list of strings")
            value = tuple(value)
        out[key] = value
    return out


def load_config(path: str | Path | None = None, **overrides) -> PipelineConfig:
    """Defaults, then the TOML file, then non-None ``overrides``.

    Keys may sit at top level or inside ``[paths]``, ``[parser]``,
    ``[remote]``, ``[scoring]`` and ``[run]`` tables. Relative paths resolve
    against the config file's directory.
    """
    values: dict = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        try:
            raw = tomllib.loads(path.read_text("utf-8"))
        except OSError as exc:
            raise FatalConfig(f"cannot read config {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise FatalConfig(f"invalid TOML in {path}: {exc}") from None
        base = path.resolve().parent
        for key, value in raw.items():
            if key in _SECTIONS and isinstance(value, dict):
                values.update(value)
            else:
                values[key] = value
    cfg = PipelineConfig(**_coerce(values, base))
    extra = {k: v for k, v in overrides.items() if v is not None}
    if extra:
        cfg = replace(cfg, **_coerce(extra, Path.cwd()))
    return cfg
