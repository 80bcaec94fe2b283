"""Record-level orchestration: parse, triple geocode, score, harmonize."""
from __future__ import annotations

import logging
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from shapely.geometry.base import BaseGeometry

from geodis.cache import JsonCache
from geodis.candidates import CandidateGeometry, CandidateSet
from geodis.config import FatalConfig, PipelineConfig
from geodis.gadm.countries import CountryTable, UnknownCountry
from geodis.gadm.index import GadmError, GadmIndex, load_gadm
from geodis.gadm.matching import match_tree
from geodis.harmonize import GeocodedLocation, gadm_candidate, reproject_to_gadm, score_consistency
from geodis.parser import (
    ChatCompletionsProvider,
    DEFAULT_TEMPLATE,
    EmptyParse,
    LocationTree,
    ParseError,
    Provider,
    load_template,
    parse_fallback,
    parse_with_provider,
)
from geodis.records import DisasterRecord
from geodis.remote import NominatimClient, RemoteError, WikidataClient, geocode_osm, geocode_wikidata
from geodis.retry import ExponentialBackoff, UniformJitter
from geodis.textnorm import DESCRIPTORS

log = logging.getLogger(__name__)


@dataclass
class GeocodedEvent:
    dis_no: str
    locations: list[GeocodedLocation] = field(default_factory=list)
    coverage_flag: bool = False
    diagnostics: list[str] = field(default_factory=list)


class _Once:
    """Compute each key at most once, even when many threads ask together."""

    def __init__(self):
        self._lock = threading.Lock()
        self._locks: dict[Hashable, threading.Lock] = {}
        self._done: dict[Hashable, tuple[bool, object]] = {}

    def __call__(self, key: Hashable, fn: Callable[[], object]):
        with self._lock:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._done:
                try:
                    self._done[key] = (True, fn())
                except Exception as exc:  # noqa: BLE001 - replayed to every caller
                    self._done[key] = (False, exc)
        ok, value = self._done[key]
        if ok:
            return value
        raise value


class Geocoder:
    """Shared state for one run: index, clients, caches and limiters."""

    def __init__(
        self,
        config: PipelineConfig,
        index: GadmIndex,
        *,
        provider: Provider | None = None,
        countries: CountryTable | None = None,
        nominatim: NominatimClient | None = None,
        wikidata: WikidataClient | None = None,
    ):
        self.config = config
        self.index = index
        self.countries = countries or CountryTable.default(config.country_aliases)
        cache_root = config.cache_dir
        self.parse_cache = JsonCache(cache_root, "parse")
        rng = random.Random(config.seed)
        self.template = load_template(config.prompt_path) if config.prompt_path else DEFAULT_TEMPLATE
        if provider is None and config.provider_url and not config.offline:
            provider = ChatCompletionsProvider(config.provider_url, config.provider_model,
                                               config.api_key, config.request_timeout,
                                               config.max_in_flight)
        self.provider = provider
        self.parse_policy = ExponentialBackoff(config.parse_retries, config.parse_backoff_base,
                                               config.parse_backoff_cap)
        remote_policy = UniformJitter(config.remote_retries, config.jitter_low, config.jitter_high)
        common = dict(retry_policy=remote_policy, offline=config.offline,
                      timeout=config.request_timeout, rng=rng)
        if config.user_agent:
            common["user_agent"] = config.user_agent
        self.nominatim = nominatim or NominatimClient(
            config.nominatim_url, limit=config.nominatim_limit,
            min_interval=config.nominatim_interval,
            cache=JsonCache(cache_root, "nominatim"), **common)
        self.wikidata = wikidata or WikidataClient(
            config.wikidata_url, limit=config.wikidata_limit,
            min_interval=config.wikidata_interval,
            cache=JsonCache(cache_root, "wikidata"), **common)
        self._parse_once = _Once()
        self._osm_once = _Once()
        self._wiki_once = _Once()

    # -- stages -----------------------------------------------------------

    def parse(self, rec: DisasterRecord, diags: list[str]) -> LocationTree:
        def run() -> tuple[LocationTree, str | None]:
            if self.provider is None:
                return parse_fallback(rec.location_raw, rec.country), None
            try:
                return parse_with_provider(rec.location_raw, rec.country, self.provider,
                                           self.parse_cache, self.parse_policy, self.template), None
            except EmptyParse:
                raise
            except ParseError as exc:
                note = f"provider parse failed ({type(exc).__name__}: {exc}); used fallback parser"
                return parse_fallback(rec.location_raw, rec.country), note

        tree, note = self._parse_once((rec.location_raw, rec.country), run)
        if note:
            diags.append(note)
        return tree

    def osm(self, name: str, parents: Sequence[str], country: str) -> CandidateGeometry | None:
        key = (name, tuple(parents), country)
        return self._osm_once(key, lambda: geocode_osm(name, parents, country, self.nominatim))

    def wiki(self, name: str, country: str, parent: BaseGeometry | None) -> CandidateGeometry | None:
        key = (name, country, parent.wkb if parent is not None else None)
        return self._wiki_once(key, lambda: geocode_wikidata(name, country, parent, self.wikidata,
                                                             self.countries))

    def geocode(self, rec: DisasterRecord) -> GeocodedEvent:
        event = GeocodedEvent(rec.dis_no)
        diags = event.diagnostics
        try:
            tree = self.parse(rec, diags)
        except ParseError as exc:
            diags.append(f"parse failed: {type(exc).__name__}: {exc}")
            return event

        try:
            iso3 = self.countries.resolve(rec.country)
        except UnknownCountry:
            iso3 = None
            diags.append(f"unknown country {rec.country!r}; GADM matching skipped")
        matched = {}
        if iso3 is not None and self.index.has_country(iso3):
            for em in match_tree(tree, iso3, self.index, self.config.fuzzy_threshold, self.countries):
                matched[id(em.entry)] = em.match
        elif iso3 is not None:
            diags.append(f"country {iso3} not in GADM index; GADM matching skipped")

        for entry in tree.locations():
            parents = entry.context_names()
            m = matched.get(id(entry))
            gadm = gadm_candidate(m.unit, m.score, parents) if m else None
            parent_geom = None
            for anc in entry.ancestors():
                am = matched.get(id(anc))
                if am is not None:
                    parent_geom = am.unit.geometry
                    break
            osm = wiki = None
            try:
                osm = self.osm(entry.name, parents, rec.country)
            except RemoteError as exc:
                diags.append(f"{entry.name}: OSM {type(exc).__name__}: {exc}")
            try:
                wiki = self.wiki(entry.name, rec.country, parent_geom)
            except RemoteError as exc:
                diags.append(f"{entry.name}: Wikidata {type(exc).__name__}: {exc}")
            cands = CandidateSet(gadm, osm, wiki)
            if not cands.present():
                diags.append(f"{entry.name}: no candidate from any source")
                continue
            score = score_consistency(cands, self.config.tau)
            event.locations.append(
                reproject_to_gadm(cands, entry.name, entry.level, iso3 or "", self.index, score))
        event.coverage_flag = bool(event.locations)
        return event


def build_index(config: PipelineConfig, countries: CountryTable | None = None) -> GadmIndex:
    """Load GADM for the configured countries.

    Raises:
        FatalConfig: the GADM data cannot be loaded.
    """
    countries = countries or CountryTable.default(config.country_aliases)
    descriptors = config.descriptors if config.descriptors is not None else DESCRIPTORS
    try:
        index = load_gadm(config.gadm_path, config.countries or None,
                          country_table=countries, descriptors=descriptors)
    except (GadmError, UnknownCountry, OSError) as exc:
        raise FatalConfig(f"cannot load GADM from {config.gadm_path}: {exc}") from None
    return index


def run_pipeline(
    records: Sequence[DisasterRecord],
    config: PipelineConfig,
    *,
    index: GadmIndex | None = None,
    geocoder: Geocoder | None = None,
) -> list[GeocodedEvent]:
    """Geocode ``records`` concurrently; results keep the input order.

    Per-record failures end up in ``GeocodedEvent.diagnostics`` and never
    stop the batch.

    Raises:
        FatalConfig: invalid configuration or unloadable GADM data.
    """
    if geocoder is None:
        config.validate(need_gadm=index is None)
        index = index if index is not None else build_index(config)
        geocoder = Geocoder(config, index)

    def one(rec: DisasterRecord) -> GeocodedEvent:
        try:
            event = geocoder.geocode(rec)
        except Exception as exc:  # noqa: BLE001 - a bad record must not sink the batch
            log.exception("%s: unexpected failure", rec.dis_no)
            event = GeocodedEvent(rec.dis_no, diagnostics=[f"internal error: {exc!r}"])
        for d in event.diagnostics:
            log.info("%s: %s", rec.dis_no, d)
        return event

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(one, records))
