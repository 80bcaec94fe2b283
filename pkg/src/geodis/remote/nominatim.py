"""OSM geocoding through a Nominatim-compatible search endpoint."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from shapely.geometry import Point

from geodis import geometry as geo
from geodis.candidates import CandidateGeometry, Source
from geodis.remote.http import USER_AGENT, JsonHttpClient, MalformedResponse
from geodis.textnorm import strip_parentheticals

log = logging.getLogger(__name__)

NOMINATIM_URL = "https://nominatim.openstreetmap.org/search"


@dataclass(frozen=True)
class NominatimQuery:
    q: str
    params: dict = field(default_factory=dict)
    headers: dict = field(default_factory=dict)
    context: tuple[str, ...] = ()

    @property
    def user_agent(self) -> str:
        return self.headers["User-Agent"]


def build_nominatim_query(
    name: str,
    parents: Sequence[str],
    country: str,
    limit: int = 5,
    user_agent: str = USER_AGENT,
) -> NominatimQuery:
    """Free-form query "name, parent_1, ..., country" plus output options."""
    if not name or not name.strip():
        raise ValueError("name must be non-empty")
    country_text = strip_parentheticals(country)[0] if country else ""
    parts = [name.strip(), *(p.strip() for p in parents if p and p.strip())]
    if country_text:
        parts.append(country_text)
    q = ", ".join(parts)
    params = {
        "q": q,
        "format": "jsonv2",
        "polygon_geojson": 1,
        "limit": int(limit),
        "addressdetails": 0,
    }
    return NominatimQuery(q, params, {"User-Agent": user_agent}, tuple(parts[1:]))


def _result_geometry(item: dict):
    gj = item.get("geojson")
    if isinstance(gj, dict) and gj.get("type") in ("Polygon", "MultiPolygon", "Point"):
        try:
            return geo.from_geojson(gj)
        except (geo.TopologyError, ValueError, TypeError, KeyError, geo.KindError) as exc:
            log.debug("unusable OSM geometry for %s: %s", item.get("osm_id"), exc)
    try:
        return Point(float(item["lon"]), float(item["lat"]))
    except (KeyError, TypeError, ValueError):
        return None


def _candidate(item: dict, geom, rank: int, query: NominatimQuery) -> CandidateGeometry:
    osm_id = f"{item.get('osm_type', '?')}/{item.get('osm_id', '?')}"
    name = item.get("display_name") or item.get("name") or query.q
    return CandidateGeometry(Source.OSM, str(name), geom, osm_id, float(rank), query.context)


def select_osm_result(results, query: NominatimQuery) -> CandidateGeometry | None:
    """First result with a polygon, else the top point result."""
    if not isinstance(results, list):
        raise MalformedResponse("Nominatim response is not a list")
    first_point = None
    for rank, item in enumerate(results):
        if not isinstance(item, dict):
            raise MalformedResponse("Nominatim result is not an object")
        geom = _result_geometry(item)
        if geom is None:
            continue
        if geo.is_polygonal(geom) and not geom.is_empty:
            return _candidate(item, geom, rank, query)
        if first_point is None and isinstance(geom, Point):
            first_point = (item, geom, rank)
    if first_point is None:
        return None
    item, geom, rank = first_point
    if not isinstance(geom, Point):
        geom = geo.representative_point(geom)
    return _candidate(item, geom, rank, query)


class NominatimClient(JsonHttpClient):
    def __init__(self, base_url: str = NOMINATIM_URL, *, limit: int = 5, **kw):
        kw.setdefault("min_interval", 1.0)
        super().__init__(base_url, **kw)
        self.limit = limit


def geocode_osm(
    name: str,
    parents: Sequence[str],
    country: str,
    client: NominatimClient,
) -> CandidateGeometry | None:
    """OSM candidate for one location, None when the search finds nothing.

    Raises:
        ServiceExhausted: transient failures through every retry.
        MalformedResponse: unreadable response.
        OfflineMiss: offline mode without a cached response.
    """
    query = build_nominatim_query(name, parents, country, client.limit, client.user_agent)
    results = client.get_json(query.params, query.headers)
    return select_osm_result(results, query)
