"""Wikidata entity lookup over SPARQL, ranked by country and proximity."""
from __future__ import annotations

import re
from dataclasses import dataclass

from shapely.geometry import Point
from shapely.geometry.base import BaseGeometry

from geodis import geometry as geo
from geodis.candidates import CandidateGeometry, Source
from geodis.gadm.countries import DEFAULT_COUNTRIES, CountryTable
from geodis.remote.http import JsonHttpClient, MalformedResponse

WIKIDATA_SPARQL_URL = "https://query.wikidata.org/sparql"

_WKT_POINT = re.compile(
    r"^\s*(?:<http://www\.wikidata\.org/entity/Q2>\s*)?POINT\s*\(\s*([-+0-9.eE]+)\s+([-+0-9.eE]+)\s*\)\s*$", re.IGNORECASE)


def sparql_literal(text: str) -> str:
    escaped = (text.replace("\\", "\\\\").replace('"', '\\"')
               .replace("\n", "\\n").replace("\r", "\\r"))
    return f'"{escaped}"'


def _case_variants(name: str) -> list[str]:
    out: list[str] = []
    for v in (name, name.lower(), name.title(), name.upper(),
              name[:1].upper() + name[1:]):
        if v not in out:
            out.append(v)
    return out


def build_sparql(name: str, country: str = "", limit: int = 10) -> str:
    """SPARQL selecting entities labelled or aliased ``name``.

    Exact-literal matching over a handful of case variants, English-tagged
    and untagged, keeps the query index-friendly; FILTER-based
    case-insensitive matching times out on the public endpoint. The country
    is applied client-side on the returned labels.
    """
    if not name or not name.strip():
        raise ValueError("name must be non-empty")
    values = " ".join(f"{sparql_literal(v)}@en {sparql_literal(v)}"
                      for v in _case_variants(name.strip()))
    return (
        "SELECT ?item ?coord ?countryLabel WHERE {\n"
        f"  VALUES ?label {{ {values} }}\n"
        "  { ?item rdfs:label ?label } UNION { ?item skos:altLabel ?label }\n"
        "  ?item wdt:P625 ?coord .\n"
        "  OPTIONAL { ?item wdt:P17 ?country .\n"
        "             ?country rdfs:label ?countryLabel .\n"
        "             FILTER(LANG(?countryLabel) = \"en\") }\n"
        "}\n"
        f"LIMIT {int(limit)}"
    )


@dataclass
class WikidataEntity:
    qid: str
    point: Point
    countries: list[str]
    order: int


def parse_bindings(body) -> list[WikidataEntity]:
    """Group SPARQL JSON rows by entity, keeping first-seen order."""
    try:
        rows = body["results"]["bindings"]
    except (TypeError, KeyError):
        raise MalformedResponse("SPARQL response lacks results.bindings") from None
    entities: dict[str, WikidataEntity] = {}
    for row in rows:
        try:
            uri = row["item"]["value"]
            wkt = row["coord"]["value"]
        except (KeyError, TypeError):
            raise MalformedResponse("SPARQL row lacks item or coord") from None
        qid = uri.rsplit("/", 1)[-1]
        country = row.get("countryLabel", {}).get("value")
        ent = entities.get(qid)
        if ent is None:
            m = _WKT_POINT.match(wkt)
            if not m:
                continue  # coordinates on another globe, or not a point
            lon, lat = float(m.group(1)), float(m.group(2))
            if not (-180 <= lon <= 180 and -90 <= lat <= 90):
                continue
            ent = entities[qid] = WikidataEntity(qid, Point(lon, lat), [], len(entities))
        if country and country not in ent.countries:
            ent.countries.append(country)
    return list(entities.values())


def rank_entities(
    entities: list[WikidataEntity],
    country: str,
    parent_geometry: BaseGeometry | None = None,
    countries: CountryTable = DEFAULT_COUNTRIES,
) -> list[WikidataEntity]:
    """Country-consistent entities, best first.

    With a parent geometry, entities inside a polygonal parent come first and
    each group is ordered by distance to the parent's representative point.
    Without one, service order is kept.
    """
    kept = [e for e in entities if any(countries.same_country(c, country) for c in e.countries)]
    if parent_geometry is None or parent_geometry.is_empty:
        return kept
    anchor = geo.representative_point(parent_geometry)
    polygonal = geo.is_polygonal(parent_geometry)

    def key(e: WikidataEntity):
        inside = polygonal and geo.contains_point(parent_geometry, e.point)
        return (0 if inside else 1, geo.geodesic_distance(e.point, anchor), e.order)

    return sorted(kept, key=key)


class WikidataClient(JsonHttpClient):
    def __init__(self, base_url: str = WIKIDATA_SPARQL_URL, *, limit: int = 10, **kw):
        kw.setdefault("min_interval", 0.5)
        super().__init__(base_url, **kw)
        self.limit = limit


def geocode_wikidata(
    name: str,
    country: str,
    parent_geometry: BaseGeometry | None,
    client: WikidataClient,
    countries: CountryTable = DEFAULT_COUNTRIES,
) -> CandidateGeometry | None:
    """Wikidata point candidate for one location, None if nothing fits the country."""
    query = build_sparql(name, country, client.limit)
    body = client.get_json({"query": query, "format": "json"},
                           {"Accept": "application/sparql-results+json"})
    ranked = rank_entities(parse_bindings(body), country, parent_geometry, countries)
    if not ranked:
        return None
    best = ranked[0]
    dist = 0.0
    if parent_geometry is not None and not parent_geometry.is_empty:
        dist = geo.geodesic_distance(best.point, geo.representative_point(parent_geometry))
    return CandidateGeometry(Source.WIKIDATA, name, best.point, best.qid, dist, (country,))
