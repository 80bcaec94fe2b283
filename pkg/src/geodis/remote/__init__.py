"""Remote geocoders: OSM/Nominatim and Wikidata/SPARQL."""
from geodis.remote.http import (
    JsonHttpClient,
    MalformedResponse,
    OfflineMiss,
    RemoteError,
    ServiceExhausted,
)
from geodis.remote.nominatim import (
    NominatimClient,
    NominatimQuery,
    build_nominatim_query,
    geocode_osm,
    select_osm_result,
)
from geodis.remote.wikidata import (
    WikidataClient,
    build_sparql,
    geocode_wikidata,
    parse_bindings,
    rank_entities,
)

__all__ = [
    "JsonHttpClient", "MalformedResponse", "NominatimClient", "NominatimQuery",
    "OfflineMiss", "RemoteError", "ServiceExhausted", "WikidataClient",
    "build_nominatim_query", "build_sparql", "geocode_osm", "geocode_wikidata",
    "parse_bindings", "rank_entities", "select_osm_result",
]
