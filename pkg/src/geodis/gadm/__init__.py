"""Local GADM backend: loading, indexing and hierarchical fuzzy matching."""
from geodis.gadm.countries import DEFAULT_COUNTRIES, CountryTable, UnknownCountry
from geodis.gadm.index import (
    EmptyCountry,
    GadmError,
    GadmIndex,
    GadmUnit,
    MissingLayer,
    SchemaMismatch,
    load_gadm,
)
from geodis.gadm.matching import DEFAULT_THRESHOLD, EntryMatch, UnitMatch, match_tree, match_unit
from geodis.fuzz import wratio

__all__ = [
    "CountryTable", "DEFAULT_COUNTRIES", "DEFAULT_THRESHOLD", "EmptyCountry", "EntryMatch",
    "GadmError", "GadmIndex", "GadmUnit", "MissingLayer", "SchemaMismatch", "UnitMatch",
    "UnknownCountry", "load_gadm", "match_tree", "match_unit", "wratio",
]
