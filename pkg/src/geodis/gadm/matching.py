"""Hierarchical fuzzy matching of parsed entries to GADM units."""
from __future__ import annotations

from dataclasses import dataclass

from geodis import fuzz
from geodis.gadm.countries import DEFAULT_COUNTRIES, CountryTable, UnknownCountry
from geodis.gadm.index import GadmIndex, GadmUnit, Pool
from geodis.parser.tree import AdminEntry, LocationTree
from geodis.textnorm import EmptyResult

DEFAULT_THRESHOLD = 85.0


@dataclass(frozen=True)
class UnitMatch:
    unit: GadmUnit
    score: float
    query_name: str


@dataclass(frozen=True)
class EntryMatch:
    entry: AdminEntry
    match: UnitMatch | None


def _best_in_pool(query: str, pool: Pool, threshold: float) -> UnitMatch | None:
    exact = pool.exact.get(query)
    if exact:
        return UnitMatch(min(exact, key=lambda u: u.gid), 100.0, query)
    if not pool.names:
        return None
    scores = fuzz.score_all(query, pool.names)
    best: dict[str, tuple[float, int, GadmUnit]] = {}
    for name, unit, score in zip(pool.names, pool.units, scores):
        if score < threshold:
            continue
        dist = fuzz.indel_distance(query, name)
        cur = best.get(unit.gid)
        if cur is None or (score, -dist) > (cur[0], -cur[1]):
            best[unit.gid] = (score, dist, unit)
    if not best:
        return None
    score, _, unit = min(best.values(), key=lambda t: (-t[0], t[1], t[2].gid))
    return UnitMatch(unit, score, query)


def match_unit(
    name: str,
    level: int,
    parent: GadmUnit | None,
    index: GadmIndex,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    country: str | None = None,
) -> UnitMatch | None:
    """Best unit at ``level`` for ``name``, or None below ``threshold``.

    With ``parent`` the pool is restricted to its descendants at ``level``;
    otherwise ``country`` (an ISO3 code) selects the pool. An exact normalized
    name (or alias) always wins with score 100. Ties go to the smaller edit
    distance, then to the smaller gid.
    """
    try:
        query = index.key(name)
    except EmptyResult:
        return None
    if parent is not None:
        pool = index.pool(parent.country_iso3, level, parent)
    elif country is not None:
        pool = index.pool(country, level)
    else:
        raise ValueError("match_unit needs a parent or a country")
    return _best_in_pool(query, pool, threshold)


def match_tree(
    tree: LocationTree,
    country: str,
    index: GadmIndex,
    threshold: float = DEFAULT_THRESHOLD,
    countries: CountryTable = DEFAULT_COUNTRIES,
) -> list[EntryMatch]:
    """Match every tree entry, coarse levels first.

    A child is searched among the descendants of its nearest matched
    ancestor, or the whole country when no ancestor matched. Unmatched
    entries stay in the result with ``match=None``.

    Raises:
        UnknownCountry: ``country`` is not known or not in the index.
    """
    iso3 = countries.resolve(country)
    if not index.has_country(iso3):
        raise UnknownCountry(country)
    resolved: dict[int, UnitMatch | None] = {}
    out: list[EntryMatch] = []
    for entry in tree.walk():
        anchor = None
        for ancestor in entry.ancestors():
            m = resolved.get(id(ancestor))
            if m is not None:
                anchor = m.unit
                break
        if anchor is not None and anchor.level >= entry.level:
            anchor = None
        m = match_unit(entry.name, entry.level, anchor, index, threshold, country=iso3)
        resolved[id(entry)] = m
        out.append(EntryMatch(entry, m))
    return out
