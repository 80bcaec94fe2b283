"""Cross-source agreement scoring and harmonization onto GADM units."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from shapely.geometry import Point
from shapely.geometry.base import BaseGeometry

from geodis import geometry as geo
from geodis.candidates import CandidateGeometry, CandidateSet, Source
from geodis.gadm.index import GadmIndex, GadmUnit

DEFAULT_TAU = 0.5
_TIE_RTOL = 1e-9  # areas this close count as tied (projection round-off)


class Check(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NA = "n/a"


class Reliability(enum.IntEnum):
    NoMatch = 0
    SingleSource = 1
    TwoAvailable = 2
    HighAgreement = 3
    FullAgreement = 4


LABELS = {r.value: r.name for r in Reliability}


@dataclass(frozen=True)
class ReliabilityScore:
    value: int
    label: str
    checks: dict = field(default_factory=dict, compare=False)

    @classmethod
    def of(cls, value: int, checks: dict | None = None) -> ReliabilityScore:
        return cls(value, Reliability(value).name, dict(checks or {}))


class NoCandidates(ValueError):
    pass


@dataclass(frozen=True)
class GeocodedLocation:
    query_name: str
    admin_level: int
    geometry: BaseGeometry
    source_mask: frozenset
    reliability: ReliabilityScore
    gadm_gid: str | None = None
    gadm_name: str | None = None
    proxy_used: Source | None = None


def _gadm_osm_check(g: BaseGeometry, o: BaseGeometry, tau: float) -> Check:
    if isinstance(o, Point):
        return Check.PASS if geo.contains_point(g, o) else Check.FAIL
    inter = geo.intersection_area(g, o)
    denom = min(geo.area(g), geo.area(o))
    if denom <= 0.0:
        return Check.FAIL
    return Check.PASS if inter / denom >= tau else Check.FAIL


def _contains_check(poly: BaseGeometry, pt: BaseGeometry) -> Check:
    if not geo.is_polygonal(poly):
        return Check.NA
    if not isinstance(pt, Point):
        pt = geo.representative_point(pt)
    return Check.PASS if geo.contains_point(poly, pt) else Check.FAIL


def agreement_checks(cands: CandidateSet, tau: float = DEFAULT_TAU) -> dict[str, Check]:
    """The three pairwise checks; NA where an operand is missing or not a polygon."""
    g = cands.gadm.geometry if cands.gadm else None
    o = cands.osm.geometry if cands.osm else None
    w = cands.wikidata.geometry if cands.wikidata else None
    return {
        "gadm_osm": _gadm_osm_check(g, o, tau) if g is not None and o is not None else Check.NA,
        "wiki_in_gadm": _contains_check(g, w) if g is not None and w is not None else Check.NA,
        "wiki_in_osm": _contains_check(o, w) if o is not None and w is not None else Check.NA,
    }


def score_from_checks(n_sources: int, checks: dict[str, Check]) -> int:
    passed = sum(1 for c in checks.values() if c is Check.PASS)
    if n_sources <= 0:
        return 0
    if n_sources == 1:
        return 1
    if n_sources == 2:
        return 3 if passed >= 1 else 2
    if passed == 3:
        return 4
    return 3 if passed >= 1 else 2


def score_consistency(cands: CandidateSet, tau: float = DEFAULT_TAU) -> ReliabilityScore:
    """Reliability 0-4 from source presence and pairwise spatial agreement.

    GADM/OSM agree when their overlap covers at least ``tau`` of the smaller
    polygon (or the OSM point falls in the GADM unit); Wikidata agrees with a
    polygon source when its point lies inside it.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    checks = agreement_checks(cands, tau)
    return ReliabilityScore.of(score_from_checks(len(cands), checks), checks)


def best_overlap_unit(proxy: BaseGeometry, index: GadmIndex, iso3: str, level: int) -> GadmUnit | None:
    """GADM unit at ``level`` with the largest overlap with ``proxy``.

    Polygons: largest intersection area, then largest share of the unit
    covered, then smallest gid. Points: the containing unit (smallest gid if
    the point sits on a shared border).
    """
    tree, units = index.spatial(iso3, level)
    if not units:
        return None
    hits = [units[i] for i in tree.query(proxy)]
    if isinstance(proxy, Point):
        inside = [u for u in hits if geo.contains_point(u.geometry, proxy)]
        return min(inside, key=lambda u: u.gid) if inside else None
    scored = []
    for u in hits:
        inter = geo.intersection_area(proxy, u.geometry)
        if inter > 0.0:
            scored.append((inter, geo.overlap_ratio(u.geometry, proxy), u))
    if not scored:
        return None
    for k in (0, 1):
        top = max(t[k] for t in scored)
        scored = [t for t in scored if t[k] >= top * (1 - _TIE_RTOL)]
    return min(scored, key=lambda t: t[2].gid)[2]


def reproject_to_gadm(
    cands: CandidateSet,
    query_name: str,
    level: int,
    iso3: str,
    index: GadmIndex,
    reliability: ReliabilityScore | None = None,
) -> GeocodedLocation:
    """Express a location as a GADM unit.

    A GADM candidate is taken as is. Otherwise the Wikidata candidate (or,
    failing that, OSM) is used as a proxy and mapped to the overlapping unit
    at the entry's own level. With no overlap the proxy geometry is kept and
    ``gadm_gid`` stays None.

    Raises:
        NoCandidates: every source came back empty.
    """
    present = cands.present()
    if not present:
        raise NoCandidates(query_name)
    if reliability is None:
        reliability = score_consistency(cands)
    mask = frozenset(present)
    if cands.gadm is not None:
        unit = index.get(cands.gadm.external_id)
        geom = unit.geometry if unit is not None else cands.gadm.geometry
        name = unit.name if unit is not None else cands.gadm.matched_name
        lvl = unit.level if unit is not None else level
        return GeocodedLocation(query_name, lvl, geom, mask, reliability,
                                cands.gadm.external_id, name, None)
    proxy: CandidateGeometry = cands.wikidata or cands.osm
    unit = best_overlap_unit(proxy.geometry, index, iso3, level)
    if unit is None:
        return GeocodedLocation(query_name, level, proxy.geometry, mask, reliability,
                                None, None, proxy.source)
    return GeocodedLocation(query_name, unit.level, unit.geometry, mask, reliability,
                            unit.gid, unit.name, proxy.source)


def gadm_candidate(unit: GadmUnit, score: float, context=()) -> CandidateGeometry:
    return CandidateGeometry(Source.GADM, unit.name, unit.geometry, unit.gid, score, tuple(context))
