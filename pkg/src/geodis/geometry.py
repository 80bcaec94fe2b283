"""Geometry kernel on WGS84 points and (multi)polygons.

Geometries are shapely objects in lon/lat degrees. Areas are evaluated in a
cylindrical equal-area frame (standard parallel 0) on the authalic sphere;
overlap ratios and Jaccard indices are computed entirely in that frame so
that ``overlap_ratio(a, b) * area(a) == overlap_ratio(b, a) * area(b)``.
Pass ``planar=True`` to skip projection and work in raw coordinate units.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import (
    GeometryCollection,
    MultiPolygon,
    Point,
    Polygon,
    box,
    mapping,
    shape,
)
from shapely.geometry.base import BaseGeometry
from shapely.geometry.polygon import orient

AUTHALIC_RADIUS_KM = 6371.0072
MEAN_RADIUS_KM = 6371.0088

Geom = BaseGeometry
EMPTY = MultiPolygon()


class KindError(TypeError):
    """Operation received the wrong geometry kind (e.g. a point for an area op)."""


class TopologyError(ValueError):
    """Geometry could not be repaired into a valid polygon."""


def is_polygonal(g: Geom) -> bool:
    return isinstance(g, (Polygon, MultiPolygon))


def _require_polygonal(g: Geom, what: str = "geometry") -> None:
    if not is_polygonal(g):
        raise KindError(f"{what} must be Polygon or MultiPolygon, got {g.geom_type}")


def _polygonal_part(g: Geom) -> Geom:
    if g.is_empty:
        return EMPTY
    if is_polygonal(g):
        return g
    if isinstance(g, GeometryCollection):
        polys: list[Polygon] = []
        for part in g.geoms:
            part = _polygonal_part(part)
            if isinstance(part, Polygon):
                polys.append(part)
            elif isinstance(part, MultiPolygon):
                polys.extend(part.geoms)
        if not polys:
            return EMPTY
        return polys[0] if len(polys) == 1 else MultiPolygon(polys)
    return EMPTY


def as_multipolygon(g: Geom) -> MultiPolygon:
    if isinstance(g, MultiPolygon):
        return g
    if isinstance(g, Polygon):
        return MultiPolygon([g]) if not g.is_empty else EMPTY
    _require_polygonal(g)
    raise AssertionError  # unreachable


# -- ingestion -------------------------------------------------------------

def _unwrap_ring(coords: np.ndarray) -> tuple[np.ndarray, bool]:
    lon = coords[:, 0].copy()
    jumps = np.diff(lon)
    crossed = bool(np.any(np.abs(jumps) > 180.0))
    if crossed:
        shift = np.concatenate([[0.0], np.cumsum(-360.0 * np.round(jumps / 360.0))])
        lon = lon + shift
    out = coords.copy()
    out[:, 0] = lon
    return out, crossed


def split_antimeridian(g: Geom) -> Geom:
    """Cut polygons whose rings jump across +/-180 into in-range pieces."""
    if not is_polygonal(g) or g.is_empty:
        return g
    pieces: list[Geom] = []
    for poly in as_multipolygon(g).geoms:
        ext, crossed = _unwrap_ring(np.asarray(poly.exterior.coords))
        if not crossed:
            pieces.append(poly)
            continue
        holes = [_unwrap_ring(np.asarray(r.coords))[0] for r in poly.interiors]
        unwrapped = shapely.make_valid(Polygon(ext, holes))
        for k in (-1, 0, 1):
            window = box(-180.0 + 360.0 * k, -90.0, 180.0 + 360.0 * k, 90.0)
            part = unwrapped.intersection(window)
            if not part.is_empty:
                pieces.append(shapely.affinity.translate(part, xoff=-360.0 * k))
    return _polygonal_part(shapely.union_all(pieces)) if len(pieces) > 1 else pieces[0]


def repair(g: Geom) -> Geom:
    """Validity repair applied to every ingested polygon.

    Splits at the antimeridian, fixes self-intersections and rewinds rings
    (exterior counter-clockwise). Points pass through after a range check.
    """
    if isinstance(g, Point):
        if g.is_empty:
            raise TopologyError("empty point")
        if not (-180.0 <= g.x <= 180.0 and -90.0 <= g.y <= 90.0):
            raise TopologyError(f"point out of range: {g.x}, {g.y}")
        return g
    if g.is_empty:
        return EMPTY
    _require_polygonal(g)
    fixed = split_antimeridian(g)
    if not fixed.is_valid:
        fixed = _polygonal_part(shapely.make_valid(fixed))
        if not fixed.is_valid:
            fixed = _polygonal_part(fixed.buffer(0))
    if fixed.is_empty or not fixed.is_valid:
        raise TopologyError("polygon could not be repaired")
    if isinstance(fixed, Polygon):
        return orient(fixed, 1.0)
    return MultiPolygon([orient(p, 1.0) for p in fixed.geoms])


def from_geojson(obj: dict) -> Geom:
    """Build and repair a geometry from a GeoJSON geometry mapping."""
    g = shape(obj)
    if isinstance(g, GeometryCollection) and not g.is_empty:
        g = _polygonal_part(g)
    return repair(g)


def to_geojson(g: Geom) -> dict:
    return mapping(g)


# -- areas -----------------------------------------------------------------

def _to_equal_area(coords: np.ndarray) -> np.ndarray:
    out = np.empty_like(coords)
    out[:, 0] = AUTHALIC_RADIUS_KM * np.radians(coords[:, 0])
    out[:, 1] = AUTHALIC_RADIUS_KM * np.sin(np.radians(coords[:, 1]))
    return out


def project(g: Geom) -> Geom:
    """Geometry in the cylindrical equal-area frame, units of km."""
    return shapely.transform(g, _to_equal_area)


def area(g: Geom, planar: bool = False) -> float:
    """Area in km^2 (or squared coordinate units when ``planar``)."""
    _require_polygonal(g)
    if g.is_empty:
        return 0.0
    return float((g if planar else project(g)).area)


def _unit_vectors(ring: np.ndarray) -> np.ndarray:
    lon = np.radians(ring[:, 0])
    lat = np.radians(ring[:, 1])
    return np.column_stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)])


def _ring_excess(ring: np.ndarray) -> float:
    pts = _unit_vectors(ring[:-1] if len(ring) > 1 and np.array_equal(ring[0], ring[-1]) else ring)
    if len(pts) < 3:
        return 0.0
    a = pts[0]
    total = 0.0
    for b, c in zip(pts[1:-1], pts[2:]):
        num = float(np.dot(a, np.cross(b, c)))
        den = 1.0 + float(np.dot(a, b) + np.dot(b, c) + np.dot(c, a))
        total += 2.0 * math.atan2(num, den)
    return abs(total)


def spherical_area(g: Geom) -> float:
    """Area in km^2 with great-circle edges, by summed spherical excess.

    Independent of :func:`area`; the two agree closely for small polygons.
    """
    _require_polygonal(g)
    r2 = AUTHALIC_RADIUS_KM ** 2
    total = 0.0
    for poly in as_multipolygon(g).geoms:
        total += _ring_excess(np.asarray(poly.exterior.coords))
        for hole in poly.interiors:
            total -= _ring_excess(np.asarray(hole.coords))
    return total * r2


# -- set operations --------------------------------------------------------

def intersection(a: Geom, b: Geom) -> Geom:
    _require_polygonal(a)
    _require_polygonal(b)
    return _polygonal_part(a.intersection(b))


def union_all(gs: Iterable[Geom]) -> Geom:
    """Dissolve polygonal geometries; order does not matter."""
    gs = list(gs)
    for g in gs:
        _require_polygonal(g)
    if not gs:
        return EMPTY
    return _polygonal_part(shapely.union_all(gs))


def _frame(a: Geom, b: Geom, planar: bool) -> tuple[Geom, Geom]:
    _require_polygonal(a, "a")
    _require_polygonal(b, "b")
    if planar:
        return a, b
    return project(a), project(b)


def intersection_area(a: Geom, b: Geom, planar: bool = False) -> float:
    pa, pb = _frame(a, b, planar)
    return float(pa.intersection(pb).area)


def overlap_ratio(a: Geom, b: Geom, planar: bool = False) -> float:
    """Share of ``a``'s area that lies inside ``b``; 0 when ``a`` has no area."""
    pa, pb = _frame(a, b, planar)
    area_a = pa.area
    if area_a <= 0.0:
        return 0.0
    return min(1.0, float(pa.intersection(pb).area / area_a))


def jaccard(a: Geom, b: Geom, planar: bool = False) -> float:
    pa, pb = _frame(a, b, planar)
    union = pa.union(pb).area
    if union <= 0.0:
        return 0.0
    return min(1.0, float(pa.intersection(pb).area / union))


def contains_point(poly: Geom, p: Geom) -> bool:
    """Point-in-polygon test; points on the boundary count as inside."""
    _require_polygonal(poly, "poly")
    if not isinstance(p, Point):
        raise KindError(f"p must be a Point, got {p.geom_type}")
    return bool(poly.covers(p))


def representative_point(g: Geom) -> Point:
    if isinstance(g, Point):
        return g
    _require_polygonal(g)
    return g.representative_point()


def geodesic_distance(p1: Point | Sequence[float], p2: Point | Sequence[float]) -> float:
    """Great-circle (haversine) distance in km between two lon/lat points."""
    lon1, lat1 = (p1.x, p1.y) if isinstance(p1, Point) else p1
    lon2, lat2 = (p2.x, p2.y) if isinstance(p2, Point) else p2
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2.0 * MEAN_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))
