"""GADM v4.1 loading and per-country, per-level indexing."""
from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from shapely.geometry import shape
from shapely.geometry.base import BaseGeometry
from shapely.strtree import STRtree

from geodis import geometry as geo
from geodis.gadm import gpkg
from geodis.gadm.countries import DEFAULT_COUNTRIES, CountryTable
from geodis.textnorm import CONNECTORS, DESCRIPTORS, EmptyResult, normalize_name

log = logging.getLogger(__name__)

LEVELS = (1, 2, 3)
DEFAULT_LAYERS = ("ADM_ADM_{n}", "ADM_{n}", "level{n}")


class GadmError(Exception):
    pass


class MissingLayer(GadmError):
    pass


class SchemaMismatch(GadmError):
    def __init__(self, field_name: str, message: str = "field absent"):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class EmptyCountry(GadmError):
    pass


@dataclass(frozen=True, eq=False)
class GadmUnit:
    gid: str
    name: str
    level: int
    country_iso3: str
    geometry: BaseGeometry
    parent_gid: str | None = None
    variant_names: tuple[str, ...] = ()

    def __repr__(self) -> str:
        return f"GadmUnit({self.gid!r}, {self.name!r}, level={self.level})"


@dataclass
class Pool:
    """Candidate names (aliases included) aligned with their units."""

    names: list[str] = field(default_factory=list)
    units: list[GadmUnit] = field(default_factory=list)
    exact: dict[str, list[GadmUnit]] = field(default_factory=dict)

    def add(self, key: str, unit: GadmUnit) -> None:
        self.names.append(key)
        self.units.append(unit)
        bucket = self.exact.setdefault(key, [])
        if unit not in bucket:
            bucket.append(unit)


class GadmIndex:
    """Immutable after construction; lookups are safe from many threads."""

    def __init__(self, units: Iterable[GadmUnit], descriptors=DESCRIPTORS, connectors=CONNECTORS):
        self.descriptors = frozenset(descriptors)
        self.connectors = frozenset(connectors)
        self.units: dict[str, GadmUnit] = {}
        self._pools: dict[tuple[str, int], Pool] = {}
        self._children: dict[str, list[GadmUnit]] = {}
        for unit in sorted(units, key=lambda u: (u.level, u.gid)):
            if unit.gid in self.units:
                raise SchemaMismatch(f"GID_{unit.level}", f"duplicate gid {unit.gid}")
            self.units[unit.gid] = unit
        for unit in self.units.values():
            if unit.parent_gid is not None:
                parent = self.units.get(unit.parent_gid)
                if parent is None or parent.level != unit.level - 1:
                    raise SchemaMismatch(f"GID_{unit.level - 1}",
                                         f"{unit.gid} references missing parent {unit.parent_gid}")
                self._children.setdefault(unit.parent_gid, []).append(unit)
            elif unit.level > 1:
                raise SchemaMismatch(f"GID_{unit.level - 1}", f"{unit.gid} has no parent")
            pool = self._pools.setdefault((unit.country_iso3, unit.level), Pool())
            for key in self.keys_for(unit):
                pool.add(key, unit)
        self._sub_pools: dict[tuple[str, int], Pool] = {}
        self._trees: dict[tuple[str, int], tuple[STRtree, list[GadmUnit]]] = {}
        self._lock = threading.Lock()

    def key(self, name: str) -> str:
        return normalize_name(name, True, self.descriptors, self.connectors).text

    def keys_for(self, unit: GadmUnit) -> list[str]:
        keys: list[str] = []
        for name in (unit.name, *unit.variant_names):
            try:
                k = self.key(name)
            except EmptyResult:
                continue
            if k not in keys:
                keys.append(k)
        return keys

    def __len__(self) -> int:
        return len(self.units)

    def __iter__(self) -> Iterator[GadmUnit]:
        return iter(self.units.values())

    def __getitem__(self, gid: str) -> GadmUnit:
        return self.units[gid]

    def get(self, gid: str | None) -> GadmUnit | None:
        return self.units.get(gid) if gid else None

    def countries(self) -> list[str]:
        return sorted({iso for iso, _ in self._pools})

    def has_country(self, iso3: str) -> bool:
        return any(iso == iso3 for iso, _ in self._pools)

    def units_at(self, iso3: str, level: int) -> list[GadmUnit]:
        pool = self._pools.get((iso3, level))
        if pool is None:
            return []
        seen: dict[str, GadmUnit] = {}
        for u in pool.units:
            seen.setdefault(u.gid, u)
        return list(seen.values())

    def lookup(self, iso3: str, level: int, name: str) -> list[GadmUnit]:
        """Units whose normalized name or alias equals ``name``'s."""
        pool = self._pools.get((iso3, level))
        if pool is None:
            return []
        try:
            return list(pool.exact.get(self.key(name), []))
        except EmptyResult:
            return []

    def children(self, gid: str) -> list[GadmUnit]:
        return list(self._children.get(gid, []))

    def descendants(self, gid: str, level: int) -> list[GadmUnit]:
        frontier = [self.units[gid]]
        while frontier and frontier[0].level < level:
            frontier = [c for u in frontier for c in self._children.get(u.gid, [])]
        return [u for u in frontier if u.level == level]

    def pool(self, iso3: str, level: int, parent: GadmUnit | None = None) -> Pool:
        if parent is None:
            return self._pools.get((iso3, level), Pool())
        key = (parent.gid, level)
        pool = self._sub_pools.get(key)
        if pool is None:
            pool = Pool()
            for unit in self.descendants(parent.gid, level):
                for k in self.keys_for(unit):
                    pool.add(k, unit)
            self._sub_pools[key] = pool
        return pool

    def spatial(self, iso3: str, level: int) -> tuple[STRtree, list[GadmUnit]]:
        """STR-tree over the units of one country and level."""
        key = (iso3, level)
        with self._lock:
            entry = self._trees.get(key)
            if entry is None:
                units = self.units_at(iso3, level)
                entry = (STRtree([u.geometry for u in units]), units)
                self._trees[key] = entry
        return entry


# -- loading ---------------------------------------------------------------

def _variants(raw) -> tuple[str, ...]:
    if not raw or not isinstance(raw, str) or raw.strip().upper() in {"NA", "N/A"}:
        return ()
    return tuple(v.strip() for v in raw.split("|") if v.strip())


def _check_fields(columns: Sequence[str], level: int, fields) -> None:
    required = [fields["gid"].format(n=level), fields["name"].format(n=level), fields["country"]]
    if level > 1:
        required.append(fields["gid"].format(n=level - 1))
    for name in required:
        if name not in columns:
            raise SchemaMismatch(name)


DEFAULT_FIELDS = {
    "gid": "GID_{n}",
    "name": "NAME_{n}",
    "varname": "VARNAME_{n}",
    "country": "GID_0",
}


def _gpkg_rows(path: Path, level: int, layer_names) -> tuple[list[str], Iterator] | None:
    layers = gpkg.list_layers(path)
    for pattern in layer_names:
        name = pattern.format(n=level)
        if name in layers:
            return gpkg.layer_columns(path, name), gpkg.read_layer(path, name)
    return None


def _geojson_rows(path: Path, level: int) -> tuple[list[str], Iterator] | None:
    files = sorted(p for ext in ("json", "geojson") for p in path.glob(f"*_{level}.{ext}"))
    if not files:
        return None
    columns: list[str] = []
    features: list[tuple[dict, BaseGeometry]] = []
    for f in files:
        data = json.loads(f.read_text("utf-8"))
        for feat in data.get("features", []):
            props = feat.get("properties") or {}
            for k in props:
                if k not in columns:
                    columns.append(k)
            features.append((props, shape(feat["geometry"])))
    return columns, iter(features)


def load_gadm(
    path: str | Path,
    countries: Iterable[str] | None = None,
    *,
    levels: Sequence[int] = LEVELS,
    layer_names: Sequence[str] = DEFAULT_LAYERS,
    fields: dict[str, str] | None = None,
    country_table: CountryTable = DEFAULT_COUNTRIES,
    descriptors=DESCRIPTORS,
) -> GadmIndex:
    """Load GADM level layers from a GeoPackage or a directory of per-level GeoJSON.

    Level 1 must exist; finer levels are optional since many countries stop
    at Admin2.

    Raises:
        MissingLayer: no Admin1 layer (or ``path`` holds nothing usable).
        SchemaMismatch: a required field is absent, naming it.
        EmptyCountry: a requested country has no units.
    """
    path = Path(path)
    fields = {**DEFAULT_FIELDS, **(fields or {})}
    wanted = {country_table.resolve(c) for c in countries} if countries else None
    if not path.exists():
        raise MissingLayer(f"{path} does not exist")

    units: list[GadmUnit] = []
    for level in levels:
        source = (_geojson_rows(path, level) if path.is_dir()
                  else _gpkg_rows(path, level, layer_names))
        if source is None:
            if level == 1:
                raise MissingLayer(f"no Admin1 layer in {path}")
            log.info("GADM: no level %d layer in %s", level, path)
            continue
        columns, rows = source
        _check_fields(columns, level, fields)
        gid_f = fields["gid"].format(n=level)
        name_f = fields["name"].format(n=level)
        var_f = fields["varname"].format(n=level)
        parent_f = fields["gid"].format(n=level - 1) if level > 1 else None
        merged: dict[str, dict] = {}
        for attrs, geom in rows:
            iso = str(attrs[fields["country"]]).upper()
            if wanted is not None and iso not in wanted:
                continue
            gid = str(attrs[gid_f])
            if gid in merged:
                merged[gid]["geoms"].append(geom)
                continue
            merged[gid] = {
                "name": str(attrs[name_f]),
                "var": _variants(attrs.get(var_f)),
                "iso": iso,
                "parent": str(attrs[parent_f]) if parent_f else None,
                "geoms": [geom],
            }
        for gid, m in merged.items():
            g = m["geoms"][0] if len(m["geoms"]) == 1 else geo.union_all(
                [geo.repair(x) for x in m["geoms"]])
            geom = geo.repair(g)
            if geom.is_empty:
                log.warning("GADM: dropping %s with empty geometry", gid)
                continue
            units.append(GadmUnit(gid, m["name"], level, m["iso"], geom, m["parent"], m["var"]))

    index = GadmIndex(units, descriptors=descriptors)
    if wanted:
        for iso in sorted(wanted):
            if not index.has_country(iso):
                raise EmptyCountry(f"no GADM units for {iso} in {path}")
    return index
