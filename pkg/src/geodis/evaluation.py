"""Footprint comparison against benchmark geocodings (EM-DAT GAUL, GDIS, ...)."""
from __future__ import annotations

import csv
import json
import math
import statistics
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from shapely.geometry import Point, shape
from shapely.geometry.base import BaseGeometry

from geodis import geometry as geo
from geodis.gadm import gpkg
from geodis.gadm.index import GadmIndex


class EvaluationError(Exception):
    pass


class DisNoMismatch(EvaluationError):
    pass


class EmptyCandidateSet(EvaluationError):
    pass


class OutOfRange(EvaluationError):
    pass


class FormatError(EvaluationError):
    pass


class EmptyJoin(EvaluationError):
    pass


@dataclass(frozen=True)
class BenchmarkFootprint:
    dis_no: str
    geometry: BaseGeometry


@dataclass(frozen=True)
class FootprintMetrics:
    dis_no: str
    a_in_b: float
    b_in_a: float
    jaccard: float
    intersects: bool


@dataclass(frozen=True)
class Unit:
    """One geocoded or benchmark unit as read from a file."""

    dis_no: str
    geometry: BaseGeometry
    level: int | None = None
    gid: str | None = None


def unit_level_metrics(unit_geom: BaseGeometry, footprint: BenchmarkFootprint,
                       dis_no: str | None = None) -> float:
    """Share of a unit inside the footprint; 0/1 containment for points."""
    if dis_no is not None and dis_no != footprint.dis_no:
        raise DisNoMismatch(f"{dis_no} vs footprint {footprint.dis_no}")
    if isinstance(unit_geom, Point):
        return 1.0 if geo.contains_point(footprint.geometry, unit_geom) else 0.0
    return geo.overlap_ratio(unit_geom, footprint.geometry)


def footprint_metrics(candidate_units: Iterable[BaseGeometry], footprint: BenchmarkFootprint,
                      planar: bool = False) -> FootprintMetrics:
    """Dissolve the candidate units and compare with the benchmark footprint.

    Points cannot be dissolved into an area and are skipped.

    Raises:
        EmptyCandidateSet: no polygonal candidates.
    """
    polys = [g for g in candidate_units if geo.is_polygonal(g) and not g.is_empty]
    if not polys:
        raise EmptyCandidateSet(footprint.dis_no)
    a = geo.union_all(polys)
    b = footprint.geometry
    a_in_b = geo.overlap_ratio(a, b, planar)
    b_in_a = geo.overlap_ratio(b, a, planar)
    jac = geo.jaccard(a, b, planar)
    intersects = a_in_b > 0.0 and b_in_a > 0.0
    if not intersects:
        a_in_b = b_in_a = jac = 0.0
    return FootprintMetrics(footprint.dis_no, a_in_b, b_in_a, min(jac, a_in_b, b_in_a), intersects)


def _check_range(values: Sequence[float]) -> None:
    for v in values:
        if not (0.0 <= v <= 1.0) or math.isnan(v):
            raise OutOfRange(f"value {v} outside [0, 1]")


def histogram_01(values: Sequence[float], bin_width: float = 0.1) -> list[int]:
    """Counts over [0, w), [w, 2w), ..., with 1.0 in the last bin."""
    _check_range(values)
    nbins = int(round(1.0 / bin_width))
    counts = [0] * nbins
    for v in values:
        counts[min(int(math.floor(v / bin_width + 1e-12)), nbins - 1)] += 1
    return counts


def summary(values: Sequence[float]) -> dict:
    """Median, mean and the share of exact zeros (non-intersecting units)."""
    _check_range(values)
    if not values:
        return {"n": 0, "median": None, "mean": None, "frac_zero": None}
    return {
        "n": len(values),
        "median": statistics.median(values),
        "mean": statistics.fmean(values),
        "frac_zero": sum(1 for v in values if v == 0.0) / len(values),
    }


# -- loading ---------------------------------------------------------------

FORMATS = {
    "gaul_archive": {"dis_no": ("DisNo.", "disno", "dis_no", "Dis No"), "level": ("adm_level", "level")},
    "gdis": {"dis_no": ("disasterno", "dis_no"), "level": ("level",), "iso3": ("iso3",)},
    "llmgeodis": {"dis_no": ("dis_no", "DisNo."), "level": ("admin_level", "level"),
                  "gid": ("gadm_gid",)},
}


def _pick(props: Mapping, names: Sequence[str]):
    for n in names:
        if n in props and props[n] not in (None, ""):
            return props[n]
    return None


def _read_features(path: Path) -> list[tuple[dict, BaseGeometry]]:
    if path.suffix.lower() == ".gpkg":
        layers = gpkg.list_layers(path)
        if not layers:
            raise FormatError(f"{path}: no feature layers")
        return [row for layer in layers for row in gpkg.read_layer(path, layer)]
    try:
        data = json.loads(path.read_text("utf-8"))
    except (OSError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from None
    if data.get("type") != "FeatureCollection":
        raise FormatError(f"{path}: not a FeatureCollection")
    out = []
    for feat in data.get("features", []):
        if feat.get("geometry") is None:
            continue
        out.append((feat.get("properties") or {}, shape(feat["geometry"])))
    return out


def load_units(path: str | Path, fmt: str) -> dict[str, list[Unit]]:
    """Units grouped by disaster number."""
    if fmt not in FORMATS:
        raise FormatError(f"unknown format {fmt!r}; choose from {sorted(FORMATS)}")
    preset = FORMATS[fmt]
    out: dict[str, list[Unit]] = defaultdict(list)
    for props, geom in _read_features(Path(path)):
        dis_no = _pick(props, preset["dis_no"])
        if dis_no is None:
            raise FormatError(f"{path}: feature without {preset['dis_no'][0]}")
        dis_no = str(dis_no)
        iso = _pick(props, preset.get("iso3", ()))
        if iso and dis_no.count("-") == 1:
            dis_no = f"{dis_no}-{str(iso).upper()}"
        level = _pick(props, preset["level"])
        try:
            level = int(level) if level is not None else None
        except (TypeError, ValueError):
            level = None
        gid = _pick(props, preset.get("gid", ()))
        try:
            geom = geo.repair(geom)
        except (geo.TopologyError, geo.KindError):
            continue
        out[dis_no].append(Unit(dis_no, geom, level, gid))
    return dict(out)


def coarsen(units: list[Unit], index: GadmIndex, to_level: int = 2) -> list[Unit]:
    """Replace units finer than ``to_level`` with their ancestor's geometry, deduplicated."""
    out: list[Unit] = []
    seen: set[str] = set()
    for u in units:
        gadm = index.get(u.gid)
        if gadm is not None and u.level is not None and u.level > to_level:
            while gadm is not None and gadm.level > to_level:
                gadm = index.get(gadm.parent_gid)
            if gadm is not None:
                if gadm.gid in seen:
                    continue
                seen.add(gadm.gid)
                out.append(Unit(u.dis_no, gadm.geometry, gadm.level, gadm.gid))
                continue
        if u.gid:
            if u.gid in seen:
                continue
            seen.add(u.gid)
        out.append(u)
    return out


def dissolve(units_by_event: Mapping[str, list[Unit]]) -> dict[str, BenchmarkFootprint]:
    out = {}
    for dis_no, units in units_by_event.items():
        polys = [u.geometry for u in units if geo.is_polygonal(u.geometry) and not u.geometry.is_empty]
        if polys:
            out[dis_no] = BenchmarkFootprint(dis_no, geo.union_all(polys))
    return out


def load_benchmark(path: str | Path, fmt: str, *, coarsen_to: int | None = None,
                   gadm: GadmIndex | None = None) -> dict[str, BenchmarkFootprint]:
    """Benchmark footprints keyed by disaster number, one dissolved geometry each."""
    units = load_units(path, fmt)
    if coarsen_to is not None and gadm is not None:
        units = {k: coarsen(v, gadm, coarsen_to) for k, v in units.items()}
    return dissolve(units)


def join(candidates: Mapping[str, object], benchmark: Mapping[str, object]) -> list[str]:
    """Disaster numbers present in both datasets, sorted."""
    return sorted(set(candidates) & set(benchmark))


# -- command ---------------------------------------------------------------

METRIC_FIELDS = ("dis_no", "a_in_b", "b_in_a", "jaccard", "intersects")


def _section(values: list[float]) -> dict:
    return {**summary(values), "histogram": histogram_01(values) if values else [0] * 10}


def evaluate(
    candidate_path: str | Path,
    benchmark_path: str | Path,
    fmt: str,
    out_dir: str | Path,
    *,
    candidate_format: str = "llmgeodis",
    gadm: GadmIndex | None = None,
    coarsen_to: int | None = None,
) -> dict:
    """Compare candidate units with benchmark footprints and write the results.

    Writes ``footprint_metrics.csv``, ``unit_metrics.csv`` and
    ``summary.json`` into ``out_dir``; returns the summary.

    Raises:
        EmptyJoin: the datasets share no disaster number.
    """
    cand = load_units(candidate_path, candidate_format)
    if coarsen_to is not None and gadm is not None:
        cand = {k: coarsen(v, gadm, coarsen_to) for k, v in cand.items()}
    bench = load_benchmark(benchmark_path, fmt)
    shared = join(cand, bench)
    if not shared:
        raise EmptyJoin(f"no disaster numbers shared by {candidate_path} and {benchmark_path}")

    unit_rows, unit_poly, unit_point = [], [], []
    foot_rows: list[FootprintMetrics] = []
    for dis_no in shared:
        fp = bench[dis_no]
        for u in cand[dis_no]:
            v = unit_level_metrics(u.geometry, fp, dis_no)
            kind = "point" if isinstance(u.geometry, Point) else "polygon"
            (unit_point if kind == "point" else unit_poly).append(v)
            unit_rows.append({"dis_no": dis_no, "gid": u.gid or "", "kind": kind, "a_in_b": v})
        try:
            foot_rows.append(footprint_metrics([u.geometry for u in cand[dis_no]], fp))
        except EmptyCandidateSet:
            continue

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "footprint_metrics.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=METRIC_FIELDS)
        w.writeheader()
        for m in foot_rows:
            w.writerow(asdict(m))
    with open(out / "unit_metrics.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=("dis_no", "gid", "kind", "a_in_b"))
        w.writeheader()
        w.writerows(unit_rows)

    result = {
        "n_shared_events": len(shared),
        "n_footprints": len(foot_rows),
        "unit_a_in_b": _section(unit_poly),
        "unit_point_inclusion": _section(unit_point),
        "footprint_a_in_b": _section([m.a_in_b for m in foot_rows]),
        "footprint_b_in_a": _section([m.b_in_a for m in foot_rows]),
        "footprint_jaccard": _section([m.jaccard for m in foot_rows]),
        "frac_non_intersecting": (sum(1 for m in foot_rows if not m.intersects) / len(foot_rows)
                                  if foot_rows else None),
    }
    (out / "summary.json").write_text(json.dumps(result, indent=2, sort_keys=True), "utf-8")
    return result
