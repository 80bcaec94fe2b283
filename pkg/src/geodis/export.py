"""Writers and readers for geocoded output, plus aggregate statistics tables."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from shapely.geometry import shape

from geodis import geometry as geo
from geodis.candidates import SOURCE_ORDER, Source
from geodis.harmonize import GeocodedLocation, Reliability, ReliabilityScore
from geodis.pipeline import GeocodedEvent
from geodis.records import _YEAR

COLUMNS = ("dis_no", "gadm_gid", "gadm_name", "admin_level", "source_mask",
           "reliability_value", "reliability_label", "proxy_used")
CSV_COLUMNS = COLUMNS + ("query_name",)
GEOJSON_NAME = "locations.geojson"
CSV_NAME = "locations.csv"


class IoError(Exception):
    pass


class ExportFormatError(IoError):
    pass


class EmptyReport(ValueError):
    pass


def _mask_text(mask) -> str:
    return "|".join(s.value for s in SOURCE_ORDER if s in mask)


def _props(dis_no: str, loc: GeocodedLocation) -> dict:
    return {
        "dis_no": dis_no,
        "gadm_gid": loc.gadm_gid,
        "gadm_name": loc.gadm_name,
        "admin_level": loc.admin_level,
        "source_mask": _mask_text(loc.source_mask),
        "reliability_value": loc.reliability.value,
        "reliability_label": loc.reliability.label,
        "proxy_used": loc.proxy_used.value if loc.proxy_used else None,
    }


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export(events: Sequence[GeocodedEvent], out_dir: str | Path) -> tuple[Path, Path]:
    """Write ``locations.geojson`` and ``locations.csv``; returns their paths.

    Output is a pure function of ``events``: keys are sorted and features
    follow event then location order.

    Raises:
        IoError: the directory or files cannot be written.
    """
    out = Path(out_dir)
    features = []
    rows = []
    for ev in events:
        for loc in ev.locations:
            props = _props(ev.dis_no, loc)
            features.append({"type": "Feature",
                             "properties": {**props, "query_name": loc.query_name},
                             "geometry": geo.to_geojson(loc.geometry)})
            rows.append({**props, "query_name": loc.query_name})
    fc = {"type": "FeatureCollection", "features": features}
    try:
        out.mkdir(parents=True, exist_ok=True)
        gj = out / GEOJSON_NAME
        _atomic_write(gj, json.dumps(fc, sort_keys=True, separators=(",", ":")) + "\n")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: "" if v is None else v for k, v in r.items()})
        cp = out / CSV_NAME
        _atomic_write(cp, buf.getvalue())
    except OSError as exc:
        raise IoError(f"cannot write output to {out}: {exc}") from None
    return gj, cp


def read_geojson(path: str | Path) -> list[GeocodedEvent]:
    """Events back from an exported FeatureCollection (diagnostics are not kept).

    Raises:
        IoError: unreadable file.
        ExportFormatError: the file does not follow the export layout.
    """
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise ExportFormatError(f"{path}: {exc}") from None
    if not isinstance(data, dict) or data.get("type") != "FeatureCollection":
        raise ExportFormatError(f"{path}: not a FeatureCollection")
    events: dict[str, GeocodedEvent] = {}
    for i, feat in enumerate(data.get("features", [])):
        props = feat.get("properties") or {}
        missing = [c for c in COLUMNS if c not in props]
        if missing:
            raise ExportFormatError(f"{path}: feature {i} lacks {missing[0]}")
        try:
            value = int(props["reliability_value"])
            rel = ReliabilityScore.of(value)
            if rel.label != props["reliability_label"]:
                raise ExportFormatError(f"{path}: feature {i} label does not match value")
            mask = frozenset(Source(s) for s in props["source_mask"].split("|") if s)
            proxy = Source(props["proxy_used"]) if props["proxy_used"] else None
            loc = GeocodedLocation(props.get("query_name") or "", int(props["admin_level"]),
                                   shape(feat["geometry"]), mask, rel, props["gadm_gid"],
                                   props["gadm_name"], proxy)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise ExportFormatError(f"{path}: feature {i}: {exc}") from None
        ev = events.setdefault(props["dis_no"], GeocodedEvent(props["dis_no"]))
        ev.locations.append(loc)
        ev.coverage_flag = True
    return list(events.values())


# -- statistics ------------------------------------------------------------

@dataclass
class StatsReport:
    admin_level_shares: list[dict]
    yearly_source_counts: list[dict]
    locations_per_disaster: list[dict]
    reliability_distribution: list[dict]

    TABLES = ("admin_level_shares", "yearly_source_counts", "locations_per_disaster",
              "reliability_distribution")

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        paths = []
        try:
            out.mkdir(parents=True, exist_ok=True)
            for name in self.TABLES:
                rows = getattr(self, name)
                p = out / f"{name}.csv"
                with open(p, "w", newline="", encoding="utf-8") as fh:
                    w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["empty"],
                                       lineterminator="\n")
                    w.writeheader()
                    w.writerows(rows)
                paths.append(p)
        except OSError as exc:
            raise IoError(f"cannot write report to {out}: {exc}") from None
        return paths


def _year(dis_no: str) -> int | None:
    m = _YEAR.match(dis_no)
    return int(m.group(1)) if m else None


def stats_report(events: Sequence[GeocodedEvent]) -> StatsReport:
    """Admin-level shares, yearly per-source counts, locations per disaster
    and the reliability distribution over all geocoded locations.

    Raises:
        EmptyReport: no events, or no located events.
    """
    if not events:
        raise EmptyReport("stats need at least one event")
    locs = [(ev.dis_no, loc) for ev in events for loc in ev.locations]
    if not locs:
        raise EmptyReport("no geocoded locations to summarize")
    n = len(locs)

    levels = Counter(loc.admin_level for _, loc in locs)
    shares = [{"admin_level": lv, "count": levels.get(lv, 0),
               "share_pct": round(100.0 * levels.get(lv, 0) / n, 4)} for lv in (1, 2, 3)]

    yearly: dict[tuple, int] = defaultdict(int)
    for dis_no, loc in locs:
        for s in loc.source_mask:
            yearly[(_year(dis_no), Source(s).value)] += 1
    yearly_rows = [{"year": y if y is not None else "", "source": s, "count": c}
                   for (y, s), c in sorted(yearly.items(), key=lambda t: (t[0][0] or 0, t[0][1]))]

    per_event = Counter(len(ev.locations) for ev in events)
    per_rows = [{"n_locations": k, "n_disasters": per_event[k]} for k in sorted(per_event)]

    rel = Counter(loc.reliability.value for _, loc in locs)
    rel_rows = [{"reliability_value": r.value, "reliability_label": r.name,
                 "count": rel.get(r.value, 0), "share_pct": round(100.0 * rel.get(r.value, 0) / n, 4)}
                for r in Reliability]
    return StatsReport(shares, yearly_rows, per_rows, rel_rows)
