"""Minimal GeoPackage access over sqlite3.

Reads and writes feature tables whose geometry column holds standard GPKG
geometry blobs (``GP`` header + WKB). Enough for GADM level layers and
benchmark files without pulling in GDAL.
"""
from __future__ import annotations

import sqlite3
import struct
from pathlib import Path
from typing import Any, Iterator

import shapely
from shapely.geometry.base import BaseGeometry

_ENVELOPE_BYTES = {0: 0, 1: 32, 2: 48, 3: 48, 4: 64}


class GpkgError(ValueError):
    pass


def decode_blob(blob: bytes) -> BaseGeometry:
    if blob is None:
        raise GpkgError("null geometry")
    blob = bytes(blob)
    if blob[:2] != b"GP":
        # some writers store bare WKB
        return shapely.from_wkb(blob)
    flags = blob[3]
    envelope = (flags >> 1) & 0b111
    if envelope not in _ENVELOPE_BYTES:
        raise GpkgError(f"bad envelope code {envelope}")
    start = 8 + _ENVELOPE_BYTES[envelope]
    return shapely.from_wkb(blob[start:])


def encode_blob(geom: BaseGeometry, srs_id: int = 4326) -> bytes:
    flags = 0b00000001  # little endian, no envelope
    if geom.is_empty:
        flags |= 0b00010000
    return b"GP" + bytes([0, flags]) + struct.pack("<i", srs_id) + shapely.to_wkb(geom, byte_order=1)


def list_layers(path: str | Path) -> list[str]:
    with sqlite3.connect(f"file:{path}?mode=ro", uri=True) as con:
        rows = con.execute(
            "SELECT table_name FROM gpkg_contents WHERE data_type = 'features'").fetchall()
    return [r[0] for r in rows]


def _geometry_column(con: sqlite3.Connection, layer: str) -> str:
    row = con.execute(
        "SELECT column_name FROM gpkg_geometry_columns WHERE table_name = ?", (layer,)).fetchone()
    if row is None:
        raise GpkgError(f"layer {layer!r} has no registered geometry column")
    return row[0]


def layer_columns(path: str | Path, layer: str) -> list[str]:
    with sqlite3.connect(f"file:{path}?mode=ro", uri=True) as con:
        return [r[1] for r in con.execute(f'PRAGMA table_info("{layer}")')]


def read_layer(path: str | Path, layer: str) -> Iterator[tuple[dict[str, Any], BaseGeometry]]:
    """Yield ``(attributes, geometry)`` for every row of ``layer``."""
    con = sqlite3.connect(f"file:{path}?mode=ro", uri=True)
    try:
        geom_col = _geometry_column(con, layer)
        cur = con.execute(f'SELECT * FROM "{layer}"')
        names = [d[0] for d in cur.description]
        for row in cur:
            attrs = dict(zip(names, row))
            blob = attrs.pop(geom_col)
            yield attrs, decode_blob(blob)
    finally:
        con.close()


_SQL_TYPES = {int: "INTEGER", float: "REAL", str: "TEXT"}


def write_layer(path: str | Path, layer: str, rows: list[tuple[dict[str, Any], BaseGeometry]],
                geometry_type: str = "MULTIPOLYGON") -> None:
    """Append a feature table to ``path``, creating the GeoPackage if needed."""
    path = Path(path)
    con = sqlite3.connect(path)
    try:
        con.executescript("""
            CREATE TABLE IF NOT EXISTS gpkg_spatial_ref_sys (
                srs_name TEXT NOT NULL, srs_id INTEGER PRIMARY KEY,
                organization TEXT NOT NULL, organization_coordsys_id INTEGER NOT NULL,
                definition TEXT NOT NULL, description TEXT);
            CREATE TABLE IF NOT EXISTS gpkg_contents (
                table_name TEXT PRIMARY KEY, data_type TEXT NOT NULL, identifier TEXT UNIQUE,
                description TEXT DEFAULT '', last_change DATETIME, min_x DOUBLE, min_y DOUBLE,
                max_x DOUBLE, max_y DOUBLE, srs_id INTEGER);
            CREATE TABLE IF NOT EXISTS gpkg_geometry_columns (
                table_name TEXT NOT NULL, column_name TEXT NOT NULL,
                geometry_type_name TEXT NOT NULL, srs_id INTEGER NOT NULL,
                z TINYINT NOT NULL, m TINYINT NOT NULL,
                CONSTRAINT pk_geom_cols PRIMARY KEY (table_name, column_name));
        """)
        con.execute(
            "INSERT OR IGNORE INTO gpkg_spatial_ref_sys VALUES "
            "('WGS 84 geodetic', 4326, 'EPSG', 4326, 'GEOGCS[\"WGS 84\"]', NULL)")
        columns: dict[str, str] = {}
        for attrs, _ in rows:
            for k, v in attrs.items():
                if k not in columns or columns[k] == "TEXT" and v is not None:
                    columns.setdefault(k, _SQL_TYPES.get(type(v), "TEXT"))
        cols_sql = "".join(f', "{k}" {t}' for k, t in columns.items())
        con.execute(f'CREATE TABLE "{layer}" (fid INTEGER PRIMARY KEY AUTOINCREMENT, geom BLOB{cols_sql})')
        con.execute("INSERT INTO gpkg_contents (table_name, data_type, identifier, srs_id) "
                    "VALUES (?, 'features', ?, 4326)", (layer, layer))
        con.execute("INSERT INTO gpkg_geometry_columns VALUES (?, 'geom', ?, 4326, 0, 0)",
                    (layer, geometry_type))
        names = list(columns)
        placeholders = ", ".join("?" for _ in range(len(names) + 1))
        col_list = ", ".join(["geom"] + [f'"{k}"' for k in names])
        con.executemany(
            f'INSERT INTO "{layer}" ({col_list}) VALUES ({placeholders})',
            [[encode_blob(g)] + [a.get(k) for k in names] for a, g in rows])
        con.commit()
    finally:
        con.close()
