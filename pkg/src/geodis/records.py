"""EM-DAT style input records."""
from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

HEADER_ALIASES = {
    "dis_no": ("DisNo.", "Dis No", "DisNo", "dis_no"),
    "location": ("Location",),
    "country": ("Country",),
    "subgroup": ("Disaster Subgroup", "Subgroup"),
    "dtype": ("Disaster Type", "Type"),
}
REQUIRED = ("dis_no", "location", "country")

_YEAR = re.compile(r"^(\d{4})-")


class IngestError(Exception):
    pass


class MissingColumn(IngestError):
    def __init__(self, column: str):
        super().__init__(f"missing column {column!r}")
        self.column = column


class DuplicateDisNo(IngestError):
    pass


@dataclass(frozen=True)
class DisasterRecord:
    dis_no: str
    location_raw: str
    country: str
    subgroup: str | None = None
    dtype: str | None = None

    @property
    def year(self) -> int | None:
        m = _YEAR.match(self.dis_no)
        return int(m.group(1)) if m else None


@dataclass
class IngestResult:
    records: list[DisasterRecord]
    skipped_empty: int = 0


def _resolve_headers(header: list[str]) -> dict[str, str]:
    stripped = {h.strip().lstrip("﻿"): h for h in header}
    out = {}
    for field, names in HEADER_ALIASES.items():
        for n in names:
            if n in stripped:
                out[field] = stripped[n]
                break
    for field in REQUIRED:
        if field not in out:
            raise MissingColumn(HEADER_ALIASES[field][0])
    return out


def ingest_emdat_csv(path: str | Path) -> IngestResult:
    """Read records; rows with an empty Location are dropped and counted.

    Raises:
        MissingColumn: a required header is absent (aliases accepted).
        DuplicateDisNo: a disaster number appears twice among kept rows.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        cols = _resolve_headers(reader.fieldnames or [])
        records: list[DisasterRecord] = []
        seen: set[str] = set()
        skipped = 0
        for row in reader:
            loc = (row.get(cols["location"]) or "").strip()
            dis_no = (row.get(cols["dis_no"]) or "").strip()
            if not loc:
                skipped += 1
                continue
            if dis_no in seen:
                raise DuplicateDisNo(dis_no)
            seen.add(dis_no)
            records.append(DisasterRecord(
                dis_no, loc, (row.get(cols["country"]) or "").strip(),
                (row.get(cols["subgroup"]) or None) if "subgroup" in cols else None,
                (row.get(cols["dtype"]) or None) if "dtype" in cols else None,
            ))
    if skipped:
        log.warning("%s: skipped %d rows with empty Location", path, skipped)
    return IngestResult(records, skipped)
