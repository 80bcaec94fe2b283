"""Per-source geometry proposals for one parsed location."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from shapely.geometry.base import BaseGeometry


class Source(str, enum.Enum):
    GADM = "GADM"
    OSM = "OSM"
    WIKIDATA = "WIKIDATA"

    def __str__(self) -> str:
        return self.value


SOURCE_ORDER = (Source.GADM, Source.OSM, Source.WIKIDATA)


@dataclass(frozen=True)
class CandidateGeometry:
    source: Source
    matched_name: str
    geometry: BaseGeometry
    external_id: str
    score_or_rank: float = 0.0
    query_context: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class CandidateSet:
    gadm: CandidateGeometry | None = None
    osm: CandidateGeometry | None = None
    wikidata: CandidateGeometry | None = None

    def present(self) -> list[Source]:
        return [s for s, c in zip(SOURCE_ORDER, (self.gadm, self.osm, self.wikidata)) if c]

    def __len__(self) -> int:
        return len(self.present())
