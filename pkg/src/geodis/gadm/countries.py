"""EM-DAT country names to ISO3 codes."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Mapping

from geodis.textnorm import EmptyResult, normalize


class UnknownCountry(KeyError):
    def __str__(self) -> str:
        return f"unknown country: {self.args[0]!r}"


def _key(name: str) -> str:
    return normalize(name, strip=False)


class CountryTable:
    """Case-, accent- and parenthesis-insensitive name lookup.

    Accepts ISO3 codes as well as names.
    """

    def __init__(self, aliases: Mapping[str, str]):
        self._by_key: dict[str, str] = {}
        self._codes: set[str] = set()
        for name, iso in aliases.items():
            iso = iso.upper()
            self._codes.add(iso)
            try:
                self._by_key[_key(name)] = iso
            except EmptyResult:
                continue

    @classmethod
    def default(cls, extra: str | Path | Mapping[str, str] | None = None) -> CountryTable:
        text = resources.files("geodis").joinpath("data/country_aliases.json").read_text("utf-8")
        aliases = json.loads(text)
        if isinstance(extra, (str, Path)):
            aliases.update(json.loads(Path(extra).read_text("utf-8")))
        elif extra:
            aliases.update(extra)
        return cls(aliases)

    def resolve(self, name: str) -> str:
        """ISO3 code for ``name``.

        Raises:
            UnknownCountry: not a known name or code.
        """
        text = (name or "").strip()
        if len(text) == 3 and text.upper() in self._codes:
            return text.upper()
        try:
            return self._by_key[_key(text)]
        except (KeyError, EmptyResult):
            raise UnknownCountry(name) from None

    def same_country(self, a: str, b: str) -> bool:
        """Whether two country names denote one country (falls back to text equality)."""
        try:
            return self.resolve(a) == self.resolve(b)
        except UnknownCountry:
            try:
                return _key(a) == _key(b)
            except EmptyResult:
                return False

    def __contains__(self, name: str) -> bool:
        try:
            self.resolve(name)
        except UnknownCountry:
            return False
        return True


DEFAULT_COUNTRIES = CountryTable.default()
