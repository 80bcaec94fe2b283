"""Rule-based offline parser.

A deterministic stand-in for the LLM so the pipeline runs without a model
endpoint. It splits on commas, semicolons and "and", reads parentheses as
enclosing units and uses descriptor words to guess the admin level.
"""
from __future__ import annotations

import re

from geodis.parser.tree import AdminEntry, EmptyParse, LocationTree
from geodis.textnorm import EmptyResult, fold_ascii, normalize_name, strip_parentheticals

ADMIN1_WORDS = frozenset({"province", "state", "region"})
ADMIN2_WORDS = frozenset({"district", "county", "department"})

_SPLIT = re.compile(r"[,;]|\s+and\s+", re.IGNORECASE)
_PLURALS = {
    "provinces": "province", "states": "state", "regions": "region",
    "districts": "district", "counties": "county", "departments": "department",
    "municipalities": "municipality", "villages": "village", "towns": "town",
    "cities": "city", "areas": "area", "communes": "commune",
}
_PLURAL_RE = re.compile(r"\b(" + "|".join(_PLURALS) + r")\b", re.IGNORECASE)


def _singular(text: str) -> str:
    return _PLURAL_RE.sub(lambda m: _PLURALS[m.group(1).lower()], text)


def _level_hint(text: str) -> int | None:
    tokens = set(re.split(r"[^\w'-]+", fold_ascii(text)))
    if tokens & ADMIN1_WORDS:
        return 1
    if tokens & ADMIN2_WORDS:
        return 2
    return None


def _clean(text: str) -> str | None:
    try:
        return normalize_name(text, strip_descriptors=True).text
    except EmptyResult:
        return None


def _split_top_level(location: str) -> list[str]:
    """Split on separators that are not inside parentheses."""
    parts, buf, depth = [], [], 0
    i = 0
    while i < len(location):
        ch = location[i]
        if ch == "(":
            depth += 1
        elif ch == ")" and depth:
            depth -= 1
        if depth == 0:
            m = _SPLIT.match(location, i)
            if m and m.end() > i:
                parts.append("".join(buf))
                buf = []
                i = m.end()
                continue
        buf.append(ch)
        i += 1
    parts.append("".join(buf))
    return parts


def parse_fallback(location: str, country: str = "") -> LocationTree:
    """Parse ``location`` into a tree without any model.

    Raises:
        EmptyParse: nothing usable survives normalization.
    """
    country_key = _clean(country) if country else None
    tree = LocationTree()
    admin1: dict[str, AdminEntry] = {}
    admin2: dict[str, AdminEntry] = {}
    seen: set[tuple[int, int | None, str]] = set()

    def parent_entry(name: str, level: int) -> AdminEntry:
        table = admin1 if level == 1 else admin2
        entry = table.get(name)
        if entry is None:
            entry = AdminEntry(name, level)
            table[name] = entry
            (tree.admin1 if level == 1 else tree.orphans).append(entry)
            seen.add((level, None, name))
        return entry

    raw_parts = _split_top_level(location)
    hints = [_level_hint(_singular(strip_parentheticals(f)[0])) for f in raw_parts]
    # "Sindh and Punjab provinces": a plural descriptor covers the bare names before it
    for i in range(len(raw_parts) - 1, 0, -1):
        if hints[i] is not None and _PLURAL_RE.search(strip_parentheticals(raw_parts[i])[0]):
            j = i - 1
            while j >= 0 and hints[j] is None:
                hints[j] = hints[i]
                j -= 1

    for fragment, hint in zip(raw_parts, hints):
        base, parens = strip_parentheticals(_singular(fragment))
        name = _clean(base)
        if not name or name == country_key:
            continue

        parent = None
        for inner in parens:
            pname = _clean(inner)
            if not pname or pname == country_key:
                continue
            plevel = _level_hint(inner) or 1
            if hint == 1 or plevel >= 3:
                break
            parent = parent_entry(pname, plevel)
            break

        if hint is not None:
            level = hint
        elif parent is not None and parent.level == 2:
            level = 3
        else:
            level = 2
        if parent is not None and level <= parent.level:
            level = parent.level + 1
        level = min(level, 3)

        ident = (level, id(parent) if parent else None, name)
        if ident in seen:
            continue
        seen.add(ident)
        if parent is None and level == 1 and name in admin1:
            continue
        if parent is None and level == 2 and name in admin2:
            continue
        entry = AdminEntry(name, level, parent=parent)
        if parent is not None:
            parent.children.append(entry)
        elif level == 1:
            admin1[name] = entry
            tree.admin1.append(entry)
        else:
            if level == 2:
                admin2[name] = entry
            tree.orphans.append(entry)

    if not tree.locations():
        raise EmptyParse(f"nothing to geocode in {location!r}")
    tree.orphans.sort(key=lambda e: e.level)
    return tree
