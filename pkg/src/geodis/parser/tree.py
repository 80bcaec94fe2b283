"""Hierarchical parse result and its JSON form.

The JSON form has exactly the keys ``Admin1``, ``Admin2`` and ``Admin3``.
Admin1 entries are plain names; finer entries are ``{"name", "parent"}``
objects whose parent names an entry one (or, for Admin3, two) levels up.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

from geodis.textnorm import EmptyResult, normalize

LEVEL_KEYS = ("Admin1", "Admin2", "Admin3")


class ParseError(Exception):
    pass


class SchemaViolation(ParseError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class EmptyParse(ParseError):
    """Well-formed output that names no location at all."""


@dataclass(eq=False)
class AdminEntry:
    name: str
    level: int
    parent: AdminEntry | None = None
    children: list[AdminEntry] = field(default_factory=list)
    # parent named in the input but not present in the tree
    parent_hint: str | None = None

    @property
    def key(self) -> str:
        return normalize(self.name)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def ancestors(self) -> list[AdminEntry]:
        """Parents from nearest to farthest."""
        out = []
        node = self.parent
        while node is not None:
            out.append(node)
            node = node.parent
        return out

    def context_names(self) -> list[str]:
        names = [a.name for a in self.ancestors()]
        if not names and self.parent_hint:
            names = [self.parent_hint]
        return names

    def __repr__(self) -> str:
        parent = self.parent.name if self.parent else self.parent_hint
        return f"AdminEntry({self.name!r}, level={self.level}, parent={parent!r})"


@dataclass(eq=False)
class LocationTree:
    admin1: list[AdminEntry] = field(default_factory=list)
    orphans: list[AdminEntry] = field(default_factory=list)

    def walk(self) -> Iterator[AdminEntry]:
        """Depth-first, parents before children, orphan subtrees last."""
        stack = list(reversed(self.admin1 + self.orphans))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def locations(self) -> list[AdminEntry]:
        """Entries to geocode: the leaves. Entries with children act as context."""
        return [e for e in self.walk() if e.is_leaf]

    def __len__(self) -> int:
        return sum(1 for _ in self.walk())

    def to_json(self) -> dict[str, list]:
        out: dict[str, list] = {k: [] for k in LEVEL_KEYS}
        for entry in self.walk():
            key = LEVEL_KEYS[entry.level - 1]
            if entry.level == 1:
                out[key].append(entry.name)
            else:
                parent = entry.parent.name if entry.parent else entry.parent_hint
                out[key].append({"name": entry.name, "parent": parent})
        return out

    def signature(self) -> list:
        """Structure as nested tuples; equal trees have equal signatures."""
        def sig(e: AdminEntry):
            return (e.name, e.level, e.parent_hint, tuple(sig(c) for c in e.children))
        return [tuple(sig(e) for e in self.admin1), tuple(sig(e) for e in self.orphans)]


def _entry_fields(value: Any, path: str, level: int) -> tuple[str, str | None]:
    if isinstance(value, str):
        name, parent = value, None
    elif isinstance(value, dict):
        extra = set(value) - {"name", "parent"}
        if extra:
            raise SchemaViolation(f"{path}.{sorted(extra)[0]}", "unexpected field")
        name = value.get("name")
        parent = value.get("parent")
        if not isinstance(name, str):
            raise SchemaViolation(f"{path}.name", "must be a string")
        if parent is not None and not isinstance(parent, str):
            raise SchemaViolation(f"{path}.parent", "must be a string or null")
        if level == 1 and parent:
            raise SchemaViolation(f"{path}.parent", "Admin1 entries take no parent")
    else:
        raise SchemaViolation(path, f"entry must be a name or object, got {type(value).__name__}")
    name = name.strip()
    try:
        normalize(name)
    except EmptyResult:
        raise SchemaViolation(path, "empty name") from None
    parent = parent.strip() if parent else None
    return name, parent or None


def validate_tree(value: Any) -> LocationTree:
    """Check a decoded JSON value and link it into a :class:`LocationTree`.

    Raises:
        SchemaViolation: with the path of the first offending element.
    """
    if not isinstance(value, dict):
        raise SchemaViolation("$", "top level must be an object")
    for key in value:
        if key not in LEVEL_KEYS:
            raise SchemaViolation(key, "only Admin1, Admin2 and Admin3 are allowed")
    for key in LEVEL_KEYS:
        if key in value and not isinstance(value[key], list):
            raise SchemaViolation(key, "must be a list")

    tree = LocationTree()
    by_level: dict[int, dict[tuple[str | None, str], AdminEntry]] = {1: {}, 2: {}, 3: {}}

    def find(level: int, name: str) -> AdminEntry | None:
        want = normalize(name)
        for (_, key), entry in by_level[level].items():
            if key == want:
                return entry
        return None

    for level, key in enumerate(LEVEL_KEYS, start=1):
        for i, raw in enumerate(value.get(key, [])):
            name, parent_name = _entry_fields(raw, f"{key}[{i}]", level)
            parent = None
            if parent_name is not None:
                for up in range(level - 1, 0, -1):
                    parent = find(up, parent_name)
                    if parent is not None:
                        break
            ident = (id(parent) if parent else parent_name, normalize(name))
            if ident in by_level[level]:
                continue
            entry = AdminEntry(name, level, parent=parent,
                               parent_hint=None if parent else parent_name)
            by_level[level][ident] = entry
            if parent is not None:
                parent.children.append(entry)
            elif level == 1:
                tree.admin1.append(entry)
            else:
                tree.orphans.append(entry)
    return tree
