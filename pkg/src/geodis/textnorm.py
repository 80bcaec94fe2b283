"""Deterministic clean-up of raw place-name strings.

Every string that reaches a matcher or a remote query goes through
:func:`normalize_name` first, so that "São Paulo (Brazil)", "SAO PAULO" and
"sao paulo" all land on the same key.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable

DESCRIPTORS = frozenset({
    "region", "district", "province", "state", "county", "municipality",
    "department", "prefecture", "governorate", "city", "town", "village",
    "area", "commune", "canton", "island", "islands",
})
CONNECTORS = frozenset({"of", "de", "du", "da", "del", "di", "la", "le"})

# Letters that NFKD leaves intact but which have a conventional ASCII form.
_TRANSLIT = str.maketrans({
    "ð": "d", "đ": "d", "þ": "th", "ł": "l", "ø": "o", "ß": "ss", "æ": "ae",
    "œ": "oe", "ı": "i", "ħ": "h", "ŀ": "l", "ŧ": "t", "ŋ": "n", "ĸ": "k",
    "’": "'", "‘": "'", "ʼ": "'", "ʻ": "'", "`": "'",
    "´": "'", "‐": "-", "‑": "-", "‒": "-", "–": "-",
    "\u2014": "-",
})
_PUNCT = re.compile(r"[^\w\s'-]|_", re.UNICODE)
_SPACES = re.compile(r"\s+")


class EmptyResult(ValueError):
    """Raised when a name normalizes to nothing and must be skipped."""


@dataclass(frozen=True)
class NormalizedName:
    text: str
    parentheticals: tuple[str, ...] = field(default_factory=tuple)

    def __str__(self) -> str:
        return self.text


def strip_parentheticals(raw: str) -> tuple[str, list[str]]:
    """Split balanced ``(...)`` spans out of ``raw``.

    Returns the remaining text (ends trimmed, inner spacing untouched) and the
    inner text of each top-level span in order. Parentheses without a partner
    stay in the base string as literal characters.

    >>> strip_parentheticals("Abra (Cordillera)")
    ('Abra', ['Cordillera'])
    """
    spans: list[tuple[int, int]] = []
    opens: list[int] = []
    for i, ch in enumerate(raw):
        if ch == "(":
            opens.append(i)
        elif ch == ")" and opens:
            start = opens.pop()
            if not opens:
                spans.append((start, i))
    # A "(" that never closed may have swallowed nested closed spans; those
    # were recorded only if they reached depth zero, which is what we want.
    base_parts: list[str] = []
    inner: list[str] = []
    pos = 0
    for start, end in spans:
        base_parts.append(raw[pos:start])
        inner.append(raw[start + 1:end].strip())
        pos = end + 1
    base_parts.append(raw[pos:])
    return "".join(base_parts).strip(), inner


def fold_ascii(text: str) -> str:
    """Casefold, strip combining marks and transliterate common letters."""
    text = unicodedata.normalize("NFKD", text.casefold())
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    text = text.translate(_TRANSLIT)
    # casefold/NFKD can interact (e.g. compatibility forms), settle once more
    text = unicodedata.normalize("NFKD", text.casefold())
    return "".join(ch for ch in text if not unicodedata.combining(ch))


def _clean(text: str) -> str:
    text = fold_ascii(text)
    text = text.replace("(", " ").replace(")", " ")
    text = _PUNCT.sub(" ", text)
    return _SPACES.sub(" ", text).strip()


def drop_descriptors(
    tokens: list[str],
    descriptors: Iterable[str] = DESCRIPTORS,
    connectors: Iterable[str] = CONNECTORS,
) -> list[str]:
    """Drop descriptor tokens and connectors touching them.

    Returns ``tokens`` unchanged when stripping would leave nothing.
    """
    descriptors = frozenset(descriptors)
    connectors = frozenset(connectors)
    drop = [tok in descriptors for tok in tokens]
    for i, tok in enumerate(tokens):
        if tok in connectors and not drop[i]:
            left = i > 0 and tokens[i - 1] in descriptors
            right = i + 1 < len(tokens) and tokens[i + 1] in descriptors
            if left or right:
                drop[i] = True
    kept = [tok for tok, d in zip(tokens, drop) if not d]
    return kept if kept else list(tokens)


def normalize_name(
    raw: str,
    strip_descriptors: bool = False,
    descriptors: Iterable[str] = DESCRIPTORS,
    connectors: Iterable[str] = CONNECTORS,
) -> NormalizedName:
    """Normalize a place name for matching.

    Args:
        raw: arbitrary Unicode place name.
        strip_descriptors: remove generic descriptors such as "province".
        descriptors: descriptor lexicon, overridable from config.
        connectors: connector words removed next to a dropped descriptor.

    Raises:
        EmptyResult: the input has no usable characters.
    """
    base, inner = strip_parentheticals(raw)
    text = _clean(base)
    if not text:
        raise EmptyResult(f"name normalizes to empty: {raw!r}")
    if strip_descriptors:
        text = " ".join(drop_descriptors(text.split(" "), descriptors, connectors))
    parens = tuple(p for p in (s.strip() for s in inner) if p)
    return NormalizedName(text, parens)


def normalize(raw: str, strip: bool = True) -> str:
    """Shorthand returning only the normalized text."""
    return normalize_name(raw, strip).text
