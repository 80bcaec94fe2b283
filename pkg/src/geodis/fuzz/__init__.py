"""Fuzzy string scoring with a compiled kernel and a pure-Python fallback.

The compiled backend is used when it imports; set ``GEODIS_PURE_PYTHON=1``
to force the fallback. Both expose the same functions and return identical
floats.
"""
from __future__ import annotations

import os

from geodis.fuzz import _pyfuzz

_backend = _pyfuzz
BACKEND = "python"
if not os.environ.get("GEODIS_PURE_PYTHON"):
    try:
        from geodis.fuzz import _cfuzz as _backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

lcs_length = _backend.lcs_length
indel_distance = _backend.indel_distance
ratio = _backend.ratio
partial_ratio = _backend.partial_ratio
token_sort_ratio = _backend.token_sort_ratio
token_set_ratio = _backend.token_set_ratio
partial_token_sort_ratio = _backend.partial_token_sort_ratio
partial_token_set_ratio = _backend.partial_token_set_ratio
wratio = _backend.wratio
extract_best = _backend.extract_best
score_all = _backend.score_all

__all__ = [
    "BACKEND", "lcs_length", "indel_distance", "ratio", "partial_ratio",
    "token_sort_ratio", "token_set_ratio", "partial_token_sort_ratio",
    "partial_token_set_ratio", "wratio", "extract_best", "score_all",
]
