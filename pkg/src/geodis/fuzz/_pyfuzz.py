"""Pure-Python fuzzy scorers.

Indel similarity is computed from the LCS length using the bit-parallel
recurrence of Allison-Dix/Hyyro, with Python ints as arbitrary-width bit
vectors. The compiled backend in ``_cfuzz.pyx`` mirrors this module
function for function and must return bit-identical floats.
"""
from __future__ import annotations

UNBASE_SCALE = 0.95


def _masks(pattern: str) -> dict[str, int]:
    masks: dict[str, int] = {}
    bit = 1
    for ch in pattern:
        masks[ch] = masks.get(ch, 0) | bit
        bit <<= 1
    return masks


def _lcs_masks(masks: dict[str, int], n: int, text: str) -> int:
    if not n or not text:
        return 0
    full = (1 << n) - 1
    v = full
    get = masks.get
    for ch in text:
        u = v & get(ch, 0)
        v = ((v + u) | (v - u)) & full
    return n - v.bit_count()


def lcs_length(s1: str, s2: str) -> int:
    return _lcs_masks(_masks(s1), len(s1), s2)


def indel_distance(s1: str, s2: str) -> int:
    return len(s1) + len(s2) - 2 * lcs_length(s1, s2)


def _norm(dist: int, lensum: int) -> float:
    if not lensum:
        return 100.0
    return 100.0 * (1.0 - dist / lensum)


def ratio(s1: str, s2: str) -> float:
    return _norm(indel_distance(s1, s2), len(s1) + len(s2))


def _partial_one_way(short: str, long: str) -> float:
    n = len(short)
    m = len(long)
    masks = _masks(short)
    chars = masks.keys()
    best = 0.0

    def window(sub: str) -> float:
        lcs = _lcs_masks(masks, n, sub)
        lensum = n + len(sub)
        return _norm(lensum - 2 * lcs, lensum)

    # windows whose outer character cannot match are dominated by a neighbour
    for i in range(1, n):
        if long[i - 1] in chars:
            best = max(best, window(long[:i]))
    for i in range(m - n + 1):
        if long[i + n - 1] in chars:
            best = max(best, window(long[i:i + n]))
    for i in range(m - n + 1, m):
        if long[i] in chars:
            best = max(best, window(long[i:]))
    return best


def partial_ratio(s1: str, s2: str) -> float:
    if not s1 or not s2:
        return 100.0 if not s1 and not s2 else 0.0
    if len(s1) > len(s2):
        s1, s2 = s2, s1
    best = _partial_one_way(s1, s2)
    if best != 100.0 and len(s1) == len(s2):
        best = max(best, _partial_one_way(s2, s1))
    return best


def _sorted_join(tokens) -> str:
    return " ".join(sorted(tokens))


def token_sort_ratio(s1: str, s2: str) -> float:
    return ratio(_sorted_join(s1.split()), _sorted_join(s2.split()))


def token_set_ratio(s1: str, s2: str) -> float:
    a = set(s1.split())
    b = set(s2.split())
    if not a or not b:
        return 0.0
    sect = a & b
    ab = a - b
    ba = b - a
    if sect and (not ab or not ba):
        return 100.0
    ab_j = _sorted_join(ab)
    ba_j = _sorted_join(ba)
    sect_len = len(_sorted_join(sect))
    sep = 1 if sect_len else 0
    sect_ab = sect_len + sep + len(ab_j)
    sect_ba = sect_len + sep + len(ba_j)
    result = _norm(indel_distance(ab_j, ba_j), sect_ab + sect_ba)
    if not sect_len:
        return result
    return max(
        result,
        _norm(sep + len(ab_j), sect_len + sect_ab),
        _norm(sep + len(ba_j), sect_len + sect_ba),
    )


def partial_token_sort_ratio(s1: str, s2: str) -> float:
    return partial_ratio(_sorted_join(s1.split()), _sorted_join(s2.split()))


def partial_token_set_ratio(s1: str, s2: str) -> float:
    a = set(s1.split())
    b = set(s2.split())
    if not a or not b:
        return 0.0
    if a & b:
        return 100.0
    return partial_ratio(_sorted_join(a - b), _sorted_join(b - a))


def wratio(s1: str, s2: str) -> float:
    if not s1 or not s2:
        return 0.0
    len1 = len(s1)
    len2 = len(s2)
    len_ratio = len1 / len2 if len1 > len2 else len2 / len1
    end = ratio(s1, s2)
    if len_ratio < 1.5:
        return max(
            end,
            token_sort_ratio(s1, s2) * UNBASE_SCALE,
            token_set_ratio(s1, s2) * UNBASE_SCALE,
        )
    scale = 0.9 if len_ratio < 8.0 else 0.6
    return max(
        end,
        partial_ratio(s1, s2) * scale,
        partial_token_sort_ratio(s1, s2) * UNBASE_SCALE * scale,
        partial_token_set_ratio(s1, s2) * UNBASE_SCALE * scale,
    )


def extract_best(query: str, choices: list[str], cutoff: float = 0.0) -> tuple[int, float]:
    """Index and score of the first highest-scoring choice, (-1, 0.0) if none reach cutoff."""
    best_i = -1
    best = 0.0
    for i, choice in enumerate(choices):
        score = wratio(query, choice)
        if score >= cutoff and (best_i < 0 or score > best):
            best_i = i
            best = score
    return best_i, best


def score_all(query: str, choices: list[str]) -> list[float]:
    return [wratio(query, c) for c in choices]
