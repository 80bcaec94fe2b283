# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pyfuzz``.

The LCS kernel runs the same bit-parallel recurrence over arrays of 64-bit
words, so strings of any length are supported. Composite scorers are kept
line-for-line with the Python module; both must agree bit for bit.
"""
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free, calloc

cdef double UNBASE_SCALE = 0.95


cdef struct Pattern:
    Py_ssize_t n
    Py_ssize_t words
    Py_ssize_t nchars
    Py_UCS4* chars
    uint64_t* masks     # nchars * words


cdef int pattern_init(Pattern* p, str s) except -1:
    cdef Py_ssize_t n = len(s), i, k, w
    cdef Py_UCS4 ch
    p.n = n
    p.words = (n + 63) // 64 if n else 1
    p.nchars = 0
    p.chars = <Py_UCS4*>malloc((n if n else 1) * sizeof(Py_UCS4))
    p.masks = <uint64_t*>calloc((n if n else 1) * p.words, sizeof(uint64_t))
    if p.chars == NULL or p.masks == NULL:
        free(p.chars)
        free(p.masks)
        raise MemoryError()
    for i in range(n):
        ch = s[i]
        k = 0
        while k < p.nchars and p.chars[k] != ch:
            k += 1
        if k == p.nchars:
            p.chars[k] = ch
            p.nchars += 1
        w = i >> 6
        p.masks[k * p.words + w] |= (<uint64_t>1) << (i & 63)
    return 0


cdef void pattern_free(Pattern* p):
    free(p.chars)
    free(p.masks)


cdef inline Py_ssize_t pattern_find(Pattern* p, Py_UCS4 ch) nogil:
    cdef Py_ssize_t k
    for k in range(p.nchars):
        if p.chars[k] == ch:
            return k
    return -1


cdef inline int popcount64(uint64_t x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef Py_ssize_t lcs_pattern(Pattern* p, str text, Py_ssize_t start, Py_ssize_t stop, uint64_t* v) except -1:
    """LCS of the pattern against text[start:stop]; ``v`` is scratch of p.words."""
    cdef Py_ssize_t n = p.n, words = p.words, w, j, k, zeros
    cdef uint64_t u, m, x, carry, borrow, s, s2, d, d2, lastmask
    cdef bint c1, c2, b1, b2
    if n == 0 or stop <= start:
        return 0
    for w in range(words):
        v[w] = ~(<uint64_t>0)
    if n & 63:
        lastmask = ((<uint64_t>1) << (n & 63)) - 1
    else:
        lastmask = ~(<uint64_t>0)
    v[words - 1] &= lastmask
    for j in range(start, stop):
        k = pattern_find(p, text[j])
        if k < 0:
            continue
        carry = 0
        borrow = 0
        for w in range(words):
            m = p.masks[k * words + w]
            x = v[w]
            u = x & m
            # x + u with carry
            s = x + u
            c1 = s < x
            s2 = s + carry
            c2 = s2 < s
            # x - u with borrow
            d = x - u
            b1 = d > x
            d2 = d - borrow
            b2 = d2 > d
            v[w] = s2 | d2
            carry = 1 if (c1 or c2) else 0
            borrow = 1 if (b1 or b2) else 0
        v[words - 1] &= lastmask
    zeros = 0
    for w in range(words):
        zeros += popcount64(v[w])
    return n - zeros


cdef inline double norm(Py_ssize_t dist, Py_ssize_t lensum):
    if lensum == 0:
        return 100.0
    return 100.0 * (1.0 - (<double>dist) / (<double>lensum))


cpdef Py_ssize_t lcs_length(str s1, str s2) except -1:
    cdef Pattern p
    cdef uint64_t* v
    cdef Py_ssize_t r
    pattern_init(&p, s1)
    v = <uint64_t*>malloc(p.words * sizeof(uint64_t))
    try:
        r = lcs_pattern(&p, s2, 0, len(s2), v)
    finally:
        free(v)
        pattern_free(&p)
    return r


cpdef Py_ssize_t indel_distance(str s1, str s2) except -1:
    return len(s1) + len(s2) - 2 * lcs_length(s1, s2)


cpdef double ratio(str s1, str s2) except -1:
    return norm(indel_distance(s1, s2), len(s1) + len(s2))


cdef double partial_one_way(str short, str long) except -1:
    cdef Pattern p
    cdef uint64_t* v
    cdef Py_ssize_t n = len(short), m = len(long), i, lcs, lensum
    cdef double best = 0.0, sc
    pattern_init(&p, short)
    v = <uint64_t*>malloc(p.words * sizeof(uint64_t))
    try:
        for i in range(1, n):
            if pattern_find(&p, long[i - 1]) >= 0:
                lcs = lcs_pattern(&p, long, 0, i, v)
                lensum = n + i
                sc = norm(lensum - 2 * lcs, lensum)
                if sc > best:
                    best = sc
        for i in range(m - n + 1):
            if pattern_find(&p, long[i + n - 1]) >= 0:
                lcs = lcs_pattern(&p, long, i, i + n, v)
                lensum = n + n
                sc = norm(lensum - 2 * lcs, lensum)
                if sc > best:
                    best = sc
        for i in range(m - n + 1, m):
            if pattern_find(&p, long[i]) >= 0:
                lcs = lcs_pattern(&p, long, i, m, v)
                lensum = n + (m - i)
                sc = norm(lensum - 2 * lcs, lensum)
                if sc > best:
                    best = sc
    finally:
        free(v)
        pattern_free(&p)
    return best


cpdef double partial_ratio(str s1, str s2) except -1:
    cdef double best
    if not s1 or not s2:
        return 100.0 if (not s1 and not s2) else 0.0
    if len(s1) > len(s2):
        s1, s2 = s2, s1
    best = partial_one_way(s1, s2)
    if best != 100.0 and len(s1) == len(s2):
        best = max(best, partial_one_way(s2, s1))
    return best


cdef str sorted_join(tokens):
    return " ".join(sorted(tokens))


cpdef double token_sort_ratio(str s1, str s2) except -1:
    return ratio(sorted_join(s1.split()), sorted_join(s2.split()))


cpdef double token_set_ratio(str s1, str s2) except -1:
    cdef set a = set(s1.split()), b = set(s2.split())
    cdef Py_ssize_t sect_len, sep, sect_ab, sect_ba
    cdef double result
    if not a or not b:
        return 0.0
    sect = a & b
    ab = a - b
    ba = b - a
    if sect and (not ab or not ba):
        return 100.0
    ab_j = sorted_join(ab)
    ba_j = sorted_join(ba)
    sect_len = len(sorted_join(sect))
    sep = 1 if sect_len else 0
    sect_ab = sect_len + sep + len(ab_j)
    sect_ba = sect_len + sep + len(ba_j)
    result = norm(indel_distance(ab_j, ba_j), sect_ab + sect_ba)
    if not sect_len:
        return result
    return max(
        result,
        norm(sep + len(ab_j), sect_len + sect_ab),
        norm(sep + len(ba_j), sect_len + sect_ba),
    )


cpdef double partial_token_sort_ratio(str s1, str s2) except -1:
    return partial_ratio(sorted_join(s1.split()), sorted_join(s2.split()))


cpdef double partial_token_set_ratio(str s1, str s2) except -1:
    cdef set a = set(s1.split()), b = set(s2.split())
    if not a or not b:
        return 0.0
    if a & b:
        return 100.0
    return partial_ratio(sorted_join(a - b), sorted_join(b - a))


cpdef double wratio(str s1, str s2) except -1:
    cdef Py_ssize_t len1, len2
    cdef double len_ratio, end, scale
    if not s1 or not s2:
        return 0.0
    len1 = len(s1)
    len2 = len(s2)
    len_ratio = (<double>len1) / len2 if len1 > len2 else (<double>len2) / len1
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


def extract_best(str query, list choices, double cutoff=0.0):
    """Index and score of the first highest-scoring choice, (-1, 0.0) if none reach cutoff."""
    cdef Py_ssize_t i, best_i = -1
    cdef double best = 0.0, score
    for i in range(len(choices)):
        score = wratio(query, choices[i])
        if score >= cutoff and (best_i < 0 or score > best):
            best_i = i
            best = score
    return best_i, best


def score_all(str query, list choices):
    return [wratio(query, c) for c in choices]
