"""Compiled scan kernels.

Everything here works on raw numpy arrays so that numba can compile it in
nopython mode. Return times use ``0`` for "no return observed" (censored);
genuine return times are always >= 1.
"""
import numpy as np
from numba import njit

METRIC_INTERVAL = 0
METRIC_CIRCLE = 1


# ---------------------------------------------------------------------------
# orbit reconstruction from codings
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def horner_base(digits, length, window, base):
    """points[j] = sum_{t < window} digits[j + t] * base**-(t + 1)."""
    out = np.zeros(length)
    inv = 1.0 / base
    for j in range(length):
        acc = 0.0
        for t in range(window - 1, -1, -1):
            acc = (acc + digits[j + t]) * inv
        out[j] = acc
    return out


@njit(cache=True, nogil=True)
def horner_branches(symbols, length, window, offsets, inv_slopes):
    """Points of a full-branch piecewise-linear map from branch labels."""
    out = np.zeros(length)
    for j in range(length):
        acc = 0.0
        for t in range(window - 1, -1, -1):
            s = symbols[j + t]
            acc = offsets[s] + acc * inv_slopes[s]
        out[j] = acc
    return out


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _dist(points, i, j, metric):
    best = 0.0
    for c in range(points.shape[1]):
        d = abs(points[i, c] - points[j, c])
        if metric == METRIC_CIRCLE and d > 0.5:
            d = 1.0 - d
        if d > best:
            best = d
    return best


@njit(cache=True, nogil=True)
def distances_from(points, center, metric):
    n = points.shape[0]
    out = np.empty(n)
    for j in range(n):
        out[j] = _dist(points, center, j, metric)
    return out


@njit(cache=True, nogil=True)
def agreement_from(symbols, center, count, cap):
    """Length of the common prefix of symbols[center:] and symbols[j:], capped."""
    out = np.empty(count, dtype=np.int64)
    total = symbols.shape[0]
    for j in range(count):
        u = 0
        while u < cap and j + u < total and center + u < total \
                and symbols[j + u] == symbols[center + u]:
            u += 1
        out[j] = u
    return out


# ---------------------------------------------------------------------------
# dynamical-ball return-time scans
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def profile_geometric(points, metric, eps, n_max, k_max):
    """R[n] for n = 1..n_max in a single pass over k (R[0] unused).

    A candidate k is abandoned as soon as its match length falls short of
    the smallest depth that still lacks a return.
    """
    R = np.zeros(n_max + 1, dtype=np.int64)
    need = 1
    for k in range(1, k_max + 1):
        t = 0
        while t < n_max and _dist(points, k + t, t, metric) < eps:
            t += 1
        if t < need:
            continue
        for n in range(need, t + 1):
            R[n] = k
        need = t + 1
        if need > n_max:
            break
    return R


@njit(cache=True, nogil=True)
def match_lengths_geometric(points, metric, eps, n_max, k_max):
    """ml[k] = largest m <= n_max with d(p[k+t], p[t]) < eps for t < m."""
    ml = np.zeros(k_max + 1, dtype=np.int64)
    ml[0] = n_max
    for k in range(1, k_max + 1):
        t = 0
        while t < n_max and _dist(points, k + t, t, metric) < eps:
            t += 1
        ml[k] = t
    return ml


@njit(cache=True, nogil=True)
def profile_shift(symbols, agree, n_max, k_max):
    """Shift analogue of profile_geometric.

    The ball test at offset t passes iff symbols agree on a block of length
    ``agree`` starting at k + t and t, so the match length at k is the run
    of equal symbols minus ``agree - 1``.
    """
    R = np.zeros(n_max + 1, dtype=np.int64)
    need = 1
    if agree == 0:
        for n in range(1, n_max + 1):
            R[n] = 1 if k_max >= 1 else 0
        return R
    cap = n_max + agree - 1
    for k in range(1, k_max + 1):
        lim = need + agree - 1
        u = 0
        while u < cap and symbols[k + u] == symbols[u]:
            u += 1
        if u < lim:
            continue
        t = u - agree + 1
        for n in range(need, t + 1):
            R[n] = k
        need = t + 1
        if need > n_max:
            break
    return R


@njit(cache=True, nogil=True)
def match_lengths_shift(symbols, agree, n_max, k_max):
    ml = np.zeros(k_max + 1, dtype=np.int64)
    ml[0] = n_max
    if agree == 0:
        for k in range(k_max + 1):
            ml[k] = n_max
        return ml
    cap = n_max + agree - 1
    for k in range(1, k_max + 1):
        u = 0
        while u < cap and symbols[k + u] == symbols[u]:
            u += 1
        t = u - agree + 1
        ml[k] = t if t > 0 else 0
    return ml


@njit(cache=True, nogil=True)
def min_gaps(ml, n_max):
    """S[n] = smallest gap between indices i with ml[i] >= n (0 if none)."""
    last = np.zeros(n_max + 1, dtype=np.int64)
    S = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, ml.shape[0]):
        c = ml[k]
        for n in range(1, c + 1):
            gap = k - last[n]
            if S[n] == 0 or gap < S[n]:
                S[n] = gap
            last[n] = k
    return S


# ---------------------------------------------------------------------------
# string algorithms
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def border_array(word):
    """b[l] = length of the longest proper border of word[:l], b[0] = -1."""
    n = word.shape[0]
    b = np.empty(n + 1, dtype=np.int64)
    b[0] = -1
    for i in range(1, n + 1):
        k = b[i - 1]
        while k >= 0 and word[k] != word[i - 1]:
            k = b[k]
        b[i] = k + 1
    return b


@njit(cache=True, nogil=True)
def kmp_find(text, start, pattern, border):
    """First index >= start where pattern occurs in text, or -1."""
    m = pattern.shape[0]
    q = 0
    for i in range(start, text.shape[0]):
        c = text[i]
        while q >= 0 and (q == m or pattern[q] != c):
            q = border[q]
        q += 1
        if q == m:
            return i - m + 1
    return -1


@njit(cache=True, nogil=True)
def count_cover_words(x_word, n, agree, metric_class, test_class, n_test):
    """Number of test-partition n-words met by the shift dynamical ball.

    Every candidate u in alphabet**n is enumerated; u belongs to the ball's
    projection iff its metric class agrees with x on all n coordinates
    (coordinates n..n+agree-2 of the ball are free to copy x). With
    ``agree == 0`` the ball is the whole space.
    """
    k = metric_class.shape[0]
    total = 1
    for _ in range(n):
        total *= k
    checked = n if agree > 0 else 0
    seen = np.zeros(n_test ** n, dtype=np.bool_)
    count = 0
    for code in range(total):
        rest = code
        ok = True
        key = 0
        for i in range(n):
            s = rest % k
            rest //= k
            if i < checked and metric_class[s] != metric_class[x_word[i]]:
                ok = False
                break
            key = key * n_test + test_class[s]
        if ok and not seen[key]:
            seen[key] = True
            count += 1
    return count


# ---------------------------------------------------------------------------
# metric-ball statistics around one centre
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _record(j, center, level, first, last, gap, count):
    """Register a visit of index j to the balls 0..level-1."""
    for i in range(level):
        if j != center:
            count[i] += 1
        if j > center and first[i] == 0:
            first[i] = j - center
        if last[i] >= 0:
            g = j - last[i]
            if gap[i] == 0 or g < gap[i]:
                gap[i] = g
        last[i] = j


@njit(cache=True, nogil=True)
def ball_scan_geometric(points, metric, center, radii_desc, first_only):
    """First return after ``center``, minimal gap between visits and visit
    count (centre excluded) for every radius, in one pass.

    With ``first_only`` the scan starts at the centre and stops once the
    smallest ball has been revisited; gaps and counts are then partial.
    """
    nr = radii_desc.shape[0]
    first = np.zeros(nr, dtype=np.int64)
    gap = np.zeros(nr, dtype=np.int64)
    count = np.zeros(nr, dtype=np.int64)
    last = np.full(nr, -1, dtype=np.int64)
    start = center if first_only else 0
    for j in range(start, points.shape[0]):
        d = _dist(points, center, j, metric)
        level = 0
        while level < nr and d < radii_desc[level]:
            level += 1
        if level:
            _record(j, center, level, first, last, gap, count)
            if first_only and first[nr - 1] != 0:
                break
    return first, gap, count


@njit(cache=True, nogil=True)
def ball_scan_shift(symbols, length, center, agree_asc, first_only):
    """Shift version: radius i holds j iff the first agree_asc[i] symbols of
    positions j and center coincide."""
    nr = agree_asc.shape[0]
    cap = agree_asc[nr - 1]
    first = np.zeros(nr, dtype=np.int64)
    gap = np.zeros(nr, dtype=np.int64)
    count = np.zeros(nr, dtype=np.int64)
    last = np.full(nr, -1, dtype=np.int64)
    start = center if first_only else 0
    for j in range(start, length):
        u = 0
        while u < cap and symbols[j + u] == symbols[center + u]:
            u += 1
        level = 0
        while level < nr and agree_asc[level] <= u:
            level += 1
        if level:
            _record(j, center, level, first, last, gap, count)
            if first_only and first[nr - 1] != 0:
                break
    return first, gap, count
