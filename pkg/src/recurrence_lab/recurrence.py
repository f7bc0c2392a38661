"""Return times to dynamical balls, metric balls and partition cylinders.

All ball tests use the strict inequality ``d < eps``. Return times are
positive integers; :data:`CENSORED` (``0``) marks "no return observed within
the orbit".

On the full shift with ``d(x, y) = 2**-t(x, y)`` a ball of radius ``eps``
is a cylinder: ``d(x, y) < eps`` iff x and y agree on the first
:func:`agreement_length` symbols, so the dynamical ball B(x, n, 2**-m) is the
cylinder of length ``n + m``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import ResourceLimitError, WindowExceededError
from .systems import OrbitBuffer, SymbolicWord, SystemSpec

CENSORED = 0

#: upper bound on exhaustive enumeration in :func:`cylinder_cover_count`
MAX_ENUMERATION = 1 << 24


@dataclass(frozen=True)
class BallParams:
    n: int
    eps: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("ball depth n must be a positive integer")
        if not self.eps > 0:
            raise ValueError("ball radius eps must be positive")


@dataclass(frozen=True)
class CoverLemmaParams:
    alpha: float
    gamma: float
    eps: float
    partition_size: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not self.eps > 0 or self.partition_size < 1:
            raise ValueError("eps must be positive and the partition non-empty")


def agreement_length(eps: float) -> int:
    """Smallest t with 2**-t < eps (0 when eps > 1: the ball is everything)."""
    if eps > 1.0:
        return 0
    t = max(0, math.floor(-math.log2(eps)))
    while 2.0 ** -t >= eps:
        t += 1
    while t > 0 and 2.0 ** -(t - 1) < eps:
        t -= 1
    return t


def _ball_span(n: int, agree: int) -> int:
    """Number of leading symbols fixed by a shift dynamical ball."""
    return n + agree - 1 if agree > 0 else 0


def _scan_limit(orb: OrbitBuffer, n_max: int, agree: int = 0) -> int:
    """Largest start index k at which a depth-n_max ball test is readable."""
    if not orb.is_symbolic:
        return orb.L - n_max
    avail = orb.symbols.shape[0] - _ball_span(n_max, agree)
    if avail < 0:
        raise WindowExceededError(
            f"depth {n_max} at this radius needs {_ball_span(n_max, agree)} "
            f"symbols, orbit holds {orb.symbols.shape[0]}")
    return min(orb.L - 1, avail)


# ---------------------------------------------------------------------------
# dynamical balls
# ---------------------------------------------------------------------------

def dyn_ball_contains(orb: OrbitBuffer, i: int, j: int, p: BallParams) -> bool:
    """Whether orbit point j lies in the dynamical ball B(points[i], n, eps)."""
    for idx in (i, j):
        if idx < 0 or idx + p.n > orb.L:
            raise IndexError(f"index {idx} with depth {p.n} exceeds orbit length {orb.L}")
    if i == j:
        return True
    if orb.is_symbolic:
        span = _ball_span(p.n, agreement_length(p.eps))
        s = orb.symbols
        if max(i, j) + span > s.shape[0]:
            raise WindowExceededError("ball test reads past the symbol window")
        return bool(np.array_equal(s[i:i + span], s[j:j + span]))
    a, b = orb.points[i:i + p.n], orb.points[j:j + p.n]
    d = np.abs(a - b)
    if orb.metric_code == _kernels.METRIC_CIRCLE:
        d = np.minimum(d, 1.0 - d)
    return bool(np.all(d.max(axis=1) < p.eps))


def return_time_profile(orb: OrbitBuffer, eps: float, n_max: int) -> np.ndarray:
    """R_n(x, eps) for n = 1..n_max; entry n-1 holds R_n.

    One pass over the candidate return times k; a candidate is dropped as
    soon as its match length falls short of the shallowest depth that is
    still unresolved. Unresolved depths are :data:`CENSORED`.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if orb.is_symbolic:
        agree = agreement_length(eps)
        k_max = _scan_limit(orb, n_max, agree)
        R = _kernels.profile_shift(orb.symbols, agree, n_max, k_max)
    else:
        k_max = _scan_limit(orb, n_max)
        if k_max < 1:
            raise ValueError(f"orbit of length {orb.L} too short for depth {n_max}")
        R = _kernels.profile_geometric(orb.points, orb.metric_code, float(eps),
                                       n_max, k_max)
    return R[1:]


def match_lengths(orb: OrbitBuffer, eps: float, n_max: int) -> np.ndarray:
    """ml[k] = largest m <= n_max with points k..k+m-1 shadowing 0..m-1."""
    if orb.is_symbolic:
        agree = agreement_length(eps)
        return _kernels.match_lengths_shift(orb.symbols, agree, n_max,
                                            _scan_limit(orb, n_max, agree))
    return _kernels.match_lengths_geometric(orb.points, orb.metric_code,
                                            float(eps), n_max, _scan_limit(orb, n_max))


def min_return_time_empirical(orb: OrbitBuffer, p: BallParams) -> int:
    """Smallest gap between two orbit points that both lie in B(x, n, eps).

    This only sees orbit points, so it is an observable upper bound on the
    minimal return time S_n(x, eps), never a lower one.
    """
    ml = match_lengths(orb, p.eps, p.n)
    return int(_kernels.min_gaps(ml, p.n)[p.n])


def minimal_periods(word) -> np.ndarray:
    """Minimal period of every prefix: entry l-1 is p(word[:l])."""
    w = _as_array(word)
    b = _kernels.border_array(w)
    lengths = np.arange(1, w.shape[0] + 1)
    return lengths - b[1:]


def min_return_time_symbolic(w: SymbolicWord) -> int:
    """Minimal period of ``w`` via its border (failure) function, O(len(w)).

    On the full shift this is min{k >= 1 : sigma^-k [w] meets [w]}, the
    minimal return time of the cylinder [w].
    """
    arr = _as_array(w)
    if arr.shape[0] == 0:
        raise ValueError("empty word")
    b = _kernels.border_array(arr)
    return int(arr.shape[0] - b[-1])


def _as_array(w) -> np.ndarray:
    if isinstance(w, SymbolicWord):
        return w.symbols
    return np.ascontiguousarray(w)


# ---------------------------------------------------------------------------
# metric balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallStatistics:
    """Visits of an orbit to metric balls B(points[center], r), per radius.

    ``first_return``: first k >= 1 with points[center + k] in the ball;
    ``min_gap``: smallest gap between two visits (the centre counts as a
    visit); ``count``: visits other than the centre itself. Return times are
    :data:`CENSORED` when not observed.
    """

    radii: tuple
    first_return: np.ndarray
    min_gap: np.ndarray
    count: np.ndarray


def _ball_scan(orb: OrbitBuffer, radii, center: int, first_only: bool):
    radii = tuple(float(r) for r in radii)
    if not radii or any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if not 0 <= center < orb.L:
        raise IndexError(f"centre {center} outside the orbit")
    order = np.argsort(radii, kind="stable")[::-1]
    r_desc = np.array(radii)[order]
    if orb.is_symbolic:
        agree = np.array([agreement_length(r) for r in r_desc], dtype=np.int64)
        need = orb.L - 1 + int(agree[-1])
        if orb.symbols.shape[0] < need:
            raise WindowExceededError(
                f"radius {r_desc[-1]} needs {need} symbols, orbit holds "
                f"{orb.symbols.shape[0]}")
        out = _kernels.ball_scan_shift(orb.symbols, orb.L, center, agree, first_only)
    else:
        out = _kernels.ball_scan_geometric(orb.points, orb.metric_code, center,
                                           r_desc, first_only)
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return radii, tuple(a[inv] for a in out)


def ball_statistics(orb: OrbitBuffer, radii, center: int = 0) -> BallStatistics:
    """One pass over the orbit collecting every metric-ball observable."""
    radii, (first, gap, count) = _ball_scan(orb, radii, center, False)
    return BallStatistics(radii, first, gap, count)


def ball_return_times(orb: OrbitBuffer, radii, center: int = 0) -> np.ndarray:
    """First k >= 1 with points[center + k] in B(points[center], r), per radius.

    The scan stops as soon as the smallest ball has been revisited.
    """
    return _ball_scan(orb, radii, center, True)[1][0]


def ball_return_time(orb: OrbitBuffer, r: float) -> int:
    """First k >= 1 with d(points[k], points[0]) < r."""
    return int(ball_return_times(orb, [r])[0])


def ball_min_return_empirical(orb: OrbitBuffer, r: float) -> int:
    """Smallest gap between two visits of the orbit to B(points[0], r)."""
    return int(ball_statistics(orb, [r]).min_gap[0])


def ball_mass(orb: OrbitBuffer, center: int, radii) -> np.ndarray:
    """Empirical measure (1/L) #{j < L : d(points[j], points[center]) < r}."""
    return (ball_statistics(orb, radii, center).count + 1) / orb.L


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def partition_return_time(w, n: int) -> int:
    """First k >= 1 at which the length-n prefix of ``w`` reoccurs (KMP)."""
    arr = _as_array(w)
    if n < 1 or arr.shape[0] < n + 1:
        raise ValueError("need 1 <= n and len(w) >= n + 1")
    pat = np.ascontiguousarray(arr[:n])
    k = _kernels.kmp_find(arr, 1, pat, _kernels.border_array(pat))
    return CENSORED if k < 0 else int(k)


def cylinder_cover_count(sys: SystemSpec, x_word: SymbolicWord, p: BallParams,
                         test_partition=None, metric_classes=None) -> int:
    """Exact number of test-partition n-cylinders meeting B(x, n, eps).

    ``metric_classes`` maps each symbol to the class the metric sees
    (identity by default); ``test_partition`` maps each symbol to a cell of
    the partition whose cylinders are counted (identity by default). Found
    by enumerating all ``k**n`` candidate words.
    """
    if sys.kind != "full_shift":
        raise ValueError("cylinder_cover_count is defined on the full shift")
    k = sys.symbols
    mc = np.arange(k) if metric_classes is None else np.asarray(metric_classes)
    tc = np.arange(k) if test_partition is None else np.asarray(test_partition)
    if mc.shape != (k,) or tc.shape != (k,):
        raise ValueError("class maps need one entry per symbol")
    _, tc = np.unique(tc, return_inverse=True)
    n_test = int(tc.max()) + 1
    agree = agreement_length(p.eps)
    if len(x_word) < p.n:
        raise WindowExceededError("x_word shorter than the ball depth")
    if k ** p.n > MAX_ENUMERATION or n_test ** p.n > MAX_ENUMERATION:
        raise ResourceLimitError(f"{k}**{p.n} candidates exceed the enumeration limit")
    return int(_kernels.count_cover_words(
        x_word.symbols[:p.n].astype(np.int64), p.n, agree,
        mc.astype(np.int64), tc.astype(np.int64), n_test))


def boundary_visits(x_word: SymbolicWord, n: int, eps: float,
                    test_partition=None, metric_classes=None) -> int:
    """#{j < n : sigma^j x lies within eps of a test-partition boundary}.

    A point z is in that neighbourhood when B(z, eps) is not inside the test
    cell of z, i.e. when the cell map splits the metric class of z_0 (or the
    ball is the whole space and the partition is non-trivial).
    """
    k = x_word.alphabet
    mc = np.arange(k) if metric_classes is None else np.asarray(metric_classes)
    tc = np.arange(k) if test_partition is None else np.asarray(test_partition)
    if agreement_length(eps) == 0:
        return n if np.unique(tc).size > 1 else 0
    split = np.array([np.unique(tc[mc == mc[s]]).size > 1 for s in range(k)])
    return int(np.count_nonzero(split[x_word.symbols[:n]]))


def cover_lemma_bound(n: int, gamma: float, partition_size: int) -> int:
    """binomial(n, ceil(gamma n)) * partition_size ** ceil(gamma n)."""
    g = math.ceil(gamma * n)
    return math.comb(n, g) * partition_size ** g


def katok_ball_cover(samples, p: BallParams, c: float) -> int:
    """Greedy number of dynamical balls centred at samples covering mass c.

    Each step takes the sample whose ball B(., n, eps) holds the most
    uncovered samples (lowest index on ties) until at least ``c`` of all
    samples are covered. Greedy is an upper bound on the true minimum.
    """
    if not 0 < c < 1:
        raise ValueError("mass c must lie in (0, 1)")
    samples = list(samples)
    N = len(samples)
    if N == 0:
        raise ValueError("no samples")
    target = math.ceil(c * N - 1e-12)
    first = samples[0]
    if first.is_symbolic:
        span = _ball_span(p.n, agreement_length(p.eps))
        rows = np.array([_symbol_prefix(s, span) for s in samples])
        if span == 0:
            return 1
        _, first_idx, sizes = np.unique(rows, axis=0, return_index=True,
                                        return_counts=True)
        # balls are disjoint cylinders: greedy takes classes by size
        order = np.lexsort((first_idx, -sizes))
        covered = np.cumsum(sizes[order])
        return int(np.searchsorted(covered, target) + 1)

    traj = np.stack([s.points[:p.n] for s in samples])
    if traj.shape[1] < p.n:
        raise ValueError(f"samples need at least {p.n} iterates")
    circle = first.metric_code == _kernels.METRIC_CIRCLE
    M = np.empty((N, N), dtype=bool)
    for i in range(N):
        d = np.abs(traj - traj[i])
        if circle:
            d = np.minimum(d, 1.0 - d)
        M[i] = d.max(axis=(1, 2)) < p.eps
    uncovered = np.ones(N, dtype=bool)
    counts = M.sum(axis=1)
    done, balls = 0, 0
    while done < target:
        i = int(np.argmax(counts))
        newly = M[i] & uncovered
        uncovered &= ~newly
        done += int(newly.sum())
        counts -= M[:, newly].sum(axis=1)
        balls += 1
    return balls


def _symbol_prefix(orb: OrbitBuffer, span: int) -> np.ndarray:
    if orb.symbols.shape[0] < span:
        raise WindowExceededError("sample shorter than the ball span")
    return orb.symbols[:span]


def _prefix_codes(itineraries, n: int) -> np.ndarray:
    if isinstance(itineraries, np.ndarray):
        rows = itineraries
    else:
        rows = np.array([_as_array(w)[:n] for w in itineraries])
    if rows.ndim != 2 or rows.shape[1] < n:
        raise ValueError(f"itineraries must have length >= {n}")
    return rows[:, :n]


def katok_cylinder_count(itineraries, n: int, c: float) -> int:
    """Minimum number of n-cylinders covering empirical mass >= c.

    Cylinders are disjoint, so taking them by decreasing frequency is exact.
    ``itineraries`` is a list of words or a 2-D integer array (one row each).
    """
    if not 0 < c < 1:
        raise ValueError("mass c must lie in (0, 1)")
    rows = _prefix_codes(itineraries, n)
    N = rows.shape[0]
    k = int(rows.max()) + 1
    if k ** n < 2**62:
        codes = np.zeros(N, dtype=np.int64)
        for j in range(n):
            codes = codes * k + rows[:, j]
        _, counts = np.unique(codes, return_counts=True)
    else:
        _, counts = np.unique(rows, axis=0, return_counts=True)
    cum = np.cumsum(np.sort(counts)[::-1])
    return int(np.searchsorted(cum, c * N - 1e-9 * N) + 1)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("sample_id", "n", "eps", "R", "S", "censored_R", "censored_S")


@dataclass(frozen=True, eq=False)
class ReturnTimeGrid:
    """R_n(x, eps) and S_n(x, eps) over an (n, eps) ladder for one sample.

    ``R[a, b]`` belongs to ``n_ladder[a]`` and ``eps_ladder[b]``. Censored
    cells hold the scan bound that was searched instead of a return time.
    """

    n_ladder: tuple
    eps_ladder: tuple
    R: np.ndarray
    S: np.ndarray
    censored_R: np.ndarray
    censored_S: np.ndarray
    L: int
    sample_id: int = 0

    def __post_init__(self):
        n, e = tuple(int(v) for v in self.n_ladder), tuple(float(v) for v in self.eps_ladder)
        if any(b <= a for a, b in zip(n, n[1:])):
            raise ValueError("n_ladder must be strictly increasing")
        if any(b >= a for a, b in zip(e, e[1:])):
            raise ValueError("eps_ladder must be strictly decreasing")
        object.__setattr__(self, "n_ladder", n)
        object.__setattr__(self, "eps_ladder", e)

    def __eq__(self, other):
        if not isinstance(other, ReturnTimeGrid):
            return NotImplemented
        return (self.n_ladder == other.n_ladder and self.eps_ladder == other.eps_ladder
                and self.L == other.L and self.sample_id == other.sample_id
                and all(np.array_equal(getattr(self, f), getattr(other, f))
                        for f in ("R", "S", "censored_R", "censored_S")))

    def log_R(self) -> np.ndarray:
        """log R with censored cells set to +inf."""
        out = np.log(np.maximum(self.R, 1).astype(float))
        out[self.censored_R] = np.inf
        return out


def return_time_grid(orb: OrbitBuffer, n_ladder, eps_ladder, s_method: str = "auto",
                     sample_id: int = 0) -> ReturnTimeGrid:
    """Compute R and S on the ladder for one orbit.

    ``s_method`` is ``"empirical"`` (orbit-pair upper bound),
    ``"symbolic"`` (exact cylinder minimal period, shift only) or ``"auto"``
    (symbolic on the shift, empirical otherwise).
    """
    n_ladder = [int(v) for v in n_ladder]
    eps_ladder = [float(v) for v in eps_ladder]
    n_max = max(n_ladder)
    if s_method == "auto":
        s_method = "symbolic" if orb.is_symbolic else "empirical"
    if s_method == "symbolic" and not orb.is_symbolic:
        raise ValueError("symbolic S needs a shift orbit")
    shape = (len(n_ladder), len(eps_ladder))
    R, S = np.zeros(shape, np.int64), np.zeros(shape, np.int64)
    cR, cS = np.zeros(shape, bool), np.zeros(shape, bool)
    rows = np.array(n_ladder) - 1
    for b, eps in enumerate(eps_ladder):
        agree = agreement_length(eps) if orb.is_symbolic else 0
        bound = _scan_limit(orb, n_max, agree)
        prof = return_time_profile(orb, eps, n_max)[rows]
        cR[:, b] = prof == CENSORED
        R[:, b] = np.where(cR[:, b], bound, prof)
        if s_method == "symbolic":
            if agree == 0:
                S[:, b] = 1
                continue
            span = n_max + agree - 1
            periods = minimal_periods(orb.symbols[:span])
            S[:, b] = periods[np.array(n_ladder) + agree - 2]
        else:
            gaps = _kernels.min_gaps(match_lengths(orb, eps, n_max), n_max)[1:][rows]
            cS[:, b] = gaps == CENSORED
            S[:, b] = np.where(cS[:, b], bound, gaps)
    return ReturnTimeGrid(tuple(n_ladder), tuple(eps_ladder), R, S, cR, cS, orb.L,
                          sample_id)


def write_grids_csv(grids, path) -> None:
    """One row per (sample, n, eps) cell; LF line endings, header first."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for g in grids:
            for a, n in enumerate(g.n_ladder):
                for b, eps in enumerate(g.eps_ladder):
                    w.writerow((g.sample_id, n, repr(eps), int(g.R[a, b]),
                                int(g.S[a, b]), int(g.censored_R[a, b]),
                                int(g.censored_S[a, b])))


def read_grids_csv(path, L: int = 0) -> list[ReturnTimeGrid]:
    """Inverse of :func:`write_grids_csv` (orbit length is not stored)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: expected header {','.join(CSV_COLUMNS)}")
        cells = {}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_COLUMNS):
                raise ValueError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields")
            try:
                sid, n, eps = int(row[0]), int(row[1]), float(row[2])
                vals = tuple(int(v) for v in row[3:])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            cells.setdefault(sid, {})[(n, eps)] = vals
    if not cells:
        raise ValueError(f"{path}: no grid rows")
    grids = []
    for sid, table in cells.items():
        ns = sorted({k[0] for k in table})
        es = sorted({k[1] for k in table}, reverse=True)
        arr = np.zeros((4, len(ns), len(es)), dtype=np.int64)
        for a, n in enumerate(ns):
            for b, e in enumerate(es):
                try:
                    arr[:, a, b] = table[(n, e)]
                except KeyError:
                    raise ValueError(f"{path}: sample {sid} misses cell n={n}, eps={e}") from None
        grids.append(ReturnTimeGrid(tuple(ns), tuple(es), arr[0], arr[1],
                                    arr[2].astype(bool), arr[3].astype(bool), L, sid))
    return grids
