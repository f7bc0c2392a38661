"""Limit estimates built from recurrence observables.

Every estimator reduces a finite-size reading of a double limit
(``eps -> 0`` outside, ``n -> oo`` inside) to a slope:

* samples are pooled per depth by the **median**, with censored cells
  counted as ``+inf`` so that the median stays honest while fewer than half
  of the samples are censored; depths whose median is censored drop out of
  the fit;
* the outer limit is read at the smallest ``eps`` whose censored fraction
  over the fit window is at most ``max_censored`` (10 % by default), and
  the full per-eps table is always reported.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import recurrence as rec
from .exceptions import AllCensoredError, InsufficientDataError, MissingReportError
from .systems import OrbitBuffer, SystemSpec

QUANTITIES = (
    "EntropyDynBall", "EntropyOW", "EntropyKatok", "Pressure", "DimLower",
    "DimUpper", "RecRateLower", "RecRateUpper", "MinRecRateLower",
    "MinRecRateUpper", "MinReturnRatio", "Lyapunov",
)

ENTROPY_TOLERANCE = 0.07
RATE_TOLERANCE = 0.1
MIN_RATE_TOLERANCE = 0.15


@dataclass(frozen=True)
class EpsFit:
    eps: float | None
    slope: float
    intercept: float
    r_squared: float
    n_window: tuple
    censored_fraction: float


@dataclass(frozen=True)
class EstimateReport:
    """Extrapolated reading of one quantity plus the per-eps fits behind it.

    ``tolerance`` is relative for entropy-like quantities and absolute for
    rates; see :meth:`within_target`.
    """

    quantity: str
    per_eps_fits: tuple
    extrapolated: float
    sample_count: int
    target: float | None = None
    tolerance: float | None = None
    relative_tolerance: bool = True
    selected_eps: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if not math.isfinite(self.extrapolated):
            raise InsufficientDataError(f"{self.quantity}: non-finite estimate")

    @property
    def relative_error(self) -> float | None:
        if self.target is None or self.target == 0:
            return None
        return abs(self.extrapolated - self.target) / abs(self.target)

    def within_target(self) -> bool | None:
        if self.target is None or self.tolerance is None:
            return None
        if self.relative_tolerance:
            return abs(self.extrapolated - self.target) <= self.tolerance * abs(self.target)
        return abs(self.extrapolated - self.target) <= self.tolerance

    def with_target(self, target, tolerance=None, relative=None) -> "EstimateReport":
        kw = dict(self.__dict__)
        kw["target"] = target
        if tolerance is not None:
            kw["tolerance"] = tolerance
        if relative is not None:
            kw["relative_tolerance"] = relative
        return EstimateReport(**kw)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "per_eps_fits": [_clean(asdict(f)) for f in self.per_eps_fits],
            "extrapolated": self.extrapolated,
            "target": self.target,
            "relative_error": self.relative_error,
            "sample_count": self.sample_count,
            "tolerance": self.tolerance,
            "tolerance_kind": "relative" if self.relative_tolerance else "absolute",
            "selected_eps": self.selected_eps,
            "diagnostics": _clean(self.diagnostics),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _clean(obj):
    """JSON-safe copy: tuples and arrays to lists, NaN/inf to None, numpy
    scalars to Python."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


@dataclass(frozen=True)
class PotentialSpec:
    """Continuous potential phi.

    ``constant`` takes ``value``; ``coordinate`` is the point's coordinate in
    [0, 1] (first axis on the torus, base-k expansion on the shift);
    ``table`` assigns ``table[i]`` on cell i of the canonical partition.
    """

    kind: str = "constant"
    value: float = 0.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "coordinate", "table"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "table" and not self.table:
            raise ValueError("table potential needs values")
        if not all(math.isfinite(v) for v in (self.value, *self.table)):
            raise ValueError("potential must be bounded")

    def evaluate(self, orb: OrbitBuffer, count: int) -> np.ndarray:
        """phi at the first ``count`` orbit points."""
        if self.kind == "constant":
            return np.full(count, float(self.value))
        sys = orb.system
        if self.kind == "coordinate":
            if orb.is_symbolic:
                k = sys.symbols
                w = min(53, orb.symbols.shape[0] - count + 1)
                weights = float(k) ** -np.arange(1, w + 1)
                windows = np.lib.stride_tricks.sliding_window_view(
                    orb.symbols[:count + w - 1].astype(float), w)
                return windows @ weights
            return orb.points[:count, 0].astype(float)
        table = np.asarray(self.table, dtype=float)
        if table.shape[0] != sys.alphabet:
            raise ValueError("table potential needs one value per partition cell")
        return table[partition_cells(orb, count)]


def partition_cells(orb: OrbitBuffer, count: int) -> np.ndarray:
    """Canonical partition cell of each of the first ``count`` orbit points."""
    sys = orb.system
    if orb.is_symbolic:
        return orb.symbols[:count].astype(np.int64)
    x = orb.points[:count]
    if sys.kind in ("circle_expanding", "torus_conformal"):
        digits = np.floor(sys.degree * x).astype(np.int64)
        return digits @ (sys.degree ** np.arange(x.shape[1]))
    if sys.map_id in ("tent", "logistic"):
        return (x[:, 0] >= 0.5).astype(np.int64)
    return np.searchsorted(sys._branch_offsets, x[:, 0], side="right") - 1


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

def fit_growth_rate(series, window=None) -> tuple[float, float, float]:
    """Ordinary least squares of value against n over ``window``.

    ``series`` is an iterable of ``(n, value)``; non-finite values are
    treated as censored and skipped. Returns ``(slope, intercept, r2)``.

    >>> slope, _, r2 = fit_growth_rate([(n, 0.7 * n) for n in range(1, 6)])
    >>> round(slope, 12), r2
    (0.7, 1.0)
    """
    pts = [(float(n), float(v)) for n, v in series]
    if window is not None:
        lo, hi = window
        pts = [(n, v) for n, v in pts if lo <= n <= hi]
    pts = [(n, v) for n, v in pts if math.isfinite(v)]
    if len(pts) < 3:
        raise InsufficientDataError(f"need >= 3 uncensored points, have {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise InsufficientDataError("window holds a single abscissa")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    ss_tot = float(np.sum((y - ym) ** 2))
    ss_res = float(np.sum((y - (intercept + slope * x)) ** 2))
    if ss_tot <= 1e-24 * max(1.0, float(np.sum(y ** 2))):
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, intercept, r2


def _pooled_fit(abscissa, values, censored, window, eps=None, offset=None) -> EpsFit:
    """Median across samples per abscissa, then a line fit over ``window``.

    ``offset`` (same shape as ``values``) is pooled by its own median and
    added after pooling, so a term that is never censored cannot shift which
    samples sit at the median of the censored one.
    """
    abscissa = np.asarray(abscissa, dtype=float)
    lo, hi = window
    sel = (abscissa >= lo) & (abscissa <= hi)
    med = np.median(values[:, sel], axis=0)
    if offset is not None:
        med = med + np.median(offset[:, sel], axis=0)
    cf = float(censored[:, sel].mean()) if sel.any() else 1.0
    slope, intercept, r2 = fit_growth_rate(zip(abscissa[sel], med))
    return EpsFit(eps, slope, intercept, r2, (lo, hi), cf)


def _select(fits, max_censored):
    """Fit at the smallest eps whose censored fraction is acceptable."""
    ok = [f for f in fits if f.censored_fraction <= max_censored]
    if not ok:
        raise AllCensoredError(
            f"no eps with censored fraction <= {max_censored:.0%}")
    return min(ok, key=lambda f: f.eps)


def _check_ladders(grids):
    grids = list(grids)
    if not grids:
        raise InsufficientDataError("no grids")
    g0 = grids[0]
    for g in grids[1:]:
        if g.n_ladder != g0.n_ladder or g.eps_ladder != g0.eps_ladder:
            raise ValueError("grids must share their ladders")
    return grids, g0


def _window(ladder, window):
    return (min(ladder), max(ladder)) if window is None else tuple(window)


# ---------------------------------------------------------------------------
# entropy and pressure
# ---------------------------------------------------------------------------

def pooled_log_returns(grids, eps_index: int) -> tuple[np.ndarray, np.ndarray]:
    """(samples, n) arrays of log R_n (+inf when censored) and censor flags."""
    vals = np.stack([g.log_R()[:, eps_index] for g in grids])
    cens = np.stack([g.censored_R[:, eps_index] for g in grids])
    return vals, cens


def entropy_from_return_times(grids, n_window=None, max_censored=0.1, target=None,
                              tolerance=ENTROPY_TOLERANCE) -> EstimateReport:
    """Growth rate of return times to dynamical balls.

    For each eps the per-depth median of log R_n(x, eps) is fitted against
    n; the reading at the smallest eps with at most ``max_censored``
    censored cells is the entropy estimate (nats).
    """
    return _return_time_slopes("EntropyDynBall", grids, n_window, max_censored,
                               target, tolerance)


def pressure_estimate(grids, orbits, phi: PotentialSpec, n_window=None,
                      max_censored=0.1, target=None,
                      tolerance=ENTROPY_TOLERANCE) -> EstimateReport:
    """Growth rate of exp(S_n phi(x)) R_n(x, eps).

    The Birkhoff sum at the centre replaces the supremum of S_n phi over the
    ball; for continuous phi the two differ by o(n) as eps -> 0. The two
    terms are pooled separately (median of log R_n plus median of S_n phi)
    before the fit, which keeps the censored-as-infinite median of the
    return times from selecting samples by their Birkhoff sums.
    """
    grids, g0 = _check_ladders(grids)
    if len(orbits) != len(grids):
        raise ValueError("need one orbit per grid")
    n_arr = np.array(g0.n_ladder)
    sums = np.stack([np.cumsum(phi.evaluate(o, int(n_arr.max())))[n_arr - 1]
                     for o in orbits])
    return _return_time_slopes("Pressure", grids, n_window, max_censored, target,
                               tolerance, extra=sums,
                               diagnostics={"potential": phi.kind})


def _return_time_slopes(quantity, grids, n_window, max_censored, target, tolerance,
                        extra=None, diagnostics=None) -> EstimateReport:
    grids, g0 = _check_ladders(grids)
    window = _window(g0.n_ladder, n_window)
    fits, failed = [], []
    for b, eps in enumerate(g0.eps_ladder):
        vals, cens = pooled_log_returns(grids, b)
        try:
            fits.append(_pooled_fit(g0.n_ladder, vals, cens, window, eps, extra))
        except InsufficientDataError:
            failed.append(eps)
    if not fits:
        raise AllCensoredError(f"{quantity}: every eps is censored on {window}")
    best = _select(fits, max_censored)
    diag = dict(diagnostics or {})
    diag["unfitted_eps"] = failed
    return EstimateReport(quantity, tuple(fits), best.slope, len(grids), target,
                          tolerance, True, best.eps, diag)


def entropy_ornstein_weiss(itineraries, n_window, max_censored=0.1, target=None,
                           tolerance=ENTROPY_TOLERANCE, centers=1) -> EstimateReport:
    """Growth rate of partition return times R_n(x, Q) of long itineraries.

    With ``centers > 1`` every itinerary also contributes the suffixes that
    start at ``centers`` evenly spaced positions in its first half; each
    suffix is one more sample of the same typical-point statistic.
    """
    lo, hi = n_window
    ns = np.arange(lo, hi + 1)
    words = []
    for w in itineraries:
        if centers == 1:
            words.append(w)
            continue
        w = rec._as_array(w)
        starts = np.linspace(0, len(w) // 2, int(centers), endpoint=False).astype(int)
        words.extend(w[s:] for s in starts)
    R = np.array([[rec.partition_return_time(w, int(n)) for n in ns]
                  for w in words], dtype=float)
    if R.size == 0:
        raise InsufficientDataError("no itineraries")
    cens = R == rec.CENSORED
    logs = np.where(cens, np.inf, np.log(np.maximum(R, 1)))
    try:
        fit = _pooled_fit(ns, logs, cens, (lo, hi))
    except InsufficientDataError as exc:
        raise AllCensoredError(f"EntropyOW: {exc}") from None
    return EstimateReport("EntropyOW", (fit,), fit.slope, len(R), target, tolerance,
                          True, None, {"censored_fraction": fit.censored_fraction})


def entropy_katok(n_ladder, c, itineraries=None, samples=None, eps_ladder=(),
                  target=None, tolerance=ENTROPY_TOLERANCE,
                  saturation=0.5) -> dict[str, EstimateReport]:
    """Growth rate of the number of sets needed to cover mass ``c``.

    Returns ``{"cylinder": ..., "ball": ...}``: the exact cylinder count over
    ``itineraries`` and, when ``samples`` (orbits) are given, the greedy
    dynamical-ball cover per eps. A ball count that reaches ``saturation``
    times the number of covered samples no longer resolves growth and is
    treated like a censored cell.
    """
    if not 0 < c < 1:
        raise ValueError("mass c must lie in (0, 1)")
    ns = [int(n) for n in n_ladder]
    out = {}
    if itineraries is not None:
        counts = [rec.katok_cylinder_count(itineraries, n, c) for n in ns]
        slope, icpt, r2 = fit_growth_rate(zip(ns, np.log(counts)))
        fit = EpsFit(None, slope, icpt, r2, (min(ns), max(ns)), 0.0)
        size = itineraries.shape[0] if isinstance(itineraries, np.ndarray) else len(itineraries)
        out["cylinder"] = EstimateReport(
            "EntropyKatok", (fit,), slope, size, target, tolerance, True, None,
            {"variant": "cylinder", "mass": c, "counts": counts})
    if samples is not None:
        samples = list(samples)
        cap = saturation * c * len(samples)
        fits, table = [], {}
        for eps in eps_ladder:
            counts = [rec.katok_ball_cover(samples, rec.BallParams(n, eps), c)
                      for n in ns]
            table[repr(float(eps))] = counts
            sat = np.array(counts) >= cap
            logs = np.where(sat, np.inf, np.log(counts))
            try:
                s, i, r2 = fit_growth_rate(zip(ns, logs))
            except InsufficientDataError:
                continue
            fits.append(EpsFit(float(eps), s, i, r2, (min(ns), max(ns)), float(sat.mean())))
        if fits:
            best = _select(fits, 0.5)
            out["ball"] = EstimateReport(
                "EntropyKatok", tuple(fits), best.slope, len(samples), target,
                tolerance, True, best.eps,
                {"variant": "ball", "mass": c, "counts": table})
    if not out:
        raise InsufficientDataError("entropy_katok needs itineraries or samples")
    return out


# ---------------------------------------------------------------------------
# minimal return times
# ---------------------------------------------------------------------------

def minimal_return_ratio(grids, max_censored=0.1, target=1.0,
                         tolerance=0.05) -> EstimateReport:
    """Median over samples of S_n / n at the deepest uncensored n, per eps.

    Each per-eps entry stores that median ratio as its ``slope`` (the slope
    of the chord from the origin), with ``n_window`` the depths used.

    The chord carries a finite-depth offset: a ball of radius 2^-m on the
    shift fixes n + m symbols, so S_n is close to n + m and the chord reads
    about 1 + m/n. ``diagnostics["growth_slopes"]`` holds, per eps, the
    least-squares slope of the median S_n against n, which removes that
    offset; ``diagnostics["growth_slope"]`` is its value at the selected eps
    (``None`` when fewer than three depths are uncensored).
    """
    grids, g0 = _check_ladders(grids)
    ns = np.array(g0.n_ladder)
    fits, growth = [], {}
    for b, eps in enumerate(g0.eps_ladder):
        ratios, used = [], []
        for g in grids:
            ok = np.flatnonzero(~g.censored_S[:, b])
            if ok.size:
                a = ok[-1]
                ratios.append(g.S[a, b] / ns[a])
                used.append(int(ns[a]))
        cf = float(np.mean([g.censored_S[:, b].mean() for g in grids]))
        if ratios:
            fits.append(EpsFit(float(eps), float(np.median(ratios)), 0.0, 1.0,
                               (min(used), max(used)), cf))
            S = np.stack([np.where(g.censored_S[:, b], np.inf, g.S[:, b]) for g in grids])
            try:
                growth[float(eps)] = fit_growth_rate(zip(ns, np.median(S, axis=0)))[0]
            except InsufficientDataError:
                growth[float(eps)] = None
    if not fits:
        raise AllCensoredError("MinReturnRatio: all S cells censored")
    best = _select(fits, max_censored)
    diag = {"growth_slopes": {repr(e): v for e, v in growth.items()},
            "growth_slope": growth.get(best.eps)}
    return EstimateReport("MinReturnRatio", tuple(fits), best.slope, len(grids),
                          target, tolerance, False, best.eps, diag)


# ---------------------------------------------------------------------------
# pointwise dimension and recurrence rates
# ---------------------------------------------------------------------------

def _windowed_slopes(x, pooled, censored, radii, window):
    """Fits over every run of ``window`` consecutive radii."""
    fits = []
    for start in range(0, len(radii) - window + 1):
        sl = slice(start, start + window)
        try:
            s, i, r2 = fit_growth_rate(zip(x[sl], pooled[sl]))
        except InsufficientDataError:
            continue
        fits.append(EpsFit(float(radii[sl][-1]), s, i, r2,
                           (float(x[sl][0]), float(x[sl][-1])),
                           float(censored[:, sl].mean())))
    return fits


def _lower_upper(names, x, values, censored, radii, window, n_samples, target,
                 tolerance, pool="median", max_censored=0.1, diagnostics=None):
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) >= 0):
        raise ValueError("radii ladder must be strictly decreasing")
    if window is None:
        window = max(3, (len(radii) + 2) // 2)
    if window > len(radii):
        raise InsufficientDataError(f"window {window} exceeds {len(radii)} radii")
    if pool == "median":
        pooled = np.median(values, axis=0)
    else:
        masked = np.where(censored, np.nan, values)
        with np.errstate(invalid="ignore"):
            pooled = np.nanmean(masked, axis=0)
        pooled[censored.mean(axis=0) > 0.5] = np.inf
    fits = [f for f in _windowed_slopes(x, pooled, censored, radii, window)
            if f.censored_fraction <= max_censored]
    if not fits:
        raise AllCensoredError(f"{names[0]}: no usable radius window")
    slopes = [f.slope for f in fits]
    full = fit_growth_rate(zip(x, pooled))[0] if np.isfinite(pooled).sum() >= 3 else None
    diag = dict(diagnostics or {}, full_ladder_slope=full, window=window, pool=pool)
    lo = EstimateReport(names[0], tuple(fits), min(slopes), n_samples, target,
                        tolerance, False, None, diag)
    hi = EstimateReport(names[1], tuple(fits), max(slopes), n_samples, target,
                        tolerance, False, None, diag)
    return lo, hi


def _centres(orb: OrbitBuffer, count: int, span: float = 1.0) -> np.ndarray:
    """``count`` evenly spread orbit indices in the first ``span`` of the orbit."""
    top = max(1, int(orb.L * span))
    return np.unique(np.linspace(0, top - 1, count + 2, dtype=np.int64)[1:-1])


def pointwise_dimension(orbits, radii, centers=None, n_centers=50,
                        window=None, target=None, tolerance=RATE_TOLERANCE,
                        pool="mean"):
    """Lower and upper pointwise dimension from an empirical measure.

    ``orbits`` is one :class:`OrbitBuffer` or a sequence of them; each
    orbit's visit frequencies stand in for mu. mu(B(x, r)) at a centre (an
    orbit index, itself excluded from the count) is
    #{j != x : d(points[j], points[x]) < r} / (L - 1). ``centers`` lists
    the indices used in every orbit (default: ``n_centers`` evenly spread).
    log mu is pooled over all centres (``pool``: "mean" or "median") and
    fitted against log r on every window of consecutive radii; the smallest
    and largest windowed slopes are the lower and upper readings. The mean
    is the default because on symbolic systems log mu of a cylinder is a
    lattice-valued random walk whose median advances in uneven steps.
    """
    if isinstance(orbits, OrbitBuffer):
        orbits = [orbits]
    radii = [float(r) for r in radii]
    rows = []
    for orb in orbits:
        cs = _centres(orb, n_centers) if centers is None else centers
        rows += [rec.ball_statistics(orb, radii, int(c)).count / (orb.L - 1)
                 for c in cs]
    mass = np.array(rows)
    if np.any(mass <= 0):
        raise InsufficientDataError(
            "empty ball: some radius holds no other orbit point; shrink the ladder")
    return _lower_upper(("DimLower", "DimUpper"), np.log(radii), np.log(mass),
                        np.zeros(mass.shape, bool), radii, window, len(rows),
                        target, tolerance, pool=pool)


def _ball_table(orbits, radii, centers_per_orbit, field_name):
    rows = []
    for o in orbits:
        # centres sit in the first half so every one has a long future
        for c in _centres(o, centers_per_orbit, 0.5):
            if field_name == "first_return":
                rows.append(rec.ball_return_times(o, radii, int(c)))
            else:
                rows.append(getattr(rec.ball_statistics(o, radii, int(c)), field_name))
    return np.stack(rows)


def recurrence_rate(orbits, radii, centers_per_orbit=1, window=None, target=None,
                    tolerance=RATE_TOLERANCE, pool="median"):
    """Slopes of log R_{B(x,r)}(x) against -log r (lower, upper).

    Each orbit contributes ``centers_per_orbit`` starting points (later
    points of the same orbit are themselves typical). The median is the
    default pool: the mean of log R leans on the rare very short returns of
    centres near periodic orbits. With ``pool="mean"`` censored samples are
    left out and a radius with more than half of them censored is dropped.
    """
    radii = [float(r) for r in radii]
    R = _ball_table(orbits, radii, centers_per_orbit, "first_return")
    cens = R == rec.CENSORED
    logs = np.where(cens, np.inf, np.log(np.maximum(R, 1)))
    return _lower_upper(("RecRateLower", "RecRateUpper"), -np.log(radii), logs,
                        cens, radii, window, len(R), target, tolerance, pool=pool)


def min_recurrence_rate(orbits, radii, centers_per_orbit=1, window=None,
                        target=None, tolerance=RATE_TOLERANCE):
    """Slopes of the raw minimal return time S(B(x, r)) against -log r.

    S is integer valued and concentrated, so samples are pooled by the mean
    of uncensored values (a radius with more than half censored samples is
    dropped) rather than by the median.
    """
    radii = [float(r) for r in radii]
    S = _ball_table(orbits, radii, centers_per_orbit, "min_gap")
    cens = S == rec.CENSORED
    return _lower_upper(("MinRecRateLower", "MinRecRateUpper"), -np.log(radii),
                        S.astype(float), cens, radii, window, len(S), target,
                        tolerance, pool="mean")


# ---------------------------------------------------------------------------
# Lyapunov exponent
# ---------------------------------------------------------------------------

def _exact_mean(values) -> float:
    # a constant derivative gives its own log exactly, not a rounded average
    v = np.asarray(values, dtype=float)
    return float(v[0]) if np.all(v == v[0]) else float(np.mean(v))


def lyapunov_exponent(sys: SystemSpec, orbits, critical_tol=1e-12, target=None,
                      tolerance=0.05) -> EstimateReport:
    """Birkhoff average of log |f'| along each orbit, averaged over orbits.

    Orbit points within ``critical_tol`` of a critical point are skipped and
    counted. On the torus all exponents equal log m; on the shift the
    metric expansion rate log 2 is returned.
    """
    per_orbit, skipped = [], 0
    crit = sys.critical_points()
    for o in orbits:
        if o.is_symbolic:
            per_orbit.append(math.log(2.0))
            continue
        x = o.points[:, 0]
        keep = np.ones(x.shape[0], dtype=bool)
        for c in crit:
            keep &= np.abs(x - c) > critical_tol
        skipped += int((~keep).sum())
        if not keep.any():
            raise InsufficientDataError("every orbit point is critical")
        per_orbit.append(_exact_mean(sys.log_derivative(x[keep])))
    if not per_orbit:
        raise InsufficientDataError("no orbits")
    value = _exact_mean(per_orbit)
    return EstimateReport("Lyapunov", (), value, len(per_orbit), target, tolerance,
                          True, None, {"skipped_points": skipped,
                                       "per_orbit_spread": float(np.ptp(per_orbit))})


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    relation: str
    lhs: float | None
    rhs: float | None
    tolerance: float
    status: str

    def to_dict(self) -> dict:
        return _clean(asdict(self))


def _as_bundle(bundle) -> dict:
    if isinstance(bundle, dict):
        return dict(bundle)
    return {r.quantity: r for r in bundle}


def _le(name, lhs, rhs, tol):
    return Verdict(name, lhs, rhs, tol, "PASS" if lhs <= rhs + tol else "FAIL")


def _eq(name, lhs, rhs, tol):
    return Verdict(name, lhs, rhs, tol, "PASS" if abs(lhs - rhs) <= tol else "FAIL")


def check_inequalities(bundle, sys: SystemSpec, tolerance=RATE_TOLERANCE,
                       min_entropy=0.05,
                       s_tolerance=MIN_RATE_TOLERANCE) -> list[Verdict]:
    """Evaluate the entropy / expansion / dimension relations on a bundle.

    ``bundle`` maps quantity names to reports (or is an iterable of
    reports). It must hold an entropy estimate, ``Lyapunov``, ``DimLower``,
    ``DimUpper``, ``RecRateLower`` and ``RecRateUpper``; the minimal
    recurrence relations are evaluated when ``MinRecRateLower/Upper`` are
    present. With entropy at or below ``min_entropy`` every relation is
    SKIPPED (the positive-entropy hypothesis fails); relations that need
    local bi-Lipschitz constants are SKIPPED for systems without them.
    Relations on minimal recurrence rates use ``s_tolerance``: S is an
    integer that moves by about one per factor e**lyap in r, so its slope
    carries a coarser finite-size error than the other rates.
    """
    b = _as_bundle(bundle)
    ent = next((b[q] for q in ("EntropyDynBall", "EntropyOW", "EntropyKatok") if q in b),
               None)
    if ent is None:
        raise MissingReportError("bundle has no entropy estimate")
    for q in ("Lyapunov", "DimLower", "DimUpper", "RecRateLower", "RecRateUpper"):
        if q not in b:
            raise MissingReportError(f"bundle is missing {q}")
    h = ent.extrapolated
    lyap = b["Lyapunov"].extrapolated
    r_lo, r_hi = b["RecRateLower"].extrapolated, b["RecRateUpper"].extrapolated
    dim = 0.5 * (b["DimLower"].extrapolated + b["DimUpper"].extrapolated)
    s_lo = b["MinRecRateLower"].extrapolated if "MinRecRateLower" in b else None
    s_hi = b["MinRecRateUpper"].extrapolated if "MinRecRateUpper" in b else None
    tau = tolerance

    rel = []
    lip = sys.lipschitz
    if lip is not None:
        _, lam, Lam = lip
        rel += [("h/log(Lambda) <= R_lower", h / math.log(Lam), r_lo, "le"),
                ("R_upper <= h/log(lambda)", r_hi, h / math.log(lam), "le"),
                ("1/log(Lambda) <= S_lower", 1 / math.log(Lam), s_lo, "le"),
                ("S_upper <= 1/log(lambda)", s_hi, 1 / math.log(lam), "le")]
    else:
        rel += [(name, None, None, "skip") for name in (
            "h/log(Lambda) <= R_lower", "R_upper <= h/log(lambda)",
            "1/log(Lambda) <= S_lower", "S_upper <= 1/log(lambda)")]
    # one-dimensional or conformal: lambda_1 = lambda_d = lyap
    rel += [("h/lyap_max <= R_lower", h / lyap, r_lo, "le"),
            ("R_upper <= h/lyap_min", r_hi, h / lyap, "le"),
            ("1/lyap_max <= S_lower", 1 / lyap, s_lo, "le"),
            ("S_upper <= 1/lyap_min", s_hi, 1 / lyap, "le")]
    rel += _identities(r_lo, r_hi, dim, s_lo, s_hi, lyap)
    return _evaluate(rel, tau, s_tolerance, skip_all=h <= min_entropy)


def _identities(r_lo, r_hi, dim, s_lo, s_hi, lyap):
    return [("R_lower == dim", r_lo, dim, "eq"),
            ("R_upper == dim", r_hi, dim, "eq"),
            ("S_lower == 1/lyap", s_lo, 1 / lyap, "eq"),
            ("S_upper == 1/lyap", s_hi, 1 / lyap, "eq")]


def _evaluate(rel, tau, s_tolerance, skip_all=False):
    out = []
    for name, lhs, rhs, op in rel:
        tol = s_tolerance if "S_" in name else tau
        if op == "skip" or skip_all or lhs is None or rhs is None:
            out.append(Verdict(name, lhs, rhs, tol, "SKIPPED"))
        elif op == "le":
            out.append(_le(name, lhs, rhs, tol))
        else:
            out.append(_eq(name, lhs, rhs, tol))
    return out


def recurrence_identities(bundle, tolerance=RATE_TOLERANCE,
                          s_tolerance=MIN_RATE_TOLERANCE) -> list[Verdict]:
    """Recurrence rate against pointwise dimension and minimal recurrence
    rate against 1/Lyapunov, without the entropy relations.

    Needs ``Lyapunov``, ``DimLower/Upper`` and ``RecRateLower/Upper``; the
    minimal-rate identities are SKIPPED when their reports are absent.
    """
    b = _as_bundle(bundle)
    for q in ("Lyapunov", "DimLower", "DimUpper", "RecRateLower", "RecRateUpper"):
        if q not in b:
            raise MissingReportError(f"bundle is missing {q}")
    dim = 0.5 * (b["DimLower"].extrapolated + b["DimUpper"].extrapolated)
    s_lo = b["MinRecRateLower"].extrapolated if "MinRecRateLower" in b else None
    s_hi = b["MinRecRateUpper"].extrapolated if "MinRecRateUpper" in b else None
    rel = _identities(b["RecRateLower"].extrapolated, b["RecRateUpper"].extrapolated,
                      dim, s_lo, s_hi, b["Lyapunov"].extrapolated)
    return _evaluate(rel, tolerance, s_tolerance)


def verdicts_to_json(verdicts, **kw) -> str:
    return json.dumps([v.to_dict() for v in verdicts], **kw)
