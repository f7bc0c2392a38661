"""Model dynamical systems, their metrics, invariant measures and codings.

Four families are supported:

``full_shift``
    The one-sided shift on ``k`` symbols with ``d(x, y) = 2**-t(x, y)``,
    where ``t`` is the first index at which the sequences differ.
``circle_expanding``
    ``x -> m x mod 1`` on the circle with arc-length distance.
``torus_conformal``
    The same map on every axis of the ``d``-torus, sup of arc distances.
``interval``
    Tent map, logistic map at parameter 4, or a full-branch increasing
    piecewise-linear map with prescribed slopes.

Typical points of the expanding maps cannot be represented as floats: in
binary floating point ``2 x mod 1`` reaches 0 after at most 53 steps. Points
sampled from the invariant measure are therefore kept as a :class:`CodedPoint`
(the symbolic expansion of the point), and orbit coordinates are rebuilt from
a sliding window of the expansion. Plain floats are still accepted everywhere
and are iterated literally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import (BoundaryError, DomainError, IncompatibleMeasureError,
                         ResourceLimitError, WindowExceededError)

MAX_ORBIT_LENGTH = 1 << 27

SYSTEM_KINDS = ("full_shift", "circle_expanding", "torus_conformal", "interval")
INTERVAL_MAPS = ("tent", "logistic", "piecewise_linear")
MEASURE_KINDS = ("lebesgue", "bernoulli", "acim")
RNG_ALGORITHMS = ("philox",)

_F64_BITS = 53


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSpec:
    """Invariant measure together with the seed that drives sampling.

    ``kind`` is ``"lebesgue"``, ``"bernoulli"`` (needs ``probabilities``) or
    ``"acim"``, the absolutely continuous invariant measure of an interval
    map. Random streams come from the counter-based Philox generator; stream
    ``i`` is the ``i``-th child of the seed sequence, so streams can be
    handed out independently.
    """

    kind: str = "lebesgue"
    probabilities: tuple[float, ...] | None = None
    seed: int = 0
    rng: str = "philox"

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.rng not in RNG_ALGORITHMS:
            raise ValueError(f"unsupported generator {self.rng!r}")
        if self.kind == "bernoulli":
            if self.probabilities is None or len(self.probabilities) < 2:
                raise ValueError("bernoulli measure needs a probability vector")
            p = tuple(float(v) for v in self.probabilities)
            if any(not 0.0 < v < 1.0 for v in p):
                raise ValueError("bernoulli probabilities must lie in (0, 1)")
            if abs(math.fsum(p) - 1.0) > 1e-12:
                raise ValueError("bernoulli probabilities must sum to 1")
            object.__setattr__(self, "probabilities", p)
        elif self.probabilities is not None:
            raise ValueError(f"{self.kind} measure takes no probability vector")

    def generator(self, stream: int = 0) -> np.random.Generator:
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(stream),))
        return np.random.Generator(np.random.Philox(seq))


def bernoulli(p, seed=0) -> MeasureSpec:
    return MeasureSpec("bernoulli", tuple(p), seed)


def lebesgue(seed=0) -> MeasureSpec:
    return MeasureSpec("lebesgue", None, seed)


def shannon_entropy(p) -> float:
    """Entropy in nats of a probability vector."""
    return -math.fsum(v * math.log(v) for v in p if v > 0)


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Analytic:
    """Closed-form reference values (nats for entropy and exponents)."""

    entropy: float
    lyapunov_min: float
    lyapunov_max: float
    dimension: float


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    measure: MeasureSpec = field(default_factory=MeasureSpec)
    symbols: int = 2
    degree: int = 2
    dim: int = 1
    map_id: str | None = None
    slopes: tuple[float, ...] | None = None
    analytic: Analytic | None = None

    def __post_init__(self):
        if self.kind not in SYSTEM_KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        if self.kind == "full_shift" and self.symbols < 2:
            raise ValueError("full shift needs at least 2 symbols")
        if self.kind in ("circle_expanding", "torus_conformal") and self.degree < 2:
            raise ValueError("expanding degree must be an integer >= 2")
        if self.kind == "torus_conformal" and self.dim < 1:
            raise ValueError("torus dimension must be >= 1")
        if self.kind == "interval":
            if self.map_id not in INTERVAL_MAPS:
                raise ValueError(f"unknown interval map {self.map_id!r}")
            if self.map_id == "piecewise_linear":
                if not self.slopes or len(self.slopes) < 2:
                    raise ValueError("piecewise_linear needs >= 2 slopes")
                s = tuple(float(v) for v in self.slopes)
                if any(v <= 1.0 for v in s):
                    raise ValueError("slopes must exceed 1")
                if abs(math.fsum(1.0 / v for v in s) - 1.0) > 1e-12:
                    raise ValueError("full branches need sum(1/slope) == 1")
                object.__setattr__(self, "slopes", s)
        if self.analytic is None:
            object.__setattr__(self, "analytic", _analytic_values(self))
        a = self.analytic
        # conformal: a single exponent, so dim = h / lambda must hold
        if a is not None and a.lyapunov_min == a.lyapunov_max:
            if not math.isclose(a.dimension, a.entropy / a.lyapunov_max,
                                rel_tol=1e-12):
                raise ValueError("analytic dimension != entropy / lyapunov")

    # -- descriptors -------------------------------------------------------

    @property
    def metric(self) -> str:
        return {"full_shift": "shift", "circle_expanding": "circle",
                "torus_conformal": "torus_sup", "interval": "interval"}[self.kind]

    @property
    def alphabet(self) -> int:
        """Size of the canonical generating partition."""
        if self.kind == "full_shift":
            return self.symbols
        if self.kind == "circle_expanding":
            return self.degree
        if self.kind == "torus_conformal":
            return self.degree ** self.dim
        if self.map_id == "piecewise_linear":
            return len(self.slopes)
        return 2

    @property
    def coding_base(self) -> int:
        """Number of distinct symbols in a CodedPoint expansion."""
        if self.kind in ("circle_expanding", "torus_conformal"):
            return self.degree
        if self.kind == "interval" and self.map_id == "piecewise_linear":
            return len(self.slopes)
        return self.symbols if self.kind == "full_shift" else 2

    @property
    def window(self) -> int:
        """Coding symbols consumed to rebuild one float coordinate."""
        if self.kind == "full_shift":
            return 0
        if self.kind == "interval" and self.map_id == "piecewise_linear":
            return int(math.ceil(_F64_BITS * math.log(2) / math.log(min(self.slopes)))) + 1
        base = self.coding_base
        if base == 2:
            return _F64_BITS
        return int(math.ceil(_F64_BITS / math.log2(base))) + 1

    @property
    def diameter(self) -> float:
        return {"shift": 1.0, "circle": 0.5, "torus_sup": 0.5,
                "interval": 1.0}[self.metric]

    @property
    def lipschitz(self) -> tuple[float, float, float] | None:
        """(delta, lam, Lam) with lam d <= d(f x, f y) <= Lam d when d < delta.

        ``None`` when the map is not locally bi-Lipschitz everywhere.
        """
        if self.kind == "full_shift":
            return (1.0, 2.0, 2.0)
        if self.kind in ("circle_expanding", "torus_conformal"):
            m = float(self.degree)
            return (1.0 / (2 * m), m, m)
        return None

    @property
    def dimension(self) -> int:
        return self.dim if self.kind == "torus_conformal" else 1

    @property
    def _branch_offsets(self) -> np.ndarray:
        inv = 1.0 / np.asarray(self.slopes)
        return np.concatenate(([0.0], np.cumsum(inv)[:-1]))

    # -- single-point maps ---------------------------------------------------

    def step(self, x):
        """One application of the map to a float (or float array) point."""
        if self.kind == "circle_expanding":
            y = self.degree * x
            return y - math.floor(y)
        if self.kind == "torus_conformal":
            y = self.degree * np.asarray(x, dtype=float)
            return y - np.floor(y)
        if self.map_id == "tent":
            return 2.0 * x if x < 0.5 else 2.0 - 2.0 * x
        if self.map_id == "logistic":
            return 4.0 * x * (1.0 - x)
        offsets = self._branch_offsets
        i = int(np.searchsorted(offsets, x, side="right")) - 1
        y = self.slopes[i] * (x - offsets[i])
        return min(max(y, 0.0), math.nextafter(1.0, 0.0))

    def log_derivative(self, x: np.ndarray) -> np.ndarray:
        """log |f'(x)| evaluated elementwise on 1D coordinates."""
        x = np.asarray(x, dtype=float)
        if self.kind in ("circle_expanding", "torus_conformal"):
            return np.full(x.shape[0], math.log(self.degree))
        if self.kind == "full_shift":
            return np.full(x.shape[0], math.log(2.0))
        if self.map_id == "tent":
            return np.full(x.shape[0], math.log(2.0))
        if self.map_id == "logistic":
            with np.errstate(divide="ignore"):
                return np.log(np.abs(4.0 - 8.0 * x))
        offsets = self._branch_offsets
        i = np.searchsorted(offsets, x, side="right") - 1
        return np.log(np.asarray(self.slopes))[i]

    def critical_points(self) -> tuple[float, ...]:
        if self.kind == "interval" and self.map_id in ("tent", "logistic"):
            return (0.5,)
        return ()


def _analytic_values(sys: SystemSpec) -> Analytic | None:
    kind, meas = sys.kind, sys.measure
    if kind == "full_shift":
        if meas.kind != "bernoulli" or len(meas.probabilities) != sys.symbols:
            return None
        h = shannon_entropy(meas.probabilities)
        return Analytic(h, math.log(2), math.log(2), h / math.log(2))
    if kind in ("circle_expanding", "torus_conformal"):
        if meas.kind != "lebesgue":
            return None
        lam = math.log(sys.degree)
        return Analytic(sys.dim * lam if kind == "torus_conformal" else lam,
                        lam, lam, float(sys.dimension))
    if sys.map_id in ("tent", "logistic"):
        return Analytic(math.log(2), math.log(2), math.log(2), 1.0)
    h = math.fsum(math.log(s) / s for s in sys.slopes)
    return Analytic(h, h, h, 1.0)


def full_shift(k: int = 2, p=None, seed: int = 0) -> SystemSpec:
    p = tuple(p) if p is not None else (1.0 / k,) * k
    return SystemSpec("full_shift", bernoulli(p, seed), symbols=k)


def circle_expanding(m: int = 2, seed: int = 0) -> SystemSpec:
    return SystemSpec("circle_expanding", lebesgue(seed), degree=m)


def torus_conformal(m: int = 2, d: int = 2, seed: int = 0) -> SystemSpec:
    return SystemSpec("torus_conformal", lebesgue(seed), degree=m, dim=d)


def interval_map(map_id: str, slopes=None, seed: int = 0) -> SystemSpec:
    kind = "lebesgue" if map_id in ("tent", "piecewise_linear") else "acim"
    return SystemSpec("interval", MeasureSpec(kind, None, seed), map_id=map_id,
                      slopes=tuple(slopes) if slopes is not None else None)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SymbolicWord:
    """Finite symbol sequence: an itinerary, a cylinder label or a shift point."""

    symbols: np.ndarray
    alphabet: int
    boundary_hits: int = 0

    def __post_init__(self):
        s = np.ascontiguousarray(self.symbols)
        if s.ndim != 1 or s.shape[0] < 1:
            raise ValueError("a symbolic word needs at least one symbol")
        if self.alphabet < 1 or s.min() < 0 or s.max() >= self.alphabet:
            raise ValueError("symbol out of range for the alphabet")
        dtype = np.uint8 if self.alphabet <= 256 else np.int64
        s = s.astype(dtype, copy=False)
        s.flags.writeable = False
        object.__setattr__(self, "symbols", s)

    @classmethod
    def from_string(cls, text: str, alphabet: int = 2) -> "SymbolicWord":
        return cls(np.array([int(c) for c in text]), alphabet)

    def __len__(self):
        return self.symbols.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SymbolicWord):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.symbols, other.symbols)

    def __hash__(self):
        return hash((self.alphabet, self.symbols.tobytes()))

    def __str__(self):
        if self.alphabet <= 10:
            return "".join(map(str, self.symbols.tolist()))
        return " ".join(map(str, self.symbols.tolist()))

    def shifted(self, n: int) -> "SymbolicWord":
        if n >= len(self):
            raise WindowExceededError(
                f"cannot shift a word of length {len(self)} by {n}")
        return SymbolicWord(self.symbols[n:], self.alphabet)


@dataclass(frozen=True, eq=False)
class CodedPoint:
    """A point of an expanding map given by its symbolic expansion.

    For ``circle_expanding`` and ``torus_conformal`` the symbols are base-m
    digits (one column per axis on the torus); for tent and logistic they are
    the binary digits of the tent coordinate; for piecewise-linear maps they
    are branch labels.
    """

    symbols: np.ndarray

    def __post_init__(self):
        s = np.ascontiguousarray(self.symbols, dtype=np.uint8)
        s.flags.writeable = False
        object.__setattr__(self, "symbols", s)

    def __len__(self):
        return self.symbols.shape[0]


def _coded_values(sys: SystemSpec, symbols: np.ndarray, length: int) -> np.ndarray:
    """Float coordinates of the first ``length`` iterates, shape (length, dim)."""
    w = sys.window
    if symbols.shape[0] < length + w - 1:
        raise WindowExceededError(
            f"coded point holds {symbols.shape[0]} symbols, "
            f"{length + w - 1} needed")
    if sys.kind in ("circle_expanding", "torus_conformal"):
        cols = symbols.reshape(symbols.shape[0], -1)
        return np.column_stack([
            _kernels.horner_base(np.ascontiguousarray(cols[:, c]), length, w,
                                 float(sys.degree))
            for c in range(cols.shape[1])])
    if sys.map_id == "piecewise_linear":
        offsets = sys._branch_offsets
        inv = 1.0 / np.asarray(sys.slopes)
        return _kernels.horner_branches(symbols, length, w, offsets, inv)[:, None]
    # tent coordinate of the j-th iterate: digits d[j + i] xor d[j - 1]
    y = _kernels.horner_base(symbols, length, w, 2.0)
    flip = np.zeros(length, dtype=bool)
    flip[1:] = symbols[:length - 1] == 1
    y[flip] = (1.0 - 2.0 ** -w) - y[flip]
    if sys.map_id == "logistic":
        y = np.sin(0.5 * math.pi * y) ** 2
    return y[:, None]


def point_value(sys: SystemSpec, x):
    """Float (or float array) value of a point given in any representation."""
    if isinstance(x, CodedPoint):
        v = _coded_values(sys, x.symbols, 1)[0]
        return v if sys.kind == "torus_conformal" else float(v[0])
    return x


def _check_point(sys: SystemSpec, x):
    if sys.kind == "full_shift":
        if not isinstance(x, SymbolicWord) or x.alphabet != sys.symbols:
            raise DomainError("full shift points are SymbolicWords on its alphabet")
        return
    if isinstance(x, CodedPoint):
        if x.symbols.size and int(x.symbols.max()) >= sys.coding_base:
            raise DomainError("coded point symbol exceeds the coding base")
        if sys.kind == "torus_conformal" and (
                x.symbols.ndim != 2 or x.symbols.shape[1] != sys.dim):
            raise DomainError("torus coded points need one digit column per axis")
        return
    if sys.kind == "torus_conformal":
        a = np.asarray(x, dtype=float)
        if a.shape != (sys.dim,) or np.any(a < 0) or np.any(a >= 1):
            raise DomainError(f"torus point must lie in [0,1)^{sys.dim}")
        return
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"not a point of {sys.kind}: {x!r}") from None
    upper_ok = v < 1.0 if sys.kind == "circle_expanding" else v <= 1.0
    if not (0.0 <= v and upper_ok) or math.isnan(v):
        raise DomainError(f"{v} lies outside the phase space of {sys.kind}")


def iterate(sys: SystemSpec, x, n: int):
    """Return f^n(x) in the same representation as ``x``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_point(sys, x)
    if n == 0:
        return x
    if isinstance(x, SymbolicWord):
        return x.shifted(n)
    if isinstance(x, CodedPoint):
        s = x.symbols
        if n >= len(x):
            raise WindowExceededError("coded point exhausted")
        if sys.kind == "interval" and sys.map_id in ("tent", "logistic"):
            return CodedPoint(s[n:] ^ s[n - 1])
        return CodedPoint(s[n:])
    if sys.kind == "torus_conformal":
        x = np.asarray(x, dtype=float)
    else:
        x = float(x)
    for _ in range(n):
        x = sys.step(x)
    return x


def distance(sys: SystemSpec, x, y) -> float:
    """Metric of ``sys`` between two points of the same representation.

    Two shift words that agree on their whole common length are at
    distance 0 (finite words carry no further information).
    """
    if sys.kind == "full_shift":
        a, b = x.symbols, y.symbols
        n = min(a.shape[0], b.shape[0])
        diff = np.flatnonzero(a[:n] != b[:n])
        return 0.0 if diff.size == 0 else 2.0 ** -int(diff[0])
    x, y = point_value(sys, x), point_value(sys, y)
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    if sys.metric in ("circle", "torus_sup"):
        d = np.minimum(d, 1.0 - d)
    return float(np.max(d))


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitBuffer:
    """Forward trajectory f^0(x0), ..., f^(L-1)(x0).

    Geometric orbits carry ``points`` with shape (L, dim). Shift orbits
    carry only ``symbols``: point j is ``symbols[j:]``, and the entries past
    index L are the window that deep ball tests may read. Reading beyond the
    stored window raises :class:`WindowExceededError`.
    """

    system: SystemSpec
    x0: object
    L: int
    points: np.ndarray | None = None
    symbols: np.ndarray | None = None

    @property
    def is_symbolic(self) -> bool:
        return self.points is None

    @property
    def metric_code(self) -> int:
        if self.system.metric == "interval":
            return _kernels.METRIC_INTERVAL
        return _kernels.METRIC_CIRCLE

    def point(self, j: int):
        if not 0 <= j < self.L:
            raise IndexError(f"orbit index {j} outside [0, {self.L})")
        if self.is_symbolic:
            return SymbolicWord(self.symbols[j:], self.system.symbols)
        p = self.points[j]
        return p.copy() if self.system.kind == "torus_conformal" else float(p[0])

    def prefix(self, n: int) -> "OrbitBuffer":
        """The first ``n`` iterates (the symbol window is kept for shifts)."""
        if self.is_symbolic:
            return OrbitBuffer(self.system, self.x0, n, None, self.symbols)
        return OrbitBuffer(self.system, self.x0, n, self.points[:n], None)

    def suffix(self, start: int) -> "OrbitBuffer":
        """The orbit of f^start(x0): iterates ``start`` to ``L - 1``."""
        if not 0 <= start < self.L:
            raise IndexError(f"suffix start {start} outside [0, {self.L})")
        if self.is_symbolic:
            return OrbitBuffer(self.system, None, self.L - start, None,
                               self.symbols[start:])
        return OrbitBuffer(self.system, None, self.L - start, self.points[start:], None)


def orbit(sys: SystemSpec, x0, L: int) -> OrbitBuffer:
    """Orbit of ``x0`` of length ``L``.

    Float seeds are iterated with :func:`iterate` semantics. Coded seeds need
    ``L + sys.window - 1`` symbols; shift seeds need at least ``L`` symbols
    and keep the rest as the read-ahead window.
    """
    if L < 2:
        raise ValueError("orbit length must be >= 2")
    if L > MAX_ORBIT_LENGTH:
        raise ResourceLimitError(f"orbit length {L} exceeds {MAX_ORBIT_LENGTH}")
    _check_point(sys, x0)
    if sys.kind == "full_shift":
        if len(x0) < L:
            raise WindowExceededError(f"shift seed has {len(x0)} < {L} symbols")
        return OrbitBuffer(sys, x0, L, None, x0.symbols)
    if isinstance(x0, CodedPoint):
        pts = _coded_values(sys, x0.symbols, L)
    else:
        pts = np.empty((L, sys.dimension))
        x = x0
        for j in range(L):
            pts[j] = x
            if j + 1 < L:
                x = sys.step(x)
    pts.flags.writeable = False
    return OrbitBuffer(sys, x0, L, pts, None)


# ---------------------------------------------------------------------------
# sampling and coding
# ---------------------------------------------------------------------------

def _check_compatible(measure: MeasureSpec, sys: SystemSpec):
    ok = {
        "full_shift": ("bernoulli",),
        "circle_expanding": ("lebesgue",),
        "torus_conformal": ("lebesgue",),
    }.get(sys.kind)
    if ok is None:
        ok = ("acim",) if sys.map_id == "logistic" else ("lebesgue", "acim")
    if measure.kind not in ok:
        raise IncompatibleMeasureError(
            f"{measure.kind} measure is not available for {sys.kind}"
            + (f"/{sys.map_id}" if sys.map_id else ""))
    if measure.kind == "bernoulli" and len(measure.probabilities) != sys.symbols:
        raise IncompatibleMeasureError("probability vector size != alphabet size")


def sample_symbols(measure: MeasureSpec, sys: SystemSpec, count: int,
                   length: int, stream: int = 0) -> np.ndarray:
    """(count, length[, dim]) array of i.i.d. coding symbols, row i = sample i."""
    _check_compatible(measure, sys)
    rng = measure.generator(stream)
    shape = (count, length)
    if sys.kind == "torus_conformal":
        shape = (count, length, sys.dim)
    if measure.kind == "bernoulli":
        cdf = np.cumsum(measure.probabilities)
        cdf[-1] = 1.0
        u = rng.random(shape)
        return np.searchsorted(cdf, u, side="right").astype(np.uint8)
    if sys.kind == "interval" and sys.map_id == "piecewise_linear":
        cdf = np.cumsum(1.0 / np.asarray(sys.slopes))
        cdf[-1] = 1.0
        return np.searchsorted(cdf, rng.random(shape), side="right").astype(np.uint8)
    return rng.integers(0, sys.coding_base, size=shape, dtype=np.uint8)


def sample_typical(measure: MeasureSpec, sys: SystemSpec, count: int,
                   length: int | None = None, stream: int = 0) -> list:
    """Draw ``count`` points i.i.d. from ``measure``.

    Shift samples are SymbolicWords of ``length`` symbols (default 1024).
    For the geometric kinds ``length=None`` gives plain floats (arrays on the
    torus); an explicit ``length`` gives CodedPoints holding that many
    expansion symbols, which is what long orbits need.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if sys.kind == "full_shift":
        rows = sample_symbols(measure, sys, count, length or 1024, stream)
        return [SymbolicWord(r, sys.symbols) for r in rows]
    if length is None:
        rows = sample_symbols(measure, sys, count, sys.window, stream)
        return [point_value(sys, CodedPoint(r)) for r in rows]
    rows = sample_symbols(measure, sys, count, length, stream)
    return [CodedPoint(r) for r in rows]


def itinerary(sys: SystemSpec, x, L: int, strict: bool = False) -> SymbolicWord:
    """Canonical-partition coding of the first ``L`` iterates of ``x``.

    Partition cells are half-open, so a point on a boundary is coded into
    the cell to its right; such hits are counted in ``boundary_hits`` (or
    raise :class:`BoundaryError` when ``strict``).
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    _check_point(sys, x)
    k = sys.alphabet
    if isinstance(x, SymbolicWord):
        if len(x) < L:
            raise WindowExceededError(f"word of length {len(x)} < {L}")
        return SymbolicWord(x.symbols[:L], k)
    if isinstance(x, CodedPoint):
        if len(x) < L:
            raise WindowExceededError(f"coded point has {len(x)} < {L} symbols")
        return SymbolicWord(itineraries_from_codes(sys, x.symbols[None, :L])[0], k)

    codes = np.empty(L, dtype=np.int64)
    hits = 0
    pt = x
    for j in range(L):
        if j:
            pt = sys.step(pt)
        idx, on_boundary = _cell(sys, pt)
        hits += on_boundary
        codes[j] = idx
    if strict and hits:
        raise BoundaryError(f"{hits} iterate(s) fell on a partition boundary")
    return SymbolicWord(codes, k, boundary_hits=hits)


def itineraries_from_codes(sys: SystemSpec, rows: np.ndarray) -> np.ndarray:
    """Partition itineraries of many coded points at once.

    ``rows`` is the (count, length[, dim]) output of :func:`sample_symbols`;
    row i of the result is the itinerary of ``CodedPoint(rows[i])``.
    """
    rows = np.asarray(rows)
    if sys.kind == "torus_conformal":
        weights = sys.degree ** np.arange(sys.dim)
        return rows.astype(np.int64) @ weights
    if sys.kind == "interval" and sys.map_id in ("tent", "logistic"):
        prev = np.zeros_like(rows)
        prev[:, 1:] = rows[:, :-1]
        return rows ^ prev
    return rows


def _cell(sys: SystemSpec, x) -> tuple[int, bool]:
    if sys.kind in ("circle_expanding", "torus_conformal"):
        y = sys.degree * np.atleast_1d(np.asarray(x, dtype=float))
        digits = np.floor(y).astype(np.int64)
        weights = sys.degree ** np.arange(digits.shape[0])
        return int(digits @ weights), bool(np.any(y == digits))
    if sys.map_id in ("tent", "logistic"):
        return int(x >= 0.5), x == 0.5
    offsets = sys._branch_offsets
    i = int(np.searchsorted(offsets, x, side="right")) - 1
    return i, bool(x == offsets[i] and i > 0)
