"""Return-time estimators of entropy, pressure, dimension and recurrence rates.

The package is organised in four layers:

``systems``
    model maps (full shifts, expanding circle and torus maps, interval maps),
    their invariant measures and exact orbit generation;
``recurrence``
    raw observables: return times to dynamical, metric and partition balls,
    minimal return times and covering counts;
``estimators``
    slope fits that turn the observables into limit estimates, and the
    inequality checks that tie them together;
``cli``
    a configuration-driven runner with JSON / CSV / SVG artifacts.
"""
from .exceptions import (AllCensoredError, BoundaryError, ConfigError, DomainError,
                         IncompatibleMeasureError, InsufficientDataError,
                         MissingReportError, RecurrenceLabError, ResourceLimitError,
                         WindowExceededError)
from .systems import (Analytic, CodedPoint, MeasureSpec, OrbitBuffer, SymbolicWord,
                      SystemSpec, bernoulli, circle_expanding, distance,
                      full_shift, interval_map, iterate, itinerary, lebesgue,
                      orbit, sample_symbols, sample_typical, torus_conformal)
from .recurrence import (CENSORED, BallParams, CoverLemmaParams, ReturnTimeGrid,
                         ball_min_return_empirical, ball_return_time,
                         ball_return_times, ball_statistics, cover_lemma_bound,
                         cylinder_cover_count, dyn_ball_contains,
                         katok_ball_cover, katok_cylinder_count,
                         min_return_time_empirical, min_return_time_symbolic,
                         partition_return_time, read_grids_csv,
                         return_time_grid, return_time_profile, write_grids_csv)
from .estimators import (EpsFit, EstimateReport, PotentialSpec, Verdict,
                         check_inequalities, entropy_from_return_times,
                         entropy_katok, entropy_ornstein_weiss, fit_growth_rate,
                         lyapunov_exponent, min_recurrence_rate,
                         minimal_return_ratio, pointwise_dimension,
                         pressure_estimate, recurrence_identities,
                         recurrence_rate)
from .config import ExperimentConfig, default_config, load_config, parse_config

__version__ = "0.1.0"
