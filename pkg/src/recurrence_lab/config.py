"""Experiment configuration: a JSON document validated against a fixed schema.

Unknown keys anywhere in the document are errors, so a misspelt option
never silently falls back to its default. The full schema is listed in the
README; :func:`default_config` loads the configuration shipped with the package.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .exceptions import ConfigError
from .estimators import PotentialSpec
from .systems import MeasureSpec, SystemSpec, _check_compatible

_SYSTEM_KEYS = {"kind", "symbols", "degree", "dim", "map_id", "slopes"}
_MEASURE_KEYS = {"kind", "probabilities", "rng"}
_POTENTIAL_KEYS = {"kind", "value", "table"}
_TOLERANCE_KEYS = {"entropy", "rate", "minimal_rate", "inequality", "max_censored"}
_TOP_KEYS = {
    "system", "measure", "orbit_length", "sample_count", "n_ladder",
    "eps_ladder", "r_ladder", "c", "potential", "seed", "output_dir",
    "tolerances", "centers", "katok_samples",
}

DEFAULT_TOLERANCES = {
    "entropy": 0.07,        # relative
    "rate": 0.1,            # absolute
    "minimal_rate": 0.15,   # absolute
    "inequality": 0.1,      # absolute
    "max_censored": 0.1,    # fraction of censored cells allowed at the read-out eps
}


@dataclass(frozen=True)
class ExperimentConfig:
    system: dict
    measure: dict
    orbit_length: int
    sample_count: int
    n_ladder: tuple
    eps_ladder: tuple
    r_ladder: tuple
    c: float = 0.5
    potential: dict = field(default_factory=lambda: {"kind": "constant", "value": 0.0})
    seed: int = 0
    output_dir: str = "recurrence-lab-out"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    centers: int = 20
    katok_samples: int = 100_000

    # -- derived objects -------------------------------------------------
    def measure_spec(self) -> MeasureSpec:
        m = self.measure
        probs = m.get("probabilities")
        return MeasureSpec(m.get("kind", "lebesgue"),
                           tuple(probs) if probs is not None else None,
                           self.seed, m.get("rng", "philox"))

    def system_spec(self) -> SystemSpec:
        s = dict(self.system)
        if s.get("slopes") is not None:
            s["slopes"] = tuple(s["slopes"])
        return SystemSpec(measure=self.measure_spec(), **s)

    def potential_spec(self) -> PotentialSpec:
        p = dict(self.potential)
        p["table"] = tuple(p.get("table", ()))
        return PotentialSpec(**p)

    def tolerance(self, key: str) -> float:
        return float(self.tolerances[key])

    # -- serialisation ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "system": copy.deepcopy(self.system),
            "measure": copy.deepcopy(self.measure),
            "orbit_length": self.orbit_length,
            "sample_count": self.sample_count,
            "n_ladder": list(self.n_ladder),
            "eps_ladder": list(self.eps_ladder),
            "r_ladder": list(self.r_ladder),
            "c": self.c,
            "potential": copy.deepcopy(self.potential),
            "seed": self.seed,
            "output_dir": self.output_dir,
            "tolerances": dict(self.tolerances),
            "centers": self.centers,
            "katok_samples": self.katok_samples,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def replace(self, **changes) -> "ExperimentConfig":
        d = self.to_dict()
        d.update(changes)
        return parse_config(d)


def _reject_unknown(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}")
    return value


def _ladder(values, name, increasing, integer=False):
    if not isinstance(values, (list, tuple)) or len(values) == 0:
        raise ConfigError(f"{name} must be a non-empty list")
    out = []
    for v in values:
        if integer:
            out.append(_int(v, name, 1))
        else:
            if isinstance(v, bool) or not isinstance(v, (int, float)) \
                    or not math.isfinite(v) or v <= 0:
                raise ConfigError(f"{name} entries must be positive numbers")
            out.append(float(v))
    pairs = list(zip(out, out[1:]))
    if increasing and any(b <= a for a, b in pairs):
        raise ConfigError(f"{name} must be strictly increasing")
    if not increasing and any(b >= a for a, b in pairs):
        raise ConfigError(f"{name} must be strictly decreasing")
    return tuple(out)


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a decoded JSON document and build the configuration."""
    _reject_unknown(data, _TOP_KEYS, "config")
    missing = sorted({"system", "measure", "orbit_length", "sample_count",
                      "n_ladder", "eps_ladder", "r_ladder"} - set(data))
    if missing:
        raise ConfigError(f"missing key(s): {', '.join(missing)}")
    _reject_unknown(data["system"], _SYSTEM_KEYS, "system")
    _reject_unknown(data["measure"], _MEASURE_KEYS, "measure")
    potential = data.get("potential", {"kind": "constant", "value": 0.0})
    _reject_unknown(potential, _POTENTIAL_KEYS, "potential")
    tolerances = dict(DEFAULT_TOLERANCES)
    if "tolerances" in data:
        _reject_unknown(data["tolerances"], _TOLERANCE_KEYS, "tolerances")
        tolerances.update(data["tolerances"])
    for k, v in tolerances.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v >= 0:
            raise ConfigError(f"tolerance {k} must be a non-negative number")

    n_ladder = _ladder(data["n_ladder"], "n_ladder", True, integer=True)
    L = _int(data["orbit_length"], "orbit_length", 2)
    if L <= max(n_ladder) + 10:
        raise ConfigError("orbit_length must exceed max(n_ladder) + 10")
    seed = _int(data.get("seed", 0), "seed", 0)
    if seed >= 1 << 64:
        raise ConfigError("seed must fit in 64 bits")
    c = data.get("c", 0.5)
    if isinstance(c, bool) or not isinstance(c, (int, float)) or not 0 < c < 1:
        raise ConfigError("c must lie in (0, 1)")
    out_dir = data.get("output_dir", "recurrence-lab-out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output_dir must be a non-empty string")

    cfg = ExperimentConfig(
        system=copy.deepcopy(data["system"]),
        measure=copy.deepcopy(data["measure"]),
        orbit_length=L,
        sample_count=_int(data["sample_count"], "sample_count", 1),
        n_ladder=n_ladder,
        eps_ladder=_ladder(data["eps_ladder"], "eps_ladder", False),
        r_ladder=_ladder(data["r_ladder"], "r_ladder", False),
        c=float(c),
        potential=copy.deepcopy(potential),
        seed=seed,
        output_dir=out_dir,
        tolerances={k: float(v) for k, v in tolerances.items()},
        centers=_int(data.get("centers", 20), "centers", 1),
        katok_samples=_int(data.get("katok_samples", 100_000), "katok_samples", 1),
    )
    # build the domain objects once so their own validation surfaces here
    try:
        sys = cfg.system_spec()
        _check_compatible(sys.measure, sys)
        cfg.potential_spec()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(data)


def default_config() -> ExperimentConfig:
    """The configuration shipped with the package."""
    text = resources.files(__package__).joinpath("default_config.json").read_text("utf-8")
    return parse_config(json.loads(text))
