"""Run configuration: parsing, defaults, and validation."""

import json
from dataclasses import dataclass, field

SUITES = ("lsi", "semigroup", "noncollapse", "euclidean")


class ConfigError(ValueError):
    pass


DEFAULT_MANIFOLD = {"kind": "sphere", "n": 3, "r": 1.0, "m": 512, "k": 64}
DEFAULT_FLOW = {
    "dt": 1e-4,
    "steps": 600,
    "t_star": 0.05,
    "sigma": 0.05,
    "max_substeps": 10_000,
    "snapshot_stride": 0,
}
DEFAULT_FAMILY = {
    "count": 50,
    "sigmas": [0.2, 0.5, 1.0, 2.0, 5.0],
    "flow_times": 5,
}
DEFAULT_TOLERANCES = {
    "lsi": 1e-8,
    "davies": 1e-6,
    "entropy_slack": 1e-6,
    "min_r_slack": 1e-6,
}


@dataclass
class RunConfig:
    manifold: dict = field(default_factory=lambda: dict(DEFAULT_MANIFOLD))
    flow: dict = field(default_factory=lambda: dict(DEFAULT_FLOW))
    suites: list = field(default_factory=lambda: ["all"])
    seed: int = 0
    out: str = "out"
    family: dict = field(default_factory=lambda: dict(DEFAULT_FAMILY))
    inflation: float = 1.05
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def resolved_suites(self):
        if "all" in self.suites:
            return list(SUITES)
        return list(self.suites)

    def to_dict(self):
        return {
            "manifold": self.manifold,
            "flow": self.flow,
            "suites": self.suites,
            "seed": self.seed,
            "out": self.out,
            "family": self.family,
            "inflation": self.inflation,
            "tolerances": self.tolerances,
        }


def _merged(defaults, override, label):
    if not isinstance(override, dict):
        raise ConfigError(f"{label} section must be a mapping")
    unknown = set(override) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown {label} keys: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(override)
    return merged


def parse_config(data):
    """Validate a raw mapping into a RunConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    known = {"manifold", "flow", "suites", "seed", "out", "family", "inflation", "tolerances"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    cfg = RunConfig()
    if "manifold" in data:
        manifold = data["manifold"]
        if not isinstance(manifold, dict) or "kind" not in manifold:
            raise ConfigError("manifold section needs a 'kind'")
        if manifold["kind"] not in ("sphere", "warped"):
            raise ConfigError(f"unknown manifold kind {manifold['kind']!r}")
        cfg.manifold = manifold
    if "flow" in data:
        cfg.flow = _merged(DEFAULT_FLOW, data["flow"], "flow")
        if cfg.flow["dt"] <= 0 or cfg.flow["steps"] < 0:
            raise ConfigError("flow needs dt > 0 and steps >= 0")
    if "suites" in data:
        suites = data["suites"]
        if not isinstance(suites, list):
            raise ConfigError("suites must be a list")
        bad = [s for s in suites if s not in SUITES + ("all",)]
        if bad:
            raise ConfigError(f"unknown suites: {bad}")
        cfg.suites = suites
    if "seed" in data:
        cfg.seed = int(data["seed"])
    if "out" in data:
        cfg.out = str(data["out"])
    if "family" in data:
        cfg.family = _merged(DEFAULT_FAMILY, data["family"], "family")
        if cfg.family["count"] < 1:
            raise ConfigError("family count must be positive")
    if "inflation" in data:
        cfg.inflation = float(data["inflation"])
        if cfg.inflation < 1.0:
            raise ConfigError("inflation factor must be >= 1")
    if "tolerances" in data:
        cfg.tolerances = _merged(DEFAULT_TOLERANCES, data["tolerances"], "tolerances")
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)
