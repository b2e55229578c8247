"""Run-configuration files: a line-oriented key=value format.

Blank lines and '#' comments are ignored, keys are case-sensitive, and
unknown or duplicate keys are rejected with their line numbers.  Missing
keys fall back to the documented defaults (the standard experiment set).
``emit_config`` writes a canonical form that ``parse_config`` maps back
to the same RunConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError, ValidationError
from .mesh import HALF_MIN_SPACING
from .model import ModelParams

__all__ = ["RunConfig", "parse_config", "emit_config", "DEFAULTS"]


@dataclass
class RunConfig:
    sigma: float = 0.3
    mu: float = 0.06
    gamma: float = 1.0
    nu01: float = 1.0
    nu10: float = 12.0
    strike: float = 2.0
    horizon: float = 1.0
    s_min: float = 0.0
    s_max: float = 5.0
    grid: str = "uniform"              # uniform | tavella
    intervals: int = 240
    alpha: float = 15.0
    tau_rule: str = HALF_MIN_SPACING   # half_min_spacing | explicit
    dt: float | None = None            # required when tau_rule=explicit
    scheme: str = "linear"             # linear | linearized
    left_bc: str = "natural"           # natural | dirichlet
    capture_trajectory: bool = False
    output_path: str | None = None

    def model_params(self) -> ModelParams:
        return ModelParams(sigma=self.sigma, mu=self.mu, gamma=self.gamma,
                           nu01=self.nu01, nu10=self.nu10, strike=self.strike,
                           horizon=self.horizon, s_min=self.s_min,
                           s_max=self.s_max)

    def validate(self) -> "RunConfig":
        errs = []
        if self.grid not in ("uniform", "tavella"):
            errs.append((0, "grid", "must be uniform or tavella"))
        if self.scheme not in ("linear", "linearized"):
            errs.append((0, "scheme", "must be linear or linearized"))
        if self.left_bc not in ("natural", "dirichlet"):
            errs.append((0, "left_bc", "must be natural or dirichlet"))
        if self.tau_rule not in (HALF_MIN_SPACING, "explicit"):
            errs.append((0, "tau_rule", "must be half_min_spacing or explicit"))
        if self.tau_rule == "explicit" and self.dt is None:
            errs.append((0, "dt", "required when tau_rule=explicit"))
        if self.intervals < 2:
            errs.append((0, "intervals", "must be >= 2"))
        if self.alpha <= 0:
            errs.append((0, "alpha", "must be > 0"))
        if errs:
            raise ConfigError(errs)
        try:
            self.model_params()
        except ValidationError as e:
            raise ConfigError([(0, "model", str(e))]) from e
        return self


DEFAULTS = RunConfig()

_FLOAT_KEYS = {"sigma", "mu", "gamma", "nu01", "nu10", "strike", "horizon",
               "s_min", "s_max", "alpha", "dt"}
_INT_KEYS = {"intervals"}
_BOOL_KEYS = {"capture_trajectory"}
_STR_KEYS = {"grid", "tau_rule", "scheme", "left_bc", "output_path"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | _STR_KEYS


def parse_config(text: str) -> RunConfig:
    """Parse config text; collects every malformed line before raising."""
    values = {}
    errors = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append((lineno, line.split()[0], "expected key=value"))
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _ALL_KEYS:
            errors.append((lineno, key, "unknown key"))
            continue
        if key in seen:
            errors.append((lineno, key, f"duplicate (first on line {seen[key]})"))
            continue
        seen[key] = lineno
        try:
            if key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key in _INT_KEYS:
                values[key] = int(val)
            elif key in _BOOL_KEYS:
                if val not in ("true", "false"):
                    raise ValueError("expected true or false")
                values[key] = val == "true"
            else:
                values[key] = val
        except ValueError as e:
            errors.append((lineno, key, str(e)))
    if errors:
        raise ConfigError(errors)
    cfg = RunConfig(**values)
    try:
        cfg.validate()
    except ConfigError as e:
        raise ConfigError([(seen.get(k, 0), k, m) for _, k, m in e.entries])
    return cfg


def _format_value(key: str, value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(emit_config(c)) == c."""
    lines = []
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        lines.append(f"{f.name}={_format_value(f.name, value)}")
    return "\n".join(lines) + "\n"
