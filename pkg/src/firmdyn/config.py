"""Run configuration: INI sections named after the modules they configure.

Unknown sections and keys are rejected. Business cycles are given as
``[cycle.<name>]`` sections (which replace the four canonical cycles when
present) and risks as ``[risk.<category>]`` sections.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import get_type_hints

from firmdyn import bifurcation, dynamics, lyapunov, stability
from firmdyn.errors import ConfigError
from firmdyn.forcing import (
    RISK_CATEGORIES,
    Calibration,
    CycleSpec,
    RiskProfile,
    canonical_cycles,
)

CONFIG_ENV = "FIRMDYN_CONFIG"


@dataclass(frozen=True)
class DynamicsSettings:
    x0: float = dynamics.DEFAULT_X0
    transient: int = dynamics.DEFAULT_TRANSIENT
    samples: int = dynamics.DEFAULT_SAMPLES


@dataclass(frozen=True)
class BifurcationSettings:
    grid: int = 2000
    tolerance: float = bifurcation.DEFAULT_TOLERANCE
    max_period: int = bifurcation.DEFAULT_MAX_PERIOD
    jump_threshold: float = bifurcation.DEFAULT_JUMP_THRESHOLD
    crisis_gap: float = bifurcation.DEFAULT_CRISIS_GAP
    max_doublings: int = bifurcation.DEFAULT_MAX_DOUBLINGS
    resolution: float = bifurcation.DEFAULT_RESOLUTION


@dataclass(frozen=True)
class LyapunovSettings:
    n: int = lyapunov.DEFAULT_N
    transient: int = lyapunov.DEFAULT_TRANSIENT
    delta0: float = lyapunov.DEFAULT_DELTA0
    renorm_interval: int = lyapunov.DEFAULT_RENORM_INTERVAL
    zero_band: float = lyapunov.DEFAULT_ZERO_BAND


@dataclass(frozen=True)
class ForcingSettings:
    years: float = 120.0
    dt: float = 0.25
    source: str = "cycles"


@dataclass(frozen=True)
class StabilitySettings:
    n: int = lyapunov.DEFAULT_N
    transient: int = lyapunov.DEFAULT_TRANSIENT
    delta0: float = stability.DEFAULT_DELTA0
    epsilon: float = stability.DEFAULT_EPSILON
    horizon: str = stability.SHORT_1Y
    short_1y_steps: int = stability.HORIZON_STEPS[stability.SHORT_1Y]
    long_3y_steps: int = stability.HORIZON_STEPS[stability.LONG_3Y]
    magnitude_cap: float = stability.MAGNITUDE_CAP


@dataclass(frozen=True)
class RunConfig:
    dynamics: DynamicsSettings = field(default_factory=DynamicsSettings)
    bifurcation: BifurcationSettings = field(default_factory=BifurcationSettings)
    lyapunov: LyapunovSettings = field(default_factory=LyapunovSettings)
    forcing: ForcingSettings = field(default_factory=ForcingSettings)
    calibration: Calibration = field(default_factory=Calibration)
    stability: StabilitySettings = field(default_factory=StabilitySettings)
    cycles: tuple = field(default_factory=canonical_cycles)
    risk: RiskProfile = field(default_factory=RiskProfile.uniform)

    def __post_init__(self):
        validate(self)

    def stability_params(self):
        s = self.stability
        return stability.StabilityParams(
            n=s.n,
            transient=s.transient,
            delta0=s.delta0,
            epsilon=s.epsilon,
            horizon=s.horizon,
            horizon_steps={
                stability.SHORT_1Y: s.short_1y_steps,
                stability.LONG_3Y: s.long_3y_steps,
            },
            zero_band=self.lyapunov.zero_band,
            magnitude_cap=s.magnitude_cap,
        )

    def forcing_source(self):
        return self.risk if self.forcing.source == "risk" else self.cycles

    def override(self, section, **values):
        """Copy with some keys of one settings section replaced (``None`` ignored)."""
        values = {k: v for k, v in values.items() if v is not None}
        if not values:
            return self
        return replace(self, **{section: replace(getattr(self, section), **values)})


_SECTIONS = {
    "dynamics": DynamicsSettings,
    "bifurcation": BifurcationSettings,
    "lyapunov": LyapunovSettings,
    "forcing": ForcingSettings,
    "calibration": Calibration,
    "stability": StabilitySettings,
}


def validate(cfg: RunConfig):
    d, b, ly, f, s = cfg.dynamics, cfg.bifurcation, cfg.lyapunov, cfg.forcing, cfg.stability
    checks = [
        (0.0 <= d.x0 <= 1.0, "dynamics.x0 must lie in [0, 1]"),
        (d.transient >= 0, "dynamics.transient must be >= 0"),
        (d.samples >= 1, "dynamics.samples must be >= 1"),
        (b.grid >= 2, "bifurcation.grid must be >= 2"),
        (b.tolerance > 0, "bifurcation.tolerance must be > 0"),
        (b.max_period >= 1, "bifurcation.max_period must be >= 1"),
        (b.jump_threshold > 1, "bifurcation.jump_threshold must be > 1"),
        (b.crisis_gap > 0, "bifurcation.crisis_gap must be > 0"),
        (b.max_doublings >= 0, "bifurcation.max_doublings must be >= 0"),
        (b.resolution > 0, "bifurcation.resolution must be > 0"),
        (ly.n >= 1, "lyapunov.n must be >= 1"),
        (ly.transient >= 0, "lyapunov.transient must be >= 0"),
        (0 < ly.delta0 <= 1e-6, "lyapunov.delta0 must lie in (0, 1e-6]"),
        (1 <= ly.renorm_interval <= ly.n, "lyapunov.renorm_interval must lie in [1, n]"),
        (ly.zero_band > 0, "lyapunov.zero_band must be > 0"),
        (f.years >= 0, "forcing.years must be >= 0"),
        (f.dt > 0, "forcing.dt must be > 0"),
        (f.source in ("cycles", "risk"), "forcing.source must be 'cycles' or 'risk'"),
        (s.n >= 1, "stability.n must be >= 1"),
        (s.transient >= 0, "stability.transient must be >= 0"),
        (0 < s.delta0 < s.epsilon, "stability needs 0 < delta0 < epsilon"),
        (s.horizon in stability.HORIZON_STEPS, "stability.horizon must be short_1y or long_3y"),
        (s.short_1y_steps >= 1 and s.long_3y_steps >= 1, "stability horizons must be >= 1"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)


def _coerce(section, key, raw, kind):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def _settings(section, cls, items):
    types = get_type_hints(cls)
    values = {}
    for key, raw in items:
        if key not in types:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        values[key] = _coerce(section, key, raw, types[key])
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def _cycle(section, name, items):
    known = {"amplitude": float, "period": float, "phase": float}
    values = {}
    for key, raw in items:
        if key not in known:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        values[key] = _coerce(section, key, raw, float)
    missing = {"amplitude", "period"} - set(values)
    if missing:
        raise ConfigError(f"[{section}] missing {', '.join(sorted(missing))}")
    return CycleSpec(name, **values)


def parse_config(text, source="<string>"):
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    settings = {}
    cycles = []
    risks = {}
    for section in parser.sections():
        items = parser.items(section)
        if section in _SECTIONS:
            settings[section] = _settings(section, _SECTIONS[section], items)
        elif section.startswith("cycle."):
            cycles.append(_cycle(section, section[len("cycle."):], items))
        elif section.startswith("risk."):
            category = section[len("risk."):]
            if category not in RISK_CATEGORIES:
                raise ConfigError(f"[{section}] unknown risk category {category!r}")
            risks[category] = _cycle(section, category, items)
        else:
            raise ConfigError(f"unknown section [{section}]")

    kwargs = dict(settings)
    if cycles:
        kwargs["cycles"] = tuple(cycles)
    if risks:
        base = RiskProfile.uniform().components
        kwargs["risk"] = RiskProfile({**base, **risks})
    return RunConfig(**kwargs)


def load_config(path=None):
    """Read ``path``, or the file named by ``$FIRMDYN_CONFIG``, or the defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def render_config(cfg: RunConfig) -> str:
    """INI text that parses back to ``cfg``."""
    lines = []
    for section, cls in _SECTIONS.items():
        obj = getattr(cfg, section)
        lines.append(f"[{section}]")
        for f in fields(cls):
            v = getattr(obj, f.name)
            lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
        lines.append("")
    for c in cfg.cycles:
        lines += _cycle_lines(f"cycle.{c.name}", c)
    for category, c in cfg.risk.components.items():
        lines += _cycle_lines(f"risk.{category}", c)
    return "\n".join(lines)


def _cycle_lines(section, c):
    return [
        f"[{section}]",
        f"amplitude = {c.amplitude!r}",
        f"period = {c.period!r}",
        f"phase = {c.phase!r}",
        "",
    ]
