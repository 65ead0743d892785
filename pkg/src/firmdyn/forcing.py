"""Business-cycle and risk forcing, and its calibration onto the control parameter."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol

from firmdyn.errors import ConfigError

RISK_CATEGORIES = (
    "operational",
    "product_market",
    "input",
    "tax",
    "regulatory",
    "legal",
    "financial",
)


@dataclass(frozen=True)
class CycleSpec:
    name: str
    amplitude: float
    period: float  # years
    phase: float = 0.0  # radians

    def __post_init__(self):
        if not self.period > 0:
            raise ConfigError(f"cycle {self.name!r}: period must be positive")
        if not self.amplitude >= 0:
            raise ConfigError(f"cycle {self.name!r}: amplitude must be non-negative")

    def value(self, t):
        return self.amplitude * math.sin(2.0 * math.pi * t / self.period + self.phase)


#: Kitchin, Juglar, Kuznets and Kondratieff cycles at the midpoints of
#: their usual period ranges (3-7, 7-11, 15-25, 45-60 years).
CANONICAL_PERIODS = {
    "kitchin": 5.0,
    "juglar": 9.0,
    "kuznets": 20.0,
    "kondratieff": 52.5,
}
DEFAULT_CYCLE_AMPLITUDE = 0.25


def canonical_cycles(amplitude=DEFAULT_CYCLE_AMPLITUDE):
    return tuple(CycleSpec(name, amplitude, period) for name, period in CANONICAL_PERIODS.items())


@dataclass(frozen=True)
class RiskProfile:
    """One oscillating risk per category; total risk is their sum."""

    components: Mapping[str, CycleSpec]

    def __post_init__(self):
        keys = set(self.components)
        missing = [c for c in RISK_CATEGORIES if c not in keys]
        extra = sorted(keys - set(RISK_CATEGORIES))
        if missing or extra:
            raise ConfigError(
                f"risk profile needs exactly the seven categories; "
                f"missing={missing} unknown={extra}"
            )
        # fixed category order keeps summation order deterministic
        object.__setattr__(
            self, "components", {c: self.components[c] for c in RISK_CATEGORIES}
        )

    @classmethod
    def uniform(cls, amplitude=0.0, period=1.0, phase=0.0):
        return cls({c: CycleSpec(c, amplitude, period, phase) for c in RISK_CATEGORIES})

    def cycles(self):
        return tuple(self.components.values())

    def aggregate_amplitude(self):
        return math.fsum(c.amplitude for c in self.cycles())


def superpose(cycles: Iterable[CycleSpec], t: float) -> float:
    """Sum of ``a_i sin(2 pi t / T_i + phi_i)`` over the cycles."""
    total = 0.0
    for c in cycles:
        total += c.value(t)
    return total


def total_risk(profile: RiskProfile, t: float) -> float:
    return superpose(profile.cycles(), t)


class LambdaCalibration(Protocol):
    lambda_min: float
    lambda_max: float

    def to_lambda(self, amplitude: float) -> float: ...


@dataclass(frozen=True)
class Calibration:
    """Affine amplitude-to-lambda map, clamped to ``[lambda_min, lambda_max]``."""

    amplitude_min: float = 0.0
    amplitude_max: float = 1.0
    lambda_min: float = 2.5
    lambda_max: float = 4.0

    def __post_init__(self):
        if not self.amplitude_min < self.amplitude_max:
            raise ConfigError("calibration needs amplitude_min < amplitude_max")
        if not (0.0 <= self.lambda_min < self.lambda_max <= 4.0):
            raise ConfigError("calibration needs 0 <= lambda_min < lambda_max <= 4")

    def to_lambda(self, amplitude):
        return map_to_lambda(amplitude, self)

    def to_amplitude(self, lam):
        """Inverse of the unclamped affine map."""
        frac = (lam - self.lambda_min) / (self.lambda_max - self.lambda_min)
        return self.amplitude_min + frac * (self.amplitude_max - self.amplitude_min)


def map_to_lambda(amplitude: float, cal: Calibration) -> float:
    frac = (amplitude - cal.amplitude_min) / (cal.amplitude_max - cal.amplitude_min)
    lam = cal.lambda_min + (cal.lambda_max - cal.lambda_min) * frac
    return min(max(lam, cal.lambda_min), cal.lambda_max)


def drive(source, cal: LambdaCalibration, t_grid):
    """``(t, lambda)`` for each time in ``t_grid``."""
    return [(t, lam) for t, _, lam in trace(source, cal, t_grid)]


def trace(source, cal: LambdaCalibration, t_grid):
    """``(t, amplitude, lambda)`` for each time in ``t_grid``.

    ``source`` is either a :class:`RiskProfile` or a sequence of
    :class:`CycleSpec`.
    """
    t_grid = [float(t) for t in t_grid]
    if not t_grid:
        raise ConfigError("t_grid must not be empty")
    cycles = source.cycles() if isinstance(source, RiskProfile) else tuple(source)
    out = []
    for t in t_grid:
        a = superpose(cycles, t)
        out.append((t, a, cal.to_lambda(a)))
    return out


def time_grid(years, dt):
    if not (years >= 0 and dt > 0):
        raise ConfigError("need years >= 0 and dt > 0")
    n = int(math.floor(years / dt + 1e-9))
    return [i * dt for i in range(n + 1)]
