"""Firm stability across the eight theory-of-the-firm channels.

Each theory is an independent logistic system. Its stability magnitude is
the negated Lyapunov exponent (positive = stable). A pair of channels is
stable when both keep two initially close trajectories close over the
whole horizon, and the firm is stable when every one of the 28 pairs is.
Total stability is the sum of the eight magnitudes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from firmdyn import _kernels
from firmdyn.dynamics import DEFAULT_X0, LogisticMap, as_map
from firmdyn.errors import DomainError, TheoryError
from firmdyn.lyapunov import (
    CHAOTIC,
    DEFAULT_N,
    DEFAULT_TRANSIENT,
    DEFAULT_ZERO_BAND,
    LyapunovEstimate,
    classify,
    lyapunov_derivative,
)

THEORIES = (
    "classical_organization",
    "neoclassical_organization",
    "transaction_cost",
    "managerial",
    "principal_agent",
    "behavioural",
    "evolutionary",
    "environment",
)

SHORT_1Y = "short_1y"
LONG_3Y = "long_3y"
HORIZON_STEPS = {SHORT_1Y: 10_000, LONG_3Y: 30_000}

DEFAULT_DELTA0 = 1e-6
DEFAULT_EPSILON = 1e-3
#: Magnitude assigned to a channel whose exponent hit the derivative floor.
MAGNITUDE_CAP = 30.0


@dataclass(frozen=True)
class TheoryChannel:
    theory: str
    map: LogisticMap
    x0: float = DEFAULT_X0
    exponent: LyapunovEstimate | None = None

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise TheoryError(f"unknown theory {self.theory!r}")
        object.__setattr__(self, "map", as_map(self.map))
        if not (0.0 <= self.x0 <= 1.0):
            raise DomainError(f"x0={self.x0!r} outside [0, 1]")

    @property
    def lam(self):
        return self.map.lam


@dataclass(frozen=True)
class StabilityParams:
    n: int = DEFAULT_N
    transient: int = DEFAULT_TRANSIENT
    delta0: float = DEFAULT_DELTA0
    epsilon: float = DEFAULT_EPSILON
    horizon: str = SHORT_1Y
    horizon_steps: dict = field(default_factory=lambda: dict(HORIZON_STEPS))
    zero_band: float = DEFAULT_ZERO_BAND
    magnitude_cap: float = MAGNITUDE_CAP

    def __post_init__(self):
        if self.horizon not in self.horizon_steps:
            raise ValueError(f"unknown horizon {self.horizon!r}")
        if not (0 < self.delta0 < self.epsilon):
            raise ValueError("need 0 < delta0 < epsilon")

    @property
    def steps(self):
        return self.horizon_steps[self.horizon]


@dataclass(frozen=True)
class FirmStabilityReport:
    channels: tuple
    magnitudes: dict
    pairwise: dict
    firm_stable: bool
    total_stability: float
    horizon: str
    demotions: tuple = ()
    zero_band: float = DEFAULT_ZERO_BAND

    def pair(self, a, b):
        """Symmetric lookup of a pairwise verdict."""
        if (a, b) in self.pairwise:
            return self.pairwise[(a, b)]
        return self.pairwise[(b, a)]

    def failing_pairs(self):
        return [k for k, ok in self.pairwise.items() if not ok]

    def to_dict(self):
        return {
            "channels": [
                {
                    "theory": c.theory,
                    "lambda": c.lam,
                    "x0": c.x0,
                    "exponent": c.exponent.exponent,
                    "method": c.exponent.method,
                    "iterations": c.exponent.iterations,
                    "saturated_low": c.exponent.saturated_low,
                    "classification": classify(c.exponent, self.zero_band),
                }
                for c in self.channels
            ],
            "magnitudes": dict(self.magnitudes),
            "pairwise": [
                {"a": a, "b": b, "stable": ok} for (a, b), ok in self.pairwise.items()
            ],
            "demotions": [{"a": a, "b": b, "reason": why} for a, b, why in self.demotions],
            "firm_stable": self.firm_stable,
            "total_stability": self.total_stability,
            "horizon": self.horizon,
        }


def _estimate(channel, n, transient):
    if channel.exponent is not None and channel.exponent.iterations == n:
        return channel.exponent
    return lyapunov_derivative(channel.map, channel.x0, transient, n)


def channel_magnitude(channel, n=DEFAULT_N, transient=DEFAULT_TRANSIENT, cap=MAGNITUDE_CAP):
    """Negated Lyapunov exponent of the channel; ``cap`` when saturated."""
    est = _estimate(channel, n, transient)
    if est.saturated_low:
        return cap
    return 0.0 - est.exponent


def breach_step(channel, delta0=DEFAULT_DELTA0, epsilon=DEFAULT_EPSILON, horizon_steps=10_000):
    """First step at which two trajectories ``delta0`` apart drift ``epsilon`` apart.

    ``None`` when they stay closer than ``epsilon`` for the whole horizon.
    """
    if not (0 < delta0 < epsilon):
        raise DomainError("need 0 < delta0 < epsilon")
    if horizon_steps < 1:
        raise DomainError("horizon_steps must be >= 1")
    x = channel.x0
    y = x + delta0
    if y > 1.0:
        y = x - delta0
    i = _kernels.first_breach(channel.lam, x, y, epsilon, int(horizon_steps))
    return None if i < 0 else int(i)


def channel_close(channel, delta0=DEFAULT_DELTA0, epsilon=DEFAULT_EPSILON, horizon_steps=10_000):
    return breach_step(channel, delta0, epsilon, horizon_steps) is None


def pairwise_stable(a, b, delta0=DEFAULT_DELTA0, epsilon=DEFAULT_EPSILON, horizon_steps=10_000):
    return channel_close(a, delta0, epsilon, horizon_steps) and channel_close(
        b, delta0, epsilon, horizon_steps
    )


def _ordered(channels):
    by_theory = {}
    for c in channels:
        if c.theory in by_theory:
            raise TheoryError(f"duplicate theory {c.theory!r}")
        by_theory[c.theory] = c
    missing = [t for t in THEORIES if t not in by_theory]
    if missing:
        raise TheoryError(f"missing theory channel(s): {', '.join(missing)}")
    return [by_theory[t] for t in THEORIES]


def evaluate_firm(channels, params: StabilityParams | None = None) -> FirmStabilityReport:
    """Magnitudes, all 28 pairwise verdicts and the firm-level verdict.

    A pair that survives the finite horizon is still demoted to unstable
    if either channel's exponent is above the zero band, since a finite
    run can miss slow divergence.
    """
    params = params or StabilityParams()
    channels = _ordered(channels)
    channels = [
        replace(c, exponent=_estimate(c, params.n, params.transient)) for c in channels
    ]

    magnitudes = {
        c.theory: channel_magnitude(c, params.n, params.transient, params.magnitude_cap)
        for c in channels
    }
    total = 0.0
    for t in THEORIES:
        total += magnitudes[t]

    close = {
        c.theory: channel_close(c, params.delta0, params.epsilon, params.steps) for c in channels
    }
    chaotic = {c.theory: classify(c.exponent, params.zero_band) == CHAOTIC for c in channels}

    pairwise = {}
    demotions = []
    for a, b in itertools.combinations(THEORIES, 2):
        ok = close[a] and close[b]
        if ok and (chaotic[a] or chaotic[b]):
            ok = False
            culprit = a if chaotic[a] else b
            demotions.append((a, b, f"positive exponent in {culprit}"))
        pairwise[(a, b)] = ok

    return FirmStabilityReport(
        channels=tuple(channels),
        magnitudes=magnitudes,
        pairwise=pairwise,
        firm_stable=all(pairwise.values()),
        total_stability=total,
        horizon=params.horizon,
        demotions=tuple(demotions),
        zero_band=params.zero_band,
    )


def uniform_channels(lambdas, x0=DEFAULT_X0):
    """Channels in enumeration order from eight control parameters."""
    lambdas = list(lambdas)
    if len(lambdas) != len(THEORIES):
        raise TheoryError(f"need {len(THEORIES)} control parameters, got {len(lambdas)}")
    return [TheoryChannel(t, LogisticMap(lam), x0) for t, lam in zip(THEORIES, lambdas)]
