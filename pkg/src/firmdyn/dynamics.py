"""The logistic map, orbit iteration and fixed-point algebra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from firmdyn import _kernels
from firmdyn.errors import DomainError

#: Seed used whenever an initial state is not given. Avoids 0, 1/2 and
#: the fixed points so no orbit starts on a special point.
DEFAULT_X0 = 0.371
DEFAULT_TRANSIENT = 1000
DEFAULT_SAMPLES = 1000

LAMBDA_MIN = 0.0
LAMBDA_MAX = 4.0


def _check_state(x, what="x"):
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"{what}={x!r} outside [0, 1]")


@dataclass(frozen=True)
class LogisticMap:
    """``f(x) = lam * x * (1 - x)`` with control parameter ``lam`` in [0, 4]."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not (LAMBDA_MIN <= lam <= LAMBDA_MAX):
            raise DomainError(f"control parameter {self.lam!r} outside [0, 4]")
        object.__setattr__(self, "lam", lam)

    def __call__(self, x):
        return step(self, x)

    def derivative(self, x):
        return self.lam * (1.0 - 2.0 * x)


@dataclass(frozen=True)
class Orbit:
    map: LogisticMap
    x0: float
    transient_len: int
    samples: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.samples)

    def __eq__(self, other):
        if not isinstance(other, Orbit):
            return NotImplemented
        return (
            self.map == other.map
            and self.x0 == other.x0
            and self.transient_len == other.transient_len
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None


def as_map(m):
    """Accept either a :class:`LogisticMap` or a bare control parameter."""
    return m if isinstance(m, LogisticMap) else LogisticMap(m)


def step(m, x):
    """One application of the map; ``x`` must lie in [0, 1]."""
    m = as_map(m)
    x = float(x)
    _check_state(x)
    return m.lam * x * (1.0 - x)


def iterate(m, x0=DEFAULT_X0, transient_len=DEFAULT_TRANSIENT, sample_len=DEFAULT_SAMPLES):
    """Discard ``transient_len`` iterates, then record ``sample_len`` more.

    ``samples[0]`` is the first iterate after the transient.
    """
    m = as_map(m)
    x0 = float(x0)
    _check_state(x0, "x0")
    if transient_len < 0 or sample_len < 0:
        raise DomainError("orbit lengths must be non-negative")
    x = _kernels.advance(m.lam, x0, int(transient_len))
    samples = _kernels.record(m.lam, x, int(sample_len))
    samples.setflags(write=False)
    return Orbit(m, x0, int(transient_len), samples)


def fixed_points(m):
    """Fixed points of the map inside [0, 1], in increasing order."""
    m = as_map(m)
    if m.lam <= 1.0:
        return (0.0,)
    return (0.0, 1.0 - 1.0 / m.lam)


def period_two_points(m):
    """The period-2 orbit ``(low, high)`` for ``lam > 3``, else ``None``.

    Roots of ``lam^2 x^2 - lam (lam + 1) x + (lam + 1) = 0``.
    """
    m = as_map(m)
    lam = m.lam
    if lam <= 3.0:
        return None
    disc = math.sqrt((lam + 1.0) * (lam - 3.0))
    return ((lam + 1.0 - disc) / (2.0 * lam), (lam + 1.0 + disc) / (2.0 * lam))
