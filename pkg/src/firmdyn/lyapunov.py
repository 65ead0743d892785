"""Lyapunov exponent of the logistic map, by two independent routes.

``lyapunov_derivative`` averages ln|f'(x)| along an orbit (the one-
dimensional reduction of the Jacobian product). ``lyapunov_separation``
follows a fiducial and a perturbed trajectory and renormalizes their
distance back to ``delta0`` at fixed intervals, in the manner of Wolf et
al. (1985). Both return exponents in nats per iterate.
"""

from __future__ import annotations

from dataclasses import dataclass

from firmdyn import _kernels
from firmdyn.dynamics import DEFAULT_X0, as_map
from firmdyn.errors import DegenerateSeparationError, DomainError

DEFAULT_N = 100_000
DEFAULT_TRANSIENT = 1000
DEFAULT_DELTA0 = 1e-8
DEFAULT_RENORM_INTERVAL = 1
DEFAULT_ZERO_BAND = 0.01
#: Smallest |f'| admitted into the log sum; superstable points hit it.
DERIVATIVE_FLOOR = 1e-300

DERIVATIVE_AVERAGE = "derivative_average"
TRAJECTORY_SEPARATION = "trajectory_separation"

STABLE = "stable"
MARGINAL = "marginal"
CHAOTIC = "chaotic"


@dataclass(frozen=True)
class LyapunovEstimate:
    exponent: float
    method: str
    iterations: int
    saturated_low: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _check_x0(x0):
    x0 = float(x0)
    if not (0.0 <= x0 <= 1.0):
        raise DomainError(f"x0={x0!r} outside [0, 1]")
    return x0


def lyapunov_derivative(m, x0=DEFAULT_X0, transient=DEFAULT_TRANSIENT, n=DEFAULT_N):
    """Mean of ln|lam (1 - 2 x_i)| over ``n`` post-transient iterates."""
    m = as_map(m)
    x0 = _check_x0(x0)
    if n < 1:
        raise DomainError("n must be >= 1")
    x = _kernels.advance(m.lam, x0, int(transient))
    total, floored = _kernels.log_derivative_sum(m.lam, x, int(n), DERIVATIVE_FLOOR)
    return LyapunovEstimate(total / n, DERIVATIVE_AVERAGE, int(n), floored > 0)


def lyapunov_separation(
    m,
    x0=DEFAULT_X0,
    delta0=DEFAULT_DELTA0,
    renorm_interval=DEFAULT_RENORM_INTERVAL,
    n=DEFAULT_N,
    transient=DEFAULT_TRANSIENT,
):
    """Exponent from the renormalized growth of a ``delta0`` perturbation.

    Every ``renorm_interval`` iterates the log growth of the separation is
    accumulated and the perturbed state is pulled back to distance
    ``delta0`` along the separation direction. If the separation collapses
    to exactly zero the perturbation is re-applied once; a second collapse
    raises :class:`DegenerateSeparationError`.
    """
    m = as_map(m)
    x0 = _check_x0(x0)
    if not (0.0 < delta0 <= 1e-6):
        raise DomainError("delta0 must lie in (0, 1e-6]")
    if not (1 <= renorm_interval <= n):
        raise DomainError("need n >= renorm_interval >= 1")

    renorm_interval = int(renorm_interval)
    intervals = int(n) // renorm_interval
    x = _kernels.advance(m.lam, x0, int(transient))
    y = _perturb(x, delta0)
    total = 0.0
    remaining = intervals
    restarted = False
    while remaining:
        part, done, x, y = _kernels.separation_sum(
            m.lam, x, y, delta0, renorm_interval, remaining
        )
        total += part
        remaining -= done
        if remaining:
            if restarted:
                raise DegenerateSeparationError(
                    f"separation collapsed to zero twice at lam={m.lam}"
                )
            restarted = True
            y = _perturb(x, delta0)
    return LyapunovEstimate(
        total / (intervals * renorm_interval), TRAJECTORY_SEPARATION, intervals * renorm_interval
    )


def _perturb(x, delta0):
    y = x + delta0
    return y if y <= 1.0 else x - delta0


def classify(estimate, zero_band=DEFAULT_ZERO_BAND):
    if zero_band <= 0:
        raise ValueError("zero_band must be positive")
    value = estimate.exponent if isinstance(estimate, LyapunovEstimate) else float(estimate)
    if value > zero_band:
        return CHAOTIC
    if value < -zero_band:
        return STABLE
    return MARGINAL

