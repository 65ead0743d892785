"""Parameter sweeps, period detection, doubling points and crises.

A sweep iterates the logistic map on a grid of control parameters and
keeps the post-transient states of every row. From those rows the module
locates the period-doubling cascade (by bisection on the period verdict),
extrapolates its accumulation point and flags interior crises, i.e. abrupt
expansions of a chaotic attractor between neighbouring rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from firmdyn import _kernels
from firmdyn.dynamics import (
    DEFAULT_SAMPLES,
    DEFAULT_TRANSIENT,
    DEFAULT_X0,
    LAMBDA_MAX,
    LAMBDA_MIN,
)
from firmdyn.errors import BracketError, ConfigError, DomainError, InsufficientDataError

DEFAULT_TOLERANCE = 1e-4
DEFAULT_MAX_PERIOD = 64
DEFAULT_JUMP_THRESHOLD = 1.5
DEFAULT_MAX_DOUBLINGS = 4
DEFAULT_RESOLUTION = 1e-4
#: Sampling gaps narrower than this are bridged when measuring attractor width.
DEFAULT_CRISIS_GAP = 0.05
#: Upper bound on automatic transient doubling, as a multiple of the base.
MAX_TRANSIENT_FACTOR = 2 ** 12
_SETTLE_RATIO = 0.98


@dataclass(frozen=True)
class SweepConfig:
    lambda_min: float
    lambda_max: float
    grid_points: int
    transient_len: int = DEFAULT_TRANSIENT
    sample_len: int = DEFAULT_SAMPLES
    x0: float = DEFAULT_X0

    def __post_init__(self):
        if not (LAMBDA_MIN <= self.lambda_min < self.lambda_max <= LAMBDA_MAX):
            raise ConfigError(
                f"need 0 <= lambda_min < lambda_max <= 4, got "
                f"[{self.lambda_min}, {self.lambda_max}]"
            )
        if self.grid_points < 2:
            raise ConfigError("grid_points must be at least 2")
        if self.transient_len < 0 or self.sample_len < 1:
            raise ConfigError("transient_len must be >= 0 and sample_len >= 1")
        if not (0.0 <= self.x0 <= 1.0):
            raise ConfigError(f"x0={self.x0} outside [0, 1]")

    def lambdas(self):
        return np.linspace(self.lambda_min, self.lambda_max, self.grid_points)


@dataclass(frozen=True)
class PeriodVerdict:
    period: int | None
    tolerance: float

    @property
    def periodic(self):
        return self.period is not None

    @property
    def kind(self):
        return "periodic" if self.periodic else "aperiodic"

    def __str__(self):
        return f"periodic({self.period})" if self.periodic else "aperiodic"


class Crisis(NamedTuple):
    lam: float
    width_before: float
    width_after: float

    @property
    def ratio(self):
        return self.width_after / self.width_before


@dataclass(frozen=True, eq=False)
class BifurcationDiagram:
    config: SweepConfig
    lambdas: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    periods: tuple = field(repr=False)
    doubling_points: tuple = ()
    accumulation_estimate: float | None = None
    crises: tuple = ()

    @property
    def rows(self):
        return list(zip(self.lambdas.tolist(), self.samples))

    def density(self, bins=100):
        """Per-row histogram counts of the samples over [0, 1]."""
        edges = np.linspace(0.0, 1.0, bins + 1)
        counts = np.empty((len(self.lambdas), bins), dtype=np.int64)
        for j, row in enumerate(self.samples):
            counts[j], _ = np.histogram(row, bins=edges)
        return edges, counts


def detect_period(samples, tolerance=DEFAULT_TOLERANCE, max_period=DEFAULT_MAX_PERIOD):
    """Smallest ``p <= max_period`` with ``|s[i] - s[i+p]| < tolerance`` for all i.

    A single sample is vacuously periodic(1).
    """
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise DomainError("cannot detect the period of an empty sample")
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    if s.size == 1:
        return PeriodVerdict(1, tolerance)
    for p in range(1, min(max_period, s.size - 1) + 1):
        if np.all(np.abs(s[:-p] - s[p:]) < tolerance):
            return PeriodVerdict(p, tolerance)
    return PeriodVerdict(None, tolerance)


def count_clusters(samples, tolerance=DEFAULT_TOLERANCE):
    """Number of groups left after splitting sorted samples at gaps >= tolerance."""
    s = np.sort(np.asarray(samples, dtype=float))
    if s.size == 0:
        return 0
    return int(np.count_nonzero(np.diff(s) >= tolerance)) + 1


def _still_relaxing(s, p):
    # A periodic(p) verdict on an orbit that is still collapsing onto a
    # lower period shows a shrinking residual at p/2.
    if p % 2:
        return False
    q = p // 2
    half = len(s) // 2
    if half <= q:
        return False
    early = np.max(np.abs(s[: half - q] - s[q:half]))
    late = np.max(np.abs(s[half:-q] - s[half + q:]))
    return late < _SETTLE_RATIO * early


def settled_orbit(
    lam,
    x0=DEFAULT_X0,
    transient_len=DEFAULT_TRANSIENT,
    sample_len=DEFAULT_SAMPLES,
    tolerance=DEFAULT_TOLERANCE,
    max_period=DEFAULT_MAX_PERIOD,
):
    """``(verdict, samples)`` with the transient doubled while inconclusive.

    Near a doubling point the orbit relaxes slowly (critical slowing down),
    so a verdict is accepted only once the next-lower period's residual has
    stopped shrinking, or the transient hits ``MAX_TRANSIENT_FACTOR`` times
    its base length.
    """
    base = max(int(transient_len), 1)
    x = _kernels.advance(float(lam), float(x0), int(transient_len))
    spent = base
    while True:
        s = _kernels.record(float(lam), x, int(sample_len))
        verdict = detect_period(s, tolerance, max_period)
        if (
            not verdict.periodic
            or not _still_relaxing(s, verdict.period)
            or spent >= base * MAX_TRANSIENT_FACTOR
        ):
            return verdict, s
        x = _kernels.advance(float(lam), s[-1], spent)
        spent *= 2


def settled_period(lam, *args, **kwargs):
    """Period verdict of :func:`settled_orbit`."""
    return settled_orbit(lam, *args, **kwargs)[0]


def _at_most(verdict, period):
    # Cascade levels only: period 3 inside a window is not "<= 4".
    p = verdict.period
    return verdict.periodic and p <= period and p & (p - 1) == 0


def _bisect(pred, lo, hi, resolution):
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _doubling_search(config, max_doublings, tolerance, max_period, resolution, strict):
    grid = config.lambdas()

    def verdict(lam):
        return settled_period(
            lam, config.x0, config.transient_len, config.sample_len, tolerance, max_period
        )

    verdicts = [verdict(lam) for lam in grid]
    points = []
    for k in range(max_doublings):
        period = 2 ** k
        if 2 * period > max_period:
            if strict:
                raise BracketError(
                    f"transition {period}->{2 * period} exceeds max_period={max_period}"
                )
            break
        ok = [_at_most(v, period) for v in verdicts]
        floor = points[-1] if points else -math.inf
        idx = next(
            (i for i in range(1, len(grid)) if ok[i - 1] and not ok[i] and grid[i] > floor),
            None,
        )
        if idx is None:
            if strict:
                raise BracketError(
                    f"transition {period}->{2 * period} not bracketed by "
                    f"[{config.lambda_min}, {config.lambda_max}]"
                )
            continue
        point = _bisect(
            lambda lam: _at_most(verdict(lam), period), grid[idx - 1], grid[idx], resolution
        )
        points.append(float(point))
    return points


def find_doubling_points(
    config,
    max_doublings=DEFAULT_MAX_DOUBLINGS,
    tolerance=DEFAULT_TOLERANCE,
    max_period=DEFAULT_MAX_PERIOD,
    resolution=DEFAULT_RESOLUTION,
):
    """Control parameters of the transitions 1->2, 2->4, ... up to ``max_doublings``.

    Each transition is bracketed on the config grid and refined by
    bisection on the predicate "periodic with period <= 2**k" to within
    ``resolution``. Raises :class:`BracketError` if any requested
    transition is not bracketed by the swept range.
    """
    return _doubling_search(config, max_doublings, tolerance, max_period, resolution, strict=True)


def feigenbaum_ratios(points):
    """Successive interval ratios (p[i+1] - p[i]) / (p[i+2] - p[i+1])."""
    p = list(points)
    return [(p[i + 1] - p[i]) / (p[i + 2] - p[i + 1]) for i in range(len(p) - 2)]


def estimate_accumulation(points):
    """Geometric extrapolation of the cascade from its last three points."""
    p = [float(v) for v in points]
    if len(p) < 3:
        raise InsufficientDataError(f"need at least 3 doubling points, got {len(p)}")
    a, b, c = p[-3:]
    delta = (b - a) / (c - b)
    if delta <= 1.0:
        raise InsufficientDataError(f"doubling intervals are not contracting (ratio {delta})")
    return c + (c - b) / (delta - 1.0)


def attractor_width(samples, gap=DEFAULT_CRISIS_GAP):
    """Length of [0, 1] covered by the samples, bridging gaps narrower than ``gap``.

    Unlike max - min this does not count the empty space between the
    bands of a banded chaotic attractor.
    """
    s = np.sort(np.asarray(samples, dtype=float))
    d = np.diff(s)
    return float(d[d < gap].sum())


def detect_crises(
    rows,
    jump_threshold=DEFAULT_JUMP_THRESHOLD,
    chaos_onset=None,
    gap=DEFAULT_CRISIS_GAP,
    tolerance=DEFAULT_TOLERANCE,
    max_period=DEFAULT_MAX_PERIOD,
):
    """Flag abrupt expansions of a chaotic attractor between adjacent rows.

    ``rows`` is a sequence of ``(lam, samples)`` ordered by ``lam``. A
    crisis is recorded at the later row when the attractor width grows by
    more than ``jump_threshold`` and both rows are aperiodic (and above
    ``chaos_onset`` when given).
    """
    if not jump_threshold > 1.0:
        raise ConfigError("jump_threshold must exceed 1")
    rows = rows_of(rows)
    lams = [float(lam) for lam, _ in rows]
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ConfigError("rows must be strictly ordered by lambda")
    if math.isinf(jump_threshold):
        return ()

    widths = [attractor_width(s, gap) for _, s in rows]
    chaotic = [
        (chaos_onset is None or lam > chaos_onset)
        and not detect_period(s, tolerance, max_period).periodic
        for lam, (_, s) in zip(lams, rows)
    ]
    found = []
    for i in range(1, len(rows)):
        if not (chaotic[i - 1] and chaotic[i]):
            continue
        before, after = widths[i - 1], widths[i]
        if before > 0.0 and after > jump_threshold * before:
            found.append(Crisis(lams[i], before, after))
    return tuple(found)


def sweep(
    config: SweepConfig,
    tolerance=DEFAULT_TOLERANCE,
    max_period=DEFAULT_MAX_PERIOD,
    jump_threshold=DEFAULT_JUMP_THRESHOLD,
    max_doublings=DEFAULT_MAX_DOUBLINGS,
    crisis_gap=DEFAULT_CRISIS_GAP,
    resolution=DEFAULT_RESOLUTION,
) -> BifurcationDiagram:
    """Bifurcation diagram over ``config`` with doubling points and crises.

    Doubling levels the range does not bracket are skipped; the
    accumulation estimate is ``None`` unless three or more are found.
    """
    lambdas = config.lambdas()
    samples = _kernels.sweep_block(
        lambdas, float(config.x0), int(config.transient_len), int(config.sample_len)
    )
    samples.setflags(write=False)
    periods = tuple(detect_period(row, tolerance, max_period) for row in samples)

    points = _doubling_search(
        config, max_doublings, tolerance, max_period, resolution, strict=False
    )
    accumulation = estimate_accumulation(points) if len(points) >= 3 else None
    crises = detect_crises(
        zip(lambdas, samples),
        jump_threshold,
        chaos_onset=accumulation,
        gap=crisis_gap,
        tolerance=tolerance,
        max_period=max_period,
    )
    return BifurcationDiagram(
        config=config,
        lambdas=lambdas,
        samples=samples,
        periods=periods,
        doubling_points=tuple(points),
        accumulation_estimate=accumulation,
        crises=crises,
    )


def rows_of(diagram_or_rows) -> Sequence:
    if isinstance(diagram_or_rows, BifurcationDiagram):
        return diagram_or_rows.rows
    return list(diagram_or_rows)
